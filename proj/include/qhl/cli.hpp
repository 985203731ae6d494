// Command-line front end: qhl run | wp | wlp | check | prove | dj | assert.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qhl/matrix.hpp"

namespace qhl::cli {

enum ExitCode : int {
    kSuccess = 0,
    kInvalid = 1,
    kMalformed = 2,
    kInconclusive = 3,
};

enum class Format { Human, Machine };

/// Parsed command line. Paths are as given; they are resolved when read.
struct RunConfig {
    std::string subcommand;
    std::filesystem::path program;
    std::filesystem::path outline;
    std::filesystem::path rho;
    std::filesystem::path pre;
    std::filesystem::path post;
    std::string mode = "tot";
    std::string expr;
    std::size_t k = 2;
    std::string oracle;
    std::vector<std::filesystem::path> lib_dirs;
    std::optional<std::filesystem::path> tables;
    std::string dialect = "qpl";

    double tol = kDefaultTol;
    std::size_t loop_max_iters = 1000;
    double loop_mass_eps = 1e-9;
    bool exact = false;
    double fix_eps = 1e-9;
    std::size_t fix_max_iters = 10000;
    std::size_t depth = 64;

    std::optional<std::filesystem::path> output;
    Format format = Format::Human;
};

/// Version of the machine-format report layout.
inline constexpr int kSchemaVersion = 1;

/// Runs one command. args excludes the program name. Reports go to out (or
/// --output), diagnostics to err. QHL_TOL in the environment sets the
/// default tolerance.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Human-format matrix: aligned fixed-point columns, entries below 1e-12
/// shown as zero.
std::string format_human(const CMatrix& m);

}  // namespace qhl::cli
