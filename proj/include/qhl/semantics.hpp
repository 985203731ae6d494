// Denotational (Kraus map) and operational (configuration stepping)
// semantics for both dialects.
#pragma once

#include <stdexcept>
#include <vector>

#include "qhl/ast.hpp"
#include "qhl/context.hpp"
#include "qhl/linalg.hpp"
#include "qhl/tables.hpp"

namespace qhl {

enum class LoopMode {
    ExactKraus,  // a loop that does not converge is an error
    Truncated,   // a loop that does not converge is cut and the bound reported
};

struct EvalOptions {
    std::size_t loop_max_iters = 1000;
    double loop_mass_eps = 1e-9;
    LoopMode mode = LoopMode::Truncated;
    double tol = kDefaultTol;

    /// Throws std::invalid_argument for non-positive eps.
    void validate() const;
};

class TruncationNotConverged : public std::runtime_error {
public:
    TruncationNotConverged(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Kraus operators of the primitive commands, embedded in ctx.
namespace kraus {
std::vector<CMatrix> init_zero(const VarContext& ctx, const std::string& var);
CMatrix unitary(const VarContext& ctx, const std::vector<std::string>& vars, const CMatrix& gate);
std::vector<CMatrix> measurement(const VarContext& ctx, const std::vector<std::string>& vars,
                                 const std::vector<CMatrix>& outcomes);
/// |0> ⊗ I: prepends a fresh factor of dimension 2.
CMatrix allocate(const VarContext& ctx);
/// {<i|_var ⊗ I}: removes var's factor.
std::vector<CMatrix> discard(const VarContext& ctx, const std::string& var);
std::vector<CMatrix> assign_bit(const VarContext& ctx, const std::string& var, int value);
/// pi_0 and pi_1 on the given two-level variable.
std::vector<CMatrix> projectors(const VarContext& ctx, const std::string& var);

/// {A_i B_j}: first b, then a. Drops operators with max-norm below 1e-14
/// and recompresses when the list outgrows the minimal Kraus rank.
std::vector<CMatrix> compose(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b);
/// Equivalent list of at most out_dim * in_dim operators.
std::vector<CMatrix> compress(const std::vector<CMatrix>& ops);
/// Choi-type matrix Σ_k vec(E_k) vec(E_k)^dagger with row-major vec.
CMatrix choi(const std::vector<CMatrix>& ops);
}  // namespace kraus

struct Denotation {
    KrausMap map;
    VarContext output;
    bool converged = true;
    /// Upper bound on terminating mass lost to loop truncation.
    double truncation_error = 0.0;
};

/// Kraus map of c from ctx. Assumes c typechecks against ctx and tables.
Denotation denote(const VarContext& ctx, const Command& c, const Tables& tables,
                  const EvalOptions& opts = {});

struct EvalResult {
    DensityMatrix state;
    VarContext output;
    bool converged = true;
    double truncation_error = 0.0;
};

/// Runs c on rho by propagating the state (no Kraus lists are built).
EvalResult eval(const VarContext& ctx, const Command& c, const DensityMatrix& rho,
                const Tables& tables, const EvalOptions& opts = {});

struct TerminationReport {
    double probability = 0.0;
    double truncation_error = 0.0;
    bool converged = true;
};

/// tr(eval(c, rho)) / tr(rho). Throws std::invalid_argument on a zero-trace rho.
TerminationReport termination_probability(const VarContext& ctx, const Command& c,
                                          const DensityMatrix& rho, const Tables& tables,
                                          const EvalOptions& opts = {});

/// <c, rho>; a Skip residual is a terminated configuration.
struct Config {
    CommandPtr residual;
    DensityMatrix state;
    VarContext ctx;
};

bool is_terminal(const Config& cfg);

/// Successor configurations, one per transition rule instance.
std::vector<Config> step(const Config& cfg, const Tables& tables);

struct OperationalResult {
    std::vector<DensityMatrix> terminals;  // multiset, in discovery order
    VarContext output;                     // context of the terminal states
    double unexplored_mass = 0.0;          // trace still in flight at the depth cap
    double pruned_mass = 0.0;              // trace of paths dropped below 1e-12
    std::size_t max_depth_reached = 0;

    CMatrix terminal_sum() const;
};

/// Breadth-first exhaustive expansion. Depth counts state-changing
/// transitions; the administrative <skip; c> -> <c> step is free.
OperationalResult run_operational(const VarContext& ctx, const CommandPtr& c,
                                  const DensityMatrix& rho, std::size_t depth_cap,
                                  const Tables& tables);

}  // namespace qhl
