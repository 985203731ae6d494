// Predicate transformers, triple checking, proof outlines and probability
// assertions.
#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qhl/ast.hpp"
#include "qhl/context.hpp"
#include "qhl/linalg.hpp"
#include "qhl/tables.hpp"

namespace qhl {

struct HoareOptions {
    double fix_eps = 1e-9;
    std::size_t max_iters = 10000;
    double tol = kDefaultTol;

    void validate() const;
};

struct Transformed {
    QuantumPredicate pred;
    bool converged = true;
    /// Max-norm step of the last fixpoint iteration (0 when there is no loop).
    double residual = 0.0;
    /// Largest eigenvalue shift applied to keep 0 ⊑ pred ⊑ I.
    double clamp = 0.0;
};

/// Weakest precondition. post lives on the output context of c, the
/// result on ctx. Loops take the least fixpoint iterated from 0.
Transformed wp(const VarContext& ctx, const Command& c, const QuantumPredicate& post,
               const Tables& tables = {}, const HoareOptions& opts = {});

/// Weakest liberal precondition. Loops take the greatest fixpoint iterated
/// from I.
Transformed wlp(const VarContext& ctx, const Command& c, const QuantumPredicate& post,
                const Tables& tables = {}, const HoareOptions& opts = {});

enum class TripleMode { Total, Partial };

std::string mode_name(TripleMode m);

struct HoareTriple {
    VarContext ctx;
    CommandPtr prog;
    QuantumPredicate pre;
    QuantumPredicate post;
    TripleMode mode = TripleMode::Total;
};

enum class Verdict { Valid, Invalid, Inconclusive };

std::string verdict_name(Verdict v);

struct TripleReport {
    /// wp or wlp of the postcondition.
    Transformed transformed;
    Verdict verdict = Verdict::Valid;
    /// Smallest eigenvalue of transformed - pre.
    double min_eigenvalue = 0.0;
    /// Present when invalid: a pure state on which the triple fails.
    std::optional<DensityMatrix> witness;
};

/// Decides the triple with one Loewner check. Throws DimensionError when
/// the predicates do not fit the program's contexts.
TripleReport check_triple(const HoareTriple& t, const Tables& tables = {},
                          const HoareOptions& opts = {});

struct OutlineStep {
    std::string id;
    std::string rule;  // Skip, AsgnB, AsgnN, Unit, Seq, Measure, While, Cons
    CommandPtr stmt;   // may be null for Seq and Cons
    CMatrix pre;
    CMatrix post;
    std::vector<std::string> premises;
};

struct ProofOutline {
    VarContext ctx;
    CommandPtr program;  // may be null: steps are then checked on their own
    std::optional<CMatrix> pre;
    std::optional<CMatrix> post;
    std::vector<OutlineStep> steps;
};

class OutlineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads an outline document. Program and matrix paths are resolved against
/// the outline's directory; gate sidecars are looked up there and in
/// search_dirs and added to tables.
ProofOutline read_outline_file(const std::filesystem::path& path, Tables& tables,
                               const std::vector<std::filesystem::path>& search_dirs = {},
                               double tol = kDefaultTol);

struct StepVerdict {
    std::string id;
    std::string rule;
    bool ok = false;
    std::string message;
    /// Largest entrywise mismatch, or the most negative eigenvalue for
    /// Loewner checks.
    double residual = 0.0;
};

struct OutlineReport {
    bool valid = false;
    std::vector<StepVerdict> steps;
    /// Problems with the outline as a whole (conclusion, chaining).
    std::vector<std::string> problems;
};

OutlineReport check_outline(const ProofOutline& o, const Tables& tables = {},
                            const HoareOptions& opts = {});

/// Builds the outline whose steps are the structural preconditions of post,
/// in premise-first order, closed by a Cons step when pre is given. Handles
/// loop-free ying-core programs; throws OutlineError otherwise.
ProofOutline derive_outline(const VarContext& ctx, const CommandPtr& program, const CMatrix& post,
                            const std::optional<CMatrix>& pre, const Tables& tables = {});

/// Linear combination of Pr(x = v & ...) and tr terms compared against
/// another such combination, e.g. "Pr(q1=0 & q2=0) = 1".
struct ProbTerm {
    double coeff = 1.0;
    enum class Kind { Constant, Pr, Trace } kind = Kind::Constant;
    std::vector<std::pair<std::string, std::size_t>> conj;  // for Pr
};

enum class Comparison { Eq, Le, Ge };

struct ProbAssertion {
    std::vector<ProbTerm> lhs;
    Comparison cmp = Comparison::Eq;
    std::vector<ProbTerm> rhs;
};

class AssertionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws AssertionError on malformed text.
ProbAssertion parse_assertion(std::string_view text);

struct AssertionResult {
    bool holds = false;
    double lhs = 0.0;
    double rhs = 0.0;
    /// Value of each Pr term on the left, in order.
    std::vector<double> probabilities;
};

/// Throws AssertionError for unknown variables or out-of-range values.
AssertionResult eval_assertion(const ProbAssertion& a, const VarContext& ctx,
                               const DensityMatrix& rho, double tol = kDefaultTol);

}  // namespace qhl
