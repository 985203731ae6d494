// Deutsch-Jozsa: oracles, gate builders, programs in both dialects, and the
// end-to-end classification run.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qhl/ast.hpp"
#include "qhl/context.hpp"
#include "qhl/matrix.hpp"
#include "qhl/tables.hpp"
#include "qhl/typecheck.hpp"

namespace qhl {

enum class OracleClass { Constant, Balanced, Other };

std::string class_name(OracleClass c);

class OracleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Largest input width the builders accept.
inline constexpr std::size_t kMaxOracleBits = 6;

/// f : {0,1}^k -> {0,1}. table[x] is f(x), with the first input bit as the
/// most significant bit of x.
class BooleanOracle {
public:
    /// Throws OracleError unless table has 2^k entries and 1 <= k <= 6.
    BooleanOracle(std::size_t k, std::vector<bool> table);

    /// "constant0", "constant1" or "balanced:<bits>" (2^k characters).
    /// A balanced spec must actually be balanced.
    static BooleanOracle parse(const std::string& spec, std::size_t k);

    std::size_t k() const noexcept { return k_; }
    const std::vector<bool>& table() const noexcept { return table_; }
    bool operator()(std::size_t x) const { return table_.at(x); }
    OracleClass cls() const;
    /// Inverse of parse for constant and balanced oracles; "table:<bits>"
    /// otherwise.
    std::string spec() const;

private:
    std::size_t k_;
    std::vector<bool> table_;
};

/// Every constant and balanced oracle on k bits, in table order.
std::vector<BooleanOracle> all_dj_oracles(std::size_t k);

/// H ⊗ ... ⊗ H (k factors). Throws std::invalid_argument for k = 0.
CMatrix build_hadamard(std::size_t k);

/// |x, b> -> |x, b xor f(x)>, index x * 2 + b.
CMatrix build_uf(const BooleanOracle& f);

struct DjProgram {
    VarContext ctx;
    CommandPtr body;
    /// Builtins plus "H<k>", "H<k+1>" and "Uf".
    Tables tables;
};

/// Variable names q1..qk and qe; QPL bits are b1..bk. Throws OracleError
/// when f is neither constant nor balanced.
DjProgram dj_program(const BooleanOracle& f, Dialect dialect);

/// |0..0><0..0| ⊗ I_2: all weight on the input register reading zero.
CMatrix dj_target(std::size_t k);

struct DjReport {
    double p00 = 0.0;
    OracleClass classification = OracleClass::Other;
    /// Diagonal of the final state on q1..qk (qe traced out).
    std::vector<double> distribution;
};

DjReport dj_verify(const BooleanOracle& f);

}  // namespace qhl
