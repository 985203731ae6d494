// Typing contexts: the ordered variables whose tensor product is the state
// space. The first variable is the leftmost (most significant) factor.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qhl/linalg.hpp"

namespace qhl {

enum class VarKind { Bit, Qbit, Qunit };

struct VarDecl {
    std::string name;
    VarKind kind = VarKind::Qbit;
    std::size_t dim = 2;  // 2 for bits and qubits

    friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

/// Qunit dimension used when a declaration does not give one.
inline constexpr std::size_t kDefaultQunitDim = 8;

VarDecl make_bit(std::string name);
VarDecl make_qbit(std::string name);
VarDecl make_qunit(std::string name, std::size_t dim = kDefaultQunitDim);

std::string kind_name(VarKind kind);

class VarContext {
public:
    VarContext() = default;
    /// Throws std::invalid_argument on duplicate names or bad dimensions.
    explicit VarContext(std::vector<VarDecl> vars);

    const std::vector<VarDecl>& vars() const noexcept { return vars_; }
    std::size_t size() const noexcept { return vars_.size(); }
    bool empty() const noexcept { return vars_.empty(); }

    std::optional<std::size_t> position(const std::string& name) const;
    const VarDecl* find(const std::string& name) const;
    bool contains(const std::string& name) const { return find(name) != nullptr; }

    std::vector<std::size_t> dims() const;
    /// Product of factor dimensions; 1 for the empty context.
    std::size_t total_dim() const;

    /// New context with v as the leading factor.
    VarContext prepend(VarDecl v) const;
    VarContext without(const std::string& name) const;

    friend bool operator==(const VarContext&, const VarContext&) = default;

private:
    std::vector<VarDecl> vars_;
};

/// embed_at resolved by variable name. Throws DimensionError when a name is
/// missing, repeated, or the operator does not fit.
CMatrix embed_at(const CMatrix& op, const std::vector<std::string>& names, const VarContext& ctx);
CMatrix embed_at(const CMatrix& op, std::span<const std::size_t> positions, const VarContext& ctx);

std::string to_string(const VarContext& ctx);

}  // namespace qhl
