#include "qhl/context.hpp"

#include <stdexcept>

namespace qhl {

VarDecl make_bit(std::string name) { return {std::move(name), VarKind::Bit, 2}; }
VarDecl make_qbit(std::string name) { return {std::move(name), VarKind::Qbit, 2}; }
VarDecl make_qunit(std::string name, std::size_t dim) {
    return {std::move(name), VarKind::Qunit, dim};
}

std::string kind_name(VarKind kind) {
    switch (kind) {
        case VarKind::Bit: return "bit";
        case VarKind::Qbit: return "qbit";
        case VarKind::Qunit: return "qunit";
    }
    return "?";
}

VarContext::VarContext(std::vector<VarDecl> vars) : vars_(std::move(vars)) {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        const VarDecl& v = vars_[i];
        if (v.name.empty()) {
            throw std::invalid_argument("variable with empty name");
        }
        if (v.kind == VarKind::Qunit ? v.dim < 2 : v.dim != 2) {
            throw std::invalid_argument("variable '" + v.name + "' has invalid dimension");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (vars_[j].name == v.name) {
                throw std::invalid_argument("duplicate variable '" + v.name + "'");
            }
        }
    }
}

std::optional<std::size_t> VarContext::position(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

const VarDecl* VarContext::find(const std::string& name) const {
    const auto pos = position(name);
    return pos ? &vars_[*pos] : nullptr;
}

std::vector<std::size_t> VarContext::dims() const {
    std::vector<std::size_t> out;
    out.reserve(vars_.size());
    for (const VarDecl& v : vars_) {
        out.push_back(v.dim);
    }
    return out;
}

std::size_t VarContext::total_dim() const {
    std::size_t d = 1;
    for (const VarDecl& v : vars_) {
        d *= v.dim;
    }
    return d;
}

VarContext VarContext::prepend(VarDecl v) const {
    std::vector<VarDecl> vars;
    vars.reserve(vars_.size() + 1);
    vars.push_back(std::move(v));
    vars.insert(vars.end(), vars_.begin(), vars_.end());
    return VarContext(std::move(vars));
}

VarContext VarContext::without(const std::string& name) const {
    std::vector<VarDecl> vars;
    for (const VarDecl& v : vars_) {
        if (v.name != name) {
            vars.push_back(v);
        }
    }
    return VarContext(std::move(vars));
}

CMatrix embed_at(const CMatrix& op, const std::vector<std::string>& names, const VarContext& ctx) {
    std::vector<std::size_t> positions;
    positions.reserve(names.size());
    for (const std::string& n : names) {
        const auto pos = ctx.position(n);
        if (!pos) {
            throw DimensionError("embed_at: unknown variable '" + n + "'");
        }
        positions.push_back(*pos);
    }
    return embed_at(op, positions, ctx);
}

CMatrix embed_at(const CMatrix& op, std::span<const std::size_t> positions, const VarContext& ctx) {
    const auto dims = ctx.dims();
    return embed_at(op, positions, std::span<const std::size_t>(dims));
}

std::string to_string(const VarContext& ctx) {
    std::string s = "[";
    for (std::size_t i = 0; i < ctx.size(); ++i) {
        const VarDecl& v = ctx.vars()[i];
        if (i != 0) {
            s += ", ";
        }
        s += v.name + ":" + kind_name(v.kind);
        if (v.kind == VarKind::Qunit) {
            s += "[" + std::to_string(v.dim) + "]";
        }
    }
    return s + "]";
}

}  // namespace qhl
