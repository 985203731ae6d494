#include <algorithm>
#include <cmath>

#include "qhl/semantics.hpp"

namespace qhl::kraus {

namespace {

constexpr double kPruneBelow = 1e-14;

std::size_t position_of(const VarContext& ctx, const std::string& var) {
    const auto p = ctx.position(var);
    if (!p) {
        throw DimensionError("variable '" + var + "' is not in context " + to_string(ctx));
    }
    return *p;
}

// Stride of factor p: product of the dimensions after it.
std::size_t stride_of(const VarContext& ctx, std::size_t p) {
    std::size_t s = 1;
    for (std::size_t i = p + 1; i < ctx.size(); ++i) {
        s *= ctx.vars()[i].dim;
    }
    return s;
}

}  // namespace

std::vector<CMatrix> init_zero(const VarContext& ctx, const std::string& var) {
    const std::size_t d = ctx.vars()[position_of(ctx, var)].dim;
    std::vector<CMatrix> ops;
    for (std::size_t n = 0; n < d; ++n) {
        ops.push_back(embed_at(CMatrix::outer_basis(0, n, d), std::vector<std::string>{var}, ctx));
    }
    return ops;
}

CMatrix unitary(const VarContext& ctx, const std::vector<std::string>& vars, const CMatrix& gate) {
    return embed_at(gate, vars, ctx);
}

std::vector<CMatrix> measurement(const VarContext& ctx, const std::vector<std::string>& vars,
                                 const std::vector<CMatrix>& outcomes) {
    std::vector<CMatrix> ops;
    for (const CMatrix& m : outcomes) {
        ops.push_back(embed_at(m, vars, ctx));
    }
    return ops;
}

CMatrix allocate(const VarContext& ctx) {
    const std::size_t d = ctx.total_dim();
    CMatrix e(2 * d, d);
    for (std::size_t i = 0; i < d; ++i) {
        e(i, i) = 1.0;
    }
    return e;
}

std::vector<CMatrix> discard(const VarContext& ctx, const std::string& var) {
    const std::size_t p = position_of(ctx, var);
    const std::size_t d = ctx.vars()[p].dim;
    const std::size_t total = ctx.total_dim();
    const std::size_t stride = stride_of(ctx, p);
    std::vector<CMatrix> ops(d, CMatrix(total / d, total));
    for (std::size_t j = 0; j < total; ++j) {
        const std::size_t digit = (j / stride) % d;
        const std::size_t rest = (j / (stride * d)) * stride + j % stride;
        ops[digit](rest, j) = 1.0;
    }
    return ops;
}

std::vector<CMatrix> assign_bit(const VarContext& ctx, const std::string& var, int value) {
    const auto v = static_cast<std::size_t>(value);
    return {embed_at(CMatrix::outer_basis(v, 0, 2), std::vector<std::string>{var}, ctx),
            embed_at(CMatrix::outer_basis(v, 1, 2), std::vector<std::string>{var}, ctx)};
}

std::vector<CMatrix> projectors(const VarContext& ctx, const std::string& var) {
    return {embed_at(CMatrix::outer_basis(0, 0, 2), std::vector<std::string>{var}, ctx),
            embed_at(CMatrix::outer_basis(1, 1, 2), std::vector<std::string>{var}, ctx)};
}

CMatrix choi(const std::vector<CMatrix>& ops) {
    const std::size_t n = ops.front().rows() * ops.front().cols();
    CMatrix j(n, n);
    for (const CMatrix& e : ops) {
        const auto v = e.data();
        for (std::size_t a = 0; a < n; ++a) {
            if (v[a] == Complex{}) {
                continue;
            }
            for (std::size_t b = 0; b < n; ++b) {
                j(a, b) += v[a] * std::conj(v[b]);
            }
        }
    }
    return j;
}

std::vector<CMatrix> compress(const std::vector<CMatrix>& ops) {
    const std::size_t r = ops.front().rows();
    const std::size_t c = ops.front().cols();
    const EigenDecomposition ed = eigh(hermitian_part(choi(ops)));
    const double top = ed.values.empty() ? 0.0 : ed.values.back();
    const double cutoff = 1e-14 * std::max(1.0, top);
    std::vector<CMatrix> out;
    for (std::size_t k = ed.values.size(); k-- > 0;) {
        if (ed.values[k] <= cutoff) {
            break;
        }
        const double s = std::sqrt(ed.values[k]);
        CMatrix f(r, c);
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t jj = 0; jj < c; ++jj) {
                f(i, jj) = s * ed.vectors(i * c + jj, k);
            }
        }
        out.push_back(std::move(f));
    }
    if (out.empty()) {
        out.push_back(CMatrix(r, c));
    }
    return out;
}

std::vector<CMatrix> compose(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b) {
    std::vector<CMatrix> out;
    out.reserve(a.size() * b.size());
    for (const CMatrix& x : a) {
        for (const CMatrix& y : b) {
            CMatrix p = x * y;
            if (max_abs(p) >= kPruneBelow) {
                out.push_back(std::move(p));
            }
        }
    }
    const std::size_t r = a.front().rows();
    const std::size_t c = b.front().cols();
    if (out.empty()) {
        out.push_back(CMatrix(r, c));
    }
    if (out.size() > r * c) {
        return compress(out);
    }
    return out;
}

}  // namespace qhl::kraus
