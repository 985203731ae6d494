#include <cmath>

#include "common/overloaded.hpp"
#include "qhl/hoare.hpp"
#include "qhl/semantics.hpp"
#include "qhl/typecheck.hpp"
#include "semantics/resolve.hpp"

namespace qhl {

void HoareOptions::validate() const {
    if (!(fix_eps > 0.0) || !(tol > 0.0) || max_iters == 0) {
        throw std::invalid_argument("fix_eps, tol and max_iters must be positive");
    }
}

std::string mode_name(TripleMode m) { return m == TripleMode::Total ? "tot" : "par"; }

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Valid:
            return "valid";
        case Verdict::Invalid:
            return "invalid";
        case Verdict::Inconclusive:
            break;
    }
    return "inconclusive";
}

namespace {

CMatrix pull_back(const std::vector<CMatrix>& ops, const CMatrix& q) {
    CMatrix acc(ops.front().cols(), ops.front().cols());
    for (const CMatrix& e : ops) {
        acc += conjugate_by(q, e);
    }
    return acc;
}

class Transformer {
public:
    Transformer(bool liberal, const Tables& tables, const HoareOptions& opts)
        : liberal_(liberal), tables_(tables), opts_(opts) {}

    CMatrix run(const VarContext& ctx, const Command& c, const CMatrix& q) {
        return std::visit(
            detail::overloaded{
                [&](const Skip&) { return q; },
                [&](const Seq& s) {
                    const VarContext mid = context_after(ctx, *s.first);
                    return run(ctx, *s.first, run(mid, *s.second, q));
                },
                [&](const InitZero& x) { return pull_back(kraus::init_zero(ctx, x.var), q); },
                [&](const ApplyU& x) {
                    return conjugate_by(q, detail::resolve_gate(tables_, ctx, x));
                },
                [&](const MeasureCase& x) {
                    return branch(ctx, detail::resolve_measurement(tables_, ctx, x.meas, x.vars),
                                  x.branches, q);
                },
                [&](const While& x) { return loop(ctx, x, q); },
                [&](const NewBit&) { return conjugate_by(q, kraus::allocate(ctx)); },
                [&](const NewQbit&) { return conjugate_by(q, kraus::allocate(ctx)); },
                [&](const Discard& x) { return pull_back(kraus::discard(ctx, x.var), q); },
                [&](const AssignBit& x) {
                    return pull_back(kraus::assign_bit(ctx, x.var, x.value), q);
                },
                [&](const IfBit& x) {
                    return branch(ctx, kraus::projectors(ctx, x.var), {x.on_zero, x.on_one}, q);
                },
                [&](const MeasureIf& x) {
                    return branch(ctx, kraus::projectors(ctx, x.var), {x.on_zero, x.on_one}, q);
                },
            },
            c.node);
    }

    bool converged() const { return converged_; }
    double residual() const { return residual_; }

private:
    CMatrix branch(const VarContext& ctx, const std::vector<CMatrix>& ms,
                   const std::vector<CommandPtr>& branches, const CMatrix& q) {
        CMatrix acc(ctx.total_dim(), ctx.total_dim());
        for (std::size_t m = 0; m < branches.size(); ++m) {
            acc += conjugate_by(run(ctx, *branches[m], q), ms[m]);
        }
        return acc;
    }

    CMatrix loop(const VarContext& ctx, const While& x, const CMatrix& q) {
        const auto ms = detail::resolve_measurement(tables_, ctx, x.meas, x.vars);
        const std::size_t d = ctx.total_dim();
        const CMatrix exit = conjugate_by(q, ms[0]);
        CMatrix cur = liberal_ ? CMatrix::identity(d) : CMatrix(d, d);
        double diff = 0.0;
        for (std::size_t it = 0; it < opts_.max_iters; ++it) {
            CMatrix next = exit + conjugate_by(run(ctx, *x.body, cur), ms[1]);
            diff = max_abs_diff(next, cur);
            cur = std::move(next);
            if (diff < opts_.fix_eps) {
                residual_ = std::max(residual_, diff);
                return cur;
            }
        }
        converged_ = false;
        residual_ = std::max(residual_, diff);
        return cur;
    }

    bool liberal_;
    const Tables& tables_;
    const HoareOptions& opts_;
    bool converged_ = true;
    double residual_ = 0.0;
};

Transformed transform(bool liberal, const VarContext& ctx, const Command& c,
                      const QuantumPredicate& post, const Tables& tables, const HoareOptions& opts) {
    opts.validate();
    const std::size_t out_dim = context_after(ctx, c).total_dim();
    if (post.dim() != out_dim) {
        throw DimensionError("postcondition is " + shape_string(post.matrix()) +
                             " but the program ends in dimension " + std::to_string(out_dim));
    }
    Transformer t(liberal, tables, opts);
    CMatrix m = hermitian_part(t.run(ctx, c, post.matrix()));
    double clamp = 0.0;
    const auto ev = eig_hermitian(m);
    if (ev.front() < 0.0 || ev.back() > 1.0) {
        clamp = clamp_to_predicate(m);
    }
    return {QuantumPredicate::assume_valid(std::move(m), opts.tol), t.converged(), t.residual(),
            clamp};
}

}  // namespace

Transformed wp(const VarContext& ctx, const Command& c, const QuantumPredicate& post,
               const Tables& tables, const HoareOptions& opts) {
    return transform(false, ctx, c, post, tables, opts);
}

Transformed wlp(const VarContext& ctx, const Command& c, const QuantumPredicate& post,
                const Tables& tables, const HoareOptions& opts) {
    return transform(true, ctx, c, post, tables, opts);
}

TripleReport check_triple(const HoareTriple& t, const Tables& tables, const HoareOptions& opts) {
    if (t.pre.dim() != t.ctx.total_dim()) {
        throw DimensionError("precondition is " + shape_string(t.pre.matrix()) +
                             " but the program starts in dimension " +
                             std::to_string(t.ctx.total_dim()));
    }
    TripleReport r{t.mode == TripleMode::Total ? wp(t.ctx, *t.prog, t.post, tables, opts)
                                               : wlp(t.ctx, *t.prog, t.post, tables, opts),
                   Verdict::Valid, 0.0, std::nullopt};
    const CMatrix gap = hermitian_part(r.transformed.pred.matrix() - t.pre.matrix());
    const EigenDecomposition ed = eigh(gap, opts.tol);
    r.min_eigenvalue = ed.values.front();
    const double slack = opts.tol * std::max(1.0, max_abs(gap));
    if (!r.transformed.converged) {
        r.verdict = Verdict::Inconclusive;
    } else if (r.min_eigenvalue >= -slack) {
        r.verdict = Verdict::Valid;
    } else {
        r.verdict = Verdict::Invalid;
        const std::size_t d = gap.rows();
        CMatrix v(d, 1);
        for (std::size_t i = 0; i < d; ++i) {
            v(i, 0) = ed.vectors(i, 0);
        }
        r.witness = DensityMatrix::assume_valid(v * dagger(v), opts.tol);
    }
    return r;
}

}  // namespace qhl
