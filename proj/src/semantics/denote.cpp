#include <algorithm>
#include <stdexcept>

#include "common/overloaded.hpp"
#include "qhl/semantics.hpp"
#include "semantics/resolve.hpp"

namespace qhl {

void EvalOptions::validate() const {
    if (!(loop_mass_eps > 0.0)) {
        throw std::invalid_argument("loop_mass_eps must be positive");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("tol must be positive");
    }
}

namespace detail {

CMatrix resolve_gate(const Tables& tables, const VarContext& ctx, const ApplyU& x) {
    std::size_t dim = 1;
    for (const auto& v : x.vars) {
        const VarDecl* d = ctx.find(v);
        if (d == nullptr) {
            throw DimensionError("unknown variable '" + v + "'");
        }
        dim *= d->dim;
    }
    auto g = tables.gates.lookup(x.gate, dim);
    if (!g) {
        throw std::invalid_argument("unknown gate '" + x.gate + "'");
    }
    return kraus::unitary(ctx, x.vars, *g);
}

std::vector<CMatrix> resolve_measurement(const Tables& tables, const VarContext& ctx,
                                         const std::string& meas,
                                         const std::vector<std::string>& vars) {
    std::size_t dim = 1;
    for (const auto& v : vars) {
        const VarDecl* d = ctx.find(v);
        if (d == nullptr) {
            throw DimensionError("unknown variable '" + v + "'");
        }
        dim *= d->dim;
    }
    auto m = tables.meas.lookup(meas, dim);
    if (!m) {
        throw std::invalid_argument("unknown measurement '" + meas + "'");
    }
    return kraus::measurement(ctx, vars, *m);
}

}  // namespace detail

namespace {

using detail::resolve_gate;
using detail::resolve_measurement;

double largest_eigenvalue(const CMatrix& a) {
    const auto ev = eig_hermitian(hermitian_part(a));
    return ev.empty() ? 0.0 : ev.back();
}

CMatrix completeness(const std::vector<CMatrix>& ops) {
    CMatrix acc(ops.front().cols(), ops.front().cols());
    for (const CMatrix& e : ops) {
        acc += dagger(e) * e;
    }
    return acc;
}

struct Partial {
    std::vector<CMatrix> ops;
    VarContext out;
    bool converged = true;
    double error = 0.0;
};

class Denoter {
public:
    Denoter(const Tables& tables, const EvalOptions& opts) : tables_(tables), opts_(opts) {}

    Partial run(const VarContext& ctx, const Command& c) {
        return std::visit(
            detail::overloaded{
                [&](const Skip&) { return Partial{{CMatrix::identity(ctx.total_dim())}, ctx}; },
                [&](const Seq& s) {
                    Partial a = run(ctx, *s.first);
                    Partial b = run(a.out, *s.second);
                    return Partial{kraus::compose(b.ops, a.ops), b.out, a.converged && b.converged,
                                   a.error + b.error};
                },
                [&](const InitZero& x) { return Partial{kraus::init_zero(ctx, x.var), ctx}; },
                [&](const ApplyU& x) { return Partial{{resolve_gate(tables_, ctx, x)}, ctx}; },
                [&](const MeasureCase& x) {
                    const auto ms = resolve_measurement(tables_, ctx, x.meas, x.vars);
                    return branch(ctx, ms, x.branches);
                },
                [&](const While& x) { return loop(ctx, x); },
                [&](const NewBit& x) {
                    return Partial{{kraus::allocate(ctx)}, ctx.prepend(make_bit(x.var))};
                },
                [&](const NewQbit& x) {
                    return Partial{{kraus::allocate(ctx)}, ctx.prepend(make_qbit(x.var))};
                },
                [&](const Discard& x) {
                    return Partial{kraus::discard(ctx, x.var), ctx.without(x.var)};
                },
                [&](const AssignBit& x) {
                    return Partial{kraus::assign_bit(ctx, x.var, x.value), ctx};
                },
                [&](const IfBit& x) {
                    return branch(ctx, kraus::projectors(ctx, x.var), {x.on_zero, x.on_one});
                },
                [&](const MeasureIf& x) {
                    return branch(ctx, kraus::projectors(ctx, x.var), {x.on_zero, x.on_one});
                },
            },
            c.node);
    }

private:
    Partial branch(const VarContext& ctx, const std::vector<CMatrix>& ms,
                   const std::vector<CommandPtr>& branches) {
        Partial out;
        for (std::size_t m = 0; m < branches.size(); ++m) {
            Partial b = run(ctx, *branches[m]);
            auto part = kraus::compose(b.ops, {ms[m]});
            out.ops.insert(out.ops.end(), part.begin(), part.end());
            out.out = b.out;
            out.converged = out.converged && b.converged;
            out.error += b.error;
        }
        const std::size_t cap = out.ops.front().rows() * out.ops.front().cols();
        if (out.ops.size() > cap) {
            out.ops = kraus::compress(out.ops);
        }
        return out;
    }

    Partial loop(const VarContext& ctx, const While& x) {
        const auto ms = resolve_measurement(tables_, ctx, x.meas, x.vars);
        const Partial body = run(ctx, *x.body);
        const auto step = kraus::compose(body.ops, {ms[1]});
        const std::size_t d = ctx.total_dim();

        std::vector<CMatrix> cur{CMatrix::identity(d)};
        std::vector<CMatrix> exits;
        Partial out;
        out.out = ctx;
        double mass = 1.0;
        std::size_t iters = 0;
        bool done = false;
        for (; iters < opts_.loop_max_iters && !done; ++iters) {
            const auto exit = kraus::compose({ms[0]}, cur);
            exits.insert(exits.end(), exit.begin(), exit.end());
            if (exits.size() > d * d) {
                exits = kraus::compress(exits);
            }
            auto next = kraus::compose(step, cur);
            mass = largest_eigenvalue(completeness(next));
            if (mass <= opts_.loop_mass_eps) {
                done = true;
            } else if (max_abs_diff(kraus::choi(next), kraus::choi(cur)) <= 1e-12 &&
                       largest_eigenvalue(completeness(exit)) <= 1e-12) {
                // The in-loop part is invariant and never exits.
                mass = 0.0;
                done = true;
            }
            cur = std::move(next);
        }
        out.ops = exits.empty() ? std::vector<CMatrix>{CMatrix(d, d)} : exits;
        out.converged = done && body.converged;
        out.error = std::min(1.0, mass + body.error * static_cast<double>(iters));
        if (!done && opts_.mode == LoopMode::ExactKraus) {
            throw TruncationNotConverged("loop did not converge within " +
                                             std::to_string(opts_.loop_max_iters) +
                                             " iterations; remaining mass " + std::to_string(mass),
                                         mass);
        }
        return out;
    }

    const Tables& tables_;
    const EvalOptions& opts_;
};

CMatrix apply_ops(const std::vector<CMatrix>& ops, const CMatrix& rho) {
    CMatrix acc(ops.front().rows(), ops.front().rows());
    for (const CMatrix& e : ops) {
        acc += e * rho * dagger(e);
    }
    return acc;
}

struct StateResult {
    CMatrix rho;
    VarContext out;
    bool converged = true;
    double error = 0.0;
};

class Evaluator {
public:
    Evaluator(const Tables& tables, const EvalOptions& opts) : tables_(tables), opts_(opts) {}

    StateResult run(const VarContext& ctx, const Command& c, const CMatrix& rho) {
        return std::visit(
            detail::overloaded{
                [&](const Skip&) { return StateResult{rho, ctx}; },
                [&](const Seq& s) {
                    StateResult a = run(ctx, *s.first, rho);
                    StateResult b = run(a.out, *s.second, a.rho);
                    b.converged = a.converged && b.converged;
                    b.error += a.error;
                    return b;
                },
                [&](const InitZero& x) {
                    return StateResult{apply_ops(kraus::init_zero(ctx, x.var), rho), ctx};
                },
                [&](const ApplyU& x) {
                    const CMatrix u = resolve_gate(tables_, ctx, x);
                    return StateResult{u * rho * dagger(u), ctx};
                },
                [&](const MeasureCase& x) {
                    return branch(ctx, resolve_measurement(tables_, ctx, x.meas, x.vars), x.branches, rho);
                },
                [&](const While& x) { return loop(ctx, x, rho); },
                [&](const NewBit& x) {
                    return StateResult{apply_ops({kraus::allocate(ctx)}, rho),
                                       ctx.prepend(make_bit(x.var))};
                },
                [&](const NewQbit& x) {
                    return StateResult{apply_ops({kraus::allocate(ctx)}, rho),
                                       ctx.prepend(make_qbit(x.var))};
                },
                [&](const Discard& x) {
                    return StateResult{apply_ops(kraus::discard(ctx, x.var), rho),
                                       ctx.without(x.var)};
                },
                [&](const AssignBit& x) {
                    return StateResult{apply_ops(kraus::assign_bit(ctx, x.var, x.value), rho), ctx};
                },
                [&](const IfBit& x) {
                    return branch(ctx, kraus::projectors(ctx, x.var), {x.on_zero, x.on_one}, rho);
                },
                [&](const MeasureIf& x) {
                    return branch(ctx, kraus::projectors(ctx, x.var), {x.on_zero, x.on_one}, rho);
                },
            },
            c.node);
    }

private:
    StateResult branch(const VarContext& ctx, const std::vector<CMatrix>& ms,
                       const std::vector<CommandPtr>& branches, const CMatrix& rho) {
        std::optional<StateResult> out;
        for (std::size_t m = 0; m < branches.size(); ++m) {
            StateResult b = run(ctx, *branches[m], ms[m] * rho * dagger(ms[m]));
            if (!out) {
                out = std::move(b);
            } else {
                out->rho += b.rho;
                out->converged = out->converged && b.converged;
                out->error += b.error;
            }
        }
        return *out;
    }

    StateResult loop(const VarContext& ctx, const While& x, const CMatrix& rho) {
        const auto ms = resolve_measurement(tables_, ctx, x.meas, x.vars);
        StateResult out{CMatrix(rho.rows(), rho.cols()), ctx};
        CMatrix in = rho;
        double mass = trace(in).real();
        bool done = mass <= opts_.loop_mass_eps;
        for (std::size_t it = 0; it < opts_.loop_max_iters && !done; ++it) {
            const CMatrix exit = ms[0] * in * dagger(ms[0]);
            out.rho += exit;
            StateResult b = run(ctx, *x.body, ms[1] * in * dagger(ms[1]));
            out.converged = out.converged && b.converged;
            out.error += b.error;
            mass = trace(b.rho).real();
            if (mass <= opts_.loop_mass_eps) {
                done = true;
            } else if (max_abs_diff(b.rho, in) <= 1e-13 && trace(exit).real() <= 1e-13) {
                mass = 0.0;
                done = true;
            }
            in = std::move(b.rho);
        }
        out.converged = out.converged && done;
        out.error = std::min(1.0, out.error + std::max(0.0, mass));
        if (!done && opts_.mode == LoopMode::ExactKraus) {
            throw TruncationNotConverged("loop did not converge within " +
                                             std::to_string(opts_.loop_max_iters) +
                                             " iterations; remaining mass " + std::to_string(mass),
                                         mass);
        }
        return out;
    }

    const Tables& tables_;
    const EvalOptions& opts_;
};

}  // namespace

Denotation denote(const VarContext& ctx, const Command& c, const Tables& tables,
                  const EvalOptions& opts) {
    opts.validate();
    Partial p = Denoter(tables, opts).run(ctx, c);
    return {KrausMap::assume_valid(std::move(p.ops)), std::move(p.out), p.converged, p.error};
}

EvalResult eval(const VarContext& ctx, const Command& c, const DensityMatrix& rho,
                const Tables& tables, const EvalOptions& opts) {
    opts.validate();
    if (rho.dim() != ctx.total_dim()) {
        throw DimensionError("state has dimension " + std::to_string(rho.dim()) +
                             " but the context " + to_string(ctx) + " needs " +
                             std::to_string(ctx.total_dim()));
    }
    StateResult r = Evaluator(tables, opts).run(ctx, c, rho.matrix());
    return {DensityMatrix::assume_valid(hermitian_part(r.rho), opts.tol), std::move(r.out),
            r.converged, r.error};
}

TerminationReport termination_probability(const VarContext& ctx, const Command& c,
                                          const DensityMatrix& rho, const Tables& tables,
                                          const EvalOptions& opts) {
    const double t = rho.trace();
    if (!(t > 0.0)) {
        throw std::invalid_argument("termination probability needs a state with nonzero trace");
    }
    const EvalResult r = eval(ctx, c, rho, tables, opts);
    return {r.state.trace() / t, r.truncation_error / t, r.converged};
}

}  // namespace qhl
