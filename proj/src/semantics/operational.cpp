#include <deque>

#include "common/overloaded.hpp"
#include "qhl/semantics.hpp"
#include "semantics/resolve.hpp"

namespace qhl {

namespace {

constexpr double kPathPrune = 1e-12;

DensityMatrix push(const std::vector<CMatrix>& ops, const DensityMatrix& rho) {
    CMatrix acc(ops.front().rows(), ops.front().rows());
    for (const CMatrix& e : ops) {
        acc += e * rho.matrix() * dagger(e);
    }
    return DensityMatrix::assume_valid(hermitian_part(acc), rho.tol());
}

DensityMatrix push(const CMatrix& e, const DensityMatrix& rho) {
    return push(std::vector<CMatrix>{e}, rho);
}

std::vector<Config> branch_configs(const Config& cfg, const std::vector<CMatrix>& ms,
                                   const std::vector<CommandPtr>& branches) {
    std::vector<Config> out;
    for (std::size_t m = 0; m < branches.size(); ++m) {
        out.push_back({branches[m], push(ms[m], cfg.state), cfg.ctx});
    }
    return out;
}

// <skip; c> -> <c>, repeatedly.
Config drop_leading_skips(Config cfg) {
    while (const auto* s = std::get_if<Seq>(&cfg.residual->node)) {
        if (!holds<Skip>(*s->first)) {
            break;
        }
        cfg.residual = s->second;
    }
    return cfg;
}

}  // namespace

bool is_terminal(const Config& cfg) { return holds<Skip>(*cfg.residual); }

std::vector<Config> step(const Config& cfg, const Tables& tables) {
    const Command& c = *cfg.residual;
    const VarContext& ctx = cfg.ctx;
    const CommandPtr done = skip();
    return std::visit(
        detail::overloaded{
            [&](const Skip&) { return std::vector<Config>{}; },
            [&](const Seq& s) {
                if (holds<Skip>(*s.first)) {
                    return std::vector<Config>{{s.second, cfg.state, ctx}};
                }
                std::vector<Config> out;
                for (Config& next : step({s.first, cfg.state, ctx}, tables)) {
                    out.push_back({seq(next.residual, s.second), std::move(next.state),
                                   std::move(next.ctx)});
                }
                return out;
            },
            [&](const InitZero& x) {
                return std::vector<Config>{{done, push(kraus::init_zero(ctx, x.var), cfg.state), ctx}};
            },
            [&](const ApplyU& x) {
                return std::vector<Config>{
                    {done, push(detail::resolve_gate(tables, ctx, x), cfg.state), ctx}};
            },
            [&](const MeasureCase& x) {
                return branch_configs(cfg, detail::resolve_measurement(tables, ctx, x.meas, x.vars),
                                      x.branches);
            },
            [&](const While& x) {
                const auto ms = detail::resolve_measurement(tables, ctx, x.meas, x.vars);
                return std::vector<Config>{
                    {done, push(ms[0], cfg.state), ctx},
                    {seq(x.body, cfg.residual), push(ms[1], cfg.state), ctx},
                };
            },
            [&](const NewBit& x) {
                return std::vector<Config>{
                    {done, push(kraus::allocate(ctx), cfg.state), ctx.prepend(make_bit(x.var))}};
            },
            [&](const NewQbit& x) {
                return std::vector<Config>{
                    {done, push(kraus::allocate(ctx), cfg.state), ctx.prepend(make_qbit(x.var))}};
            },
            [&](const Discard& x) {
                return std::vector<Config>{
                    {done, push(kraus::discard(ctx, x.var), cfg.state), ctx.without(x.var)}};
            },
            [&](const AssignBit& x) {
                return std::vector<Config>{
                    {done, push(kraus::assign_bit(ctx, x.var, x.value), cfg.state), ctx}};
            },
            [&](const IfBit& x) {
                return branch_configs(cfg, kraus::projectors(ctx, x.var), {x.on_zero, x.on_one});
            },
            [&](const MeasureIf& x) {
                return branch_configs(cfg, kraus::projectors(ctx, x.var), {x.on_zero, x.on_one});
            },
        },
        c.node);
}

CMatrix OperationalResult::terminal_sum() const {
    const std::size_t d = output.total_dim();
    CMatrix acc(d, d);
    for (const DensityMatrix& t : terminals) {
        acc += t.matrix();
    }
    return acc;
}

OperationalResult run_operational(const VarContext& ctx, const CommandPtr& c,
                                  const DensityMatrix& rho, std::size_t depth_cap,
                                  const Tables& tables) {
    if (rho.dim() != ctx.total_dim()) {
        throw DimensionError("state has dimension " + std::to_string(rho.dim()) +
                             " but the context " + to_string(ctx) + " needs " +
                             std::to_string(ctx.total_dim()));
    }
    OperationalResult result;
    result.output = ctx;
    std::vector<Config> frontier{drop_leading_skips({c, rho, ctx})};
    std::size_t depth = 0;
    bool output_set = false;
    for (;;) {
        std::vector<Config> live;
        for (Config& cfg : frontier) {
            if (is_terminal(cfg)) {
                if (!output_set) {
                    result.output = cfg.ctx;
                    output_set = true;
                }
                result.terminals.push_back(std::move(cfg.state));
            } else if (cfg.state.trace() < kPathPrune) {
                result.pruned_mass += std::max(0.0, cfg.state.trace());
            } else {
                live.push_back(std::move(cfg));
            }
        }
        result.max_depth_reached = depth;
        if (live.empty()) {
            break;
        }
        if (depth == depth_cap) {
            for (const Config& cfg : live) {
                result.unexplored_mass += cfg.state.trace();
            }
            break;
        }
        frontier.clear();
        for (const Config& cfg : live) {
            for (Config& next : step(cfg, tables)) {
                frontier.push_back(drop_leading_skips(std::move(next)));
            }
        }
        ++depth;
    }
    return result;
}

}  // namespace qhl
