#include "qhl/typecheck.hpp"

#include <set>

#include "common/overloaded.hpp"

namespace qhl {

std::string dialect_name(Dialect d) { return d == Dialect::YingCore ? "ying-core" : "qpl"; }

std::string to_string(const TypeError& e) {
    return std::to_string(e.pos.line) + ":" + std::to_string(e.pos.column) + ": " + e.message;
}

namespace {

class Checker {
public:
    Checker(Dialect dialect, const Tables& tables) : dialect_(dialect), tables_(tables) {}

    VarContext check(const VarContext& ctx, const Command& c) {
        return std::visit(detail::overloaded{
                              [&](const Skip&) { return ctx; },
                              [&](const Seq& s) { return check(check(ctx, *s.first), *s.second); },
                              [&](const InitZero& x) { return init_zero(ctx, c, x); },
                              [&](const ApplyU& x) { return apply(ctx, c, x); },
                              [&](const MeasureCase& x) { return measure_case(ctx, c, x); },
                              [&](const While& x) { return loop(ctx, c, x); },
                              [&](const NewBit& x) { return allocate(ctx, c, make_bit(x.var)); },
                              [&](const NewQbit& x) { return allocate(ctx, c, make_qbit(x.var)); },
                              [&](const Discard& x) { return drop(ctx, c, x); },
                              [&](const AssignBit& x) { return assign_bit(ctx, c, x); },
                              [&](const IfBit& x) {
                                  return guarded(ctx, c, x.var, VarKind::Bit, "if", *x.on_zero,
                                                 *x.on_one);
                              },
                              [&](const MeasureIf& x) {
                                  return guarded(ctx, c, x.var, VarKind::Qbit, "measure-if",
                                                 *x.on_zero, *x.on_one);
                              },
                          },
                          c.node);
    }

    void check_context(const VarContext& ctx, SourcePos pos) {
        if (dialect_ != Dialect::YingCore) {
            return;
        }
        for (const VarDecl& v : ctx.vars()) {
            if (v.kind == VarKind::Bit) {
                error(TypeErrorKind::DialectViolation, pos,
                      "ying-core has no classical bits (variable '" + v.name + "')");
            }
        }
    }

    std::vector<TypeError> take_errors() { return std::move(errors_); }

private:
    void error(TypeErrorKind kind, SourcePos pos, std::string message) {
        errors_.push_back({kind, pos, std::move(message)});
    }

    bool qpl_only(const Command& c, const char* what) {
        if (dialect_ == Dialect::YingCore) {
            error(TypeErrorKind::DialectViolation, c.pos,
                  std::string(what) + " is not part of ying-core");
            return false;
        }
        return true;
    }

    const VarDecl* lookup(const VarContext& ctx, const std::string& name, SourcePos pos) {
        if (const VarDecl* v = ctx.find(name)) {
            return v;
        }
        if (discarded_.contains(name)) {
            error(TypeErrorKind::UseAfterDiscard, pos, "variable '" + name + "' used after discard");
        } else {
            error(TypeErrorKind::UnknownVariable, pos, "unknown variable '" + name + "'");
        }
        return nullptr;
    }

    // Resolves a target list; returns the product dimension or 0 on error.
    std::size_t targets(const VarContext& ctx, const std::vector<std::string>& vars, SourcePos pos,
                        bool quantum_only, const char* what) {
        std::set<std::string> seen;
        std::size_t dim = 1;
        bool ok = true;
        for (const std::string& name : vars) {
            if (!seen.insert(name).second) {
                error(TypeErrorKind::DuplicateVariable, pos,
                      std::string(what) + " lists '" + name + "' twice");
                ok = false;
                continue;
            }
            const VarDecl* v = lookup(ctx, name, pos);
            if (v == nullptr) {
                ok = false;
                continue;
            }
            if (quantum_only && v->kind == VarKind::Bit) {
                error(TypeErrorKind::KindMismatch, pos,
                      std::string(what) + " target '" + name + "' is a bit, not a quantum variable");
                ok = false;
            }
            dim *= v->dim;
        }
        return ok ? dim : 0;
    }

    VarContext init_zero(const VarContext& ctx, const Command& c, const InitZero& x) {
        if (const VarDecl* v = lookup(ctx, x.var, c.pos)) {
            if (v->kind == VarKind::Bit && dialect_ == Dialect::YingCore) {
                error(TypeErrorKind::KindMismatch, c.pos,
                      "'" + x.var + "' is a bit; ying-core initializes quantum variables only");
            }
        }
        return ctx;
    }

    VarContext apply(const VarContext& ctx, const Command& c, const ApplyU& x) {
        const std::size_t dim = targets(ctx, x.vars, c.pos, true, "gate application");
        if (!tables_.gates.contains(x.gate)) {
            error(TypeErrorKind::UnknownGate, c.pos, "unknown gate '" + x.gate + "'");
            return ctx;
        }
        if (dim != 0) {
            const CMatrix g = *tables_.gates.lookup(x.gate, dim);
            if (g.rows() != dim) {
                error(TypeErrorKind::ArityMismatch, c.pos,
                      "gate '" + x.gate + "' has dimension " + std::to_string(g.rows()) +
                          " but its targets span dimension " + std::to_string(dim));
            }
        }
        return ctx;
    }

    // Outcome count, or nullopt if the measurement cannot be resolved.
    std::optional<std::size_t> measurement(const VarContext& ctx, const Command& c,
                                           const std::string& meas,
                                           const std::vector<std::string>& vars) {
        const std::size_t dim = targets(ctx, vars, c.pos, false, "measurement");
        if (!tables_.meas.contains(meas)) {
            error(TypeErrorKind::UnknownMeasurement, c.pos, "unknown measurement '" + meas + "'");
            return std::nullopt;
        }
        if (dim == 0) {
            return std::nullopt;
        }
        const auto ops = *tables_.meas.lookup(meas, dim);
        if (ops.front().rows() != dim) {
            error(TypeErrorKind::ArityMismatch, c.pos,
                  "measurement '" + meas + "' has dimension " +
                      std::to_string(ops.front().rows()) + " but its targets span dimension " +
                      std::to_string(dim));
            return std::nullopt;
        }
        return ops.size();
    }

    VarContext join(const VarContext& a, const VarContext& b, SourcePos pos) {
        if (!(a == b)) {
            error(TypeErrorKind::ContextMismatch, pos,
                  "branches end in different contexts " + to_string(a) + " and " + to_string(b));
        }
        return a;
    }

    VarContext measure_case(const VarContext& ctx, const Command& c, const MeasureCase& x) {
        const auto outcomes = measurement(ctx, c, x.meas, x.vars);
        if (outcomes && *outcomes != x.branches.size()) {
            error(TypeErrorKind::ArityMismatch, c.pos,
                  "measurement '" + x.meas + "' has " + std::to_string(*outcomes) +
                      " outcomes but " + std::to_string(x.branches.size()) + " cases are given");
        }
        std::optional<VarContext> out;
        for (const auto& branch : x.branches) {
            VarContext after = check(ctx, *branch);
            out = out ? join(*out, after, c.pos) : after;
        }
        return out.value_or(ctx);
    }

    VarContext loop(const VarContext& ctx, const Command& c, const While& x) {
        const auto outcomes = measurement(ctx, c, x.meas, x.vars);
        if (outcomes && *outcomes != 2) {
            error(TypeErrorKind::ArityMismatch, c.pos,
                  "loop guard '" + x.meas + "' must have exactly 2 outcomes, has " +
                      std::to_string(*outcomes));
        }
        const VarContext after = check(ctx, *x.body);
        if (!(after == ctx)) {
            error(TypeErrorKind::ContextMismatch, c.pos,
                  "loop body must restore its context " + to_string(ctx) + ", ends in " +
                      to_string(after));
        }
        return ctx;
    }

    VarContext allocate(const VarContext& ctx, const Command& c, VarDecl v) {
        if (!qpl_only(c, "allocation")) {
            return ctx;
        }
        if (ctx.contains(v.name)) {
            error(TypeErrorKind::DuplicateVariable, c.pos,
                  "'" + v.name + "' is already in the context");
            return ctx;
        }
        discarded_.erase(v.name);
        return ctx.prepend(std::move(v));
    }

    VarContext drop(const VarContext& ctx, const Command& c, const Discard& x) {
        if (!qpl_only(c, "discard")) {
            return ctx;
        }
        if (lookup(ctx, x.var, c.pos) == nullptr) {
            return ctx;
        }
        discarded_.insert(x.var);
        return ctx.without(x.var);
    }

    VarContext assign_bit(const VarContext& ctx, const Command& c, const AssignBit& x) {
        if (!qpl_only(c, "bit assignment")) {
            return ctx;
        }
        if (const VarDecl* v = lookup(ctx, x.var, c.pos); v && v->kind != VarKind::Bit) {
            error(TypeErrorKind::KindMismatch, c.pos,
                  "'" + x.var + "' is a " + kind_name(v->kind) + ", assignment needs a bit");
        }
        return ctx;
    }

    VarContext guarded(const VarContext& ctx, const Command& c, const std::string& guard,
                       VarKind expected, const char* what, const Command& on_zero,
                       const Command& on_one) {
        if (!qpl_only(c, what)) {
            return ctx;
        }
        if (const VarDecl* v = lookup(ctx, guard, c.pos); v && v->kind != expected) {
            error(TypeErrorKind::KindMismatch, c.pos,
                  std::string(what) + " guard '" + guard + "' must be a " + kind_name(expected) +
                      ", found " + kind_name(v->kind));
        }
        // Discards inside one branch must not leak into the other.
        const auto saved = discarded_;
        VarContext a = check(ctx, on_zero);
        auto after_zero = discarded_;
        discarded_ = saved;
        VarContext b = check(ctx, on_one);
        discarded_.insert(after_zero.begin(), after_zero.end());
        return join(a, b, c.pos);
    }

    Dialect dialect_;
    const Tables& tables_;
    std::vector<TypeError> errors_;
    std::set<std::string> discarded_;
};

}  // namespace

TypecheckResult typecheck(const VarContext& ctx, const CommandPtr& c, Dialect dialect,
                          const Tables& tables) {
    Checker checker(dialect, tables);
    checker.check_context(ctx, c->pos);
    VarContext out = checker.check(ctx, *c);
    TypecheckResult result;
    result.errors = checker.take_errors();
    if (result.errors.empty()) {
        result.program = TypedProgram{ctx, std::move(out), c, dialect};
    }
    return result;
}

VarContext context_after(const VarContext& ctx, const Command& c) {
    return std::visit(detail::overloaded{
                          [&](const Seq& s) { return context_after(context_after(ctx, *s.first), *s.second); },
                          [&](const MeasureCase& x) {
                              return x.branches.empty() ? ctx : context_after(ctx, *x.branches.front());
                          },
                          [&](const NewBit& x) { return ctx.prepend(make_bit(x.var)); },
                          [&](const NewQbit& x) { return ctx.prepend(make_qbit(x.var)); },
                          [&](const Discard& x) { return ctx.without(x.var); },
                          [&](const IfBit& x) { return context_after(ctx, *x.on_zero); },
                          [&](const MeasureIf& x) { return context_after(ctx, *x.on_zero); },
                          [&](const auto&) { return ctx; },
                      },
                      c.node);
}

}  // namespace qhl
