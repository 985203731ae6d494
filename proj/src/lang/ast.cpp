#include "qhl/ast.hpp"

#include <algorithm>

#include "common/overloaded.hpp"

namespace qhl {

using detail::overloaded;

CommandPtr make_command(CommandNode node, SourcePos pos) {
    return std::make_shared<const Command>(Command{std::move(node), pos});
}

CommandPtr skip() { return make_command(Skip{}); }

CommandPtr seq(CommandPtr first, CommandPtr second) {
    return make_command(Seq{std::move(first), std::move(second)});
}

CommandPtr seq(std::vector<CommandPtr> commands) {
    if (commands.empty()) {
        return skip();
    }
    CommandPtr acc = commands.back();
    for (std::size_t i = commands.size() - 1; i-- > 0;) {
        acc = seq(commands[i], acc);
    }
    return acc;
}

CommandPtr init_zero(std::string var) { return make_command(InitZero{std::move(var)}); }

CommandPtr apply_gate(std::vector<std::string> vars, std::string gate) {
    return make_command(ApplyU{std::move(vars), std::move(gate)});
}

CommandPtr measure_case(std::string meas, std::vector<std::string> vars,
                        std::vector<CommandPtr> branches) {
    return make_command(MeasureCase{std::move(meas), std::move(vars), std::move(branches)});
}

CommandPtr while_loop(std::string meas, std::vector<std::string> vars, CommandPtr body) {
    return make_command(While{std::move(meas), std::move(vars), std::move(body)});
}

CommandPtr new_bit(std::string var) { return make_command(NewBit{std::move(var)}); }
CommandPtr new_qbit(std::string var) { return make_command(NewQbit{std::move(var)}); }
CommandPtr discard(std::string var) { return make_command(Discard{std::move(var)}); }
CommandPtr assign_bit(std::string var, int value) {
    return make_command(AssignBit{std::move(var), value});
}
CommandPtr if_bit(std::string var, CommandPtr on_zero, CommandPtr on_one) {
    return make_command(IfBit{std::move(var), std::move(on_zero), std::move(on_one)});
}
CommandPtr measure_if(std::string var, CommandPtr on_zero, CommandPtr on_one) {
    return make_command(MeasureIf{std::move(var), std::move(on_zero), std::move(on_one)});
}

bool same_structure(const Command& a, const Command& b) {
    if (a.node.index() != b.node.index()) {
        return false;
    }
    const auto same = [](const CommandPtr& x, const CommandPtr& y) {
        return same_structure(*x, *y);
    };
    return std::visit(
        overloaded{
            [](const Skip&) { return true; },
            [&](const Seq& x) {
                const auto& y = std::get<Seq>(b.node);
                return same(x.first, y.first) && same(x.second, y.second);
            },
            [&](const InitZero& x) { return x.var == std::get<InitZero>(b.node).var; },
            [&](const ApplyU& x) {
                const auto& y = std::get<ApplyU>(b.node);
                return x.vars == y.vars && x.gate == y.gate;
            },
            [&](const MeasureCase& x) {
                const auto& y = std::get<MeasureCase>(b.node);
                return x.meas == y.meas && x.vars == y.vars &&
                       std::equal(x.branches.begin(), x.branches.end(), y.branches.begin(),
                                  y.branches.end(), same);
            },
            [&](const While& x) {
                const auto& y = std::get<While>(b.node);
                return x.meas == y.meas && x.vars == y.vars && same(x.body, y.body);
            },
            [&](const NewBit& x) { return x.var == std::get<NewBit>(b.node).var; },
            [&](const NewQbit& x) { return x.var == std::get<NewQbit>(b.node).var; },
            [&](const Discard& x) { return x.var == std::get<Discard>(b.node).var; },
            [&](const AssignBit& x) {
                const auto& y = std::get<AssignBit>(b.node);
                return x.var == y.var && x.value == y.value;
            },
            [&](const IfBit& x) {
                const auto& y = std::get<IfBit>(b.node);
                return x.var == y.var && same(x.on_zero, y.on_zero) && same(x.on_one, y.on_one);
            },
            [&](const MeasureIf& x) {
                const auto& y = std::get<MeasureIf>(b.node);
                return x.var == y.var && same(x.on_zero, y.on_zero) && same(x.on_one, y.on_one);
            },
        },
        a.node);
}

std::vector<CommandPtr> flatten_seq(const CommandPtr& c) {
    if (const auto* s = std::get_if<Seq>(&c->node)) {
        auto out = flatten_seq(s->first);
        auto rest = flatten_seq(s->second);
        out.insert(out.end(), rest.begin(), rest.end());
        return out;
    }
    return {c};
}

CommandPtr normalize_seq(const CommandPtr& c) {
    return std::visit(
        overloaded{
            [&](const Seq&) {
                auto parts = flatten_seq(c);
                for (auto& p : parts) {
                    p = normalize_seq(p);
                }
                CommandPtr out = seq(std::move(parts));
                return make_command(out->node, c->pos);
            },
            [&](const MeasureCase& m) {
                std::vector<CommandPtr> branches;
                for (const auto& b : m.branches) {
                    branches.push_back(normalize_seq(b));
                }
                return make_command(MeasureCase{m.meas, m.vars, std::move(branches)}, c->pos);
            },
            [&](const While& w) {
                return make_command(While{w.meas, w.vars, normalize_seq(w.body)}, c->pos);
            },
            [&](const IfBit& i) {
                return make_command(
                    IfBit{i.var, normalize_seq(i.on_zero), normalize_seq(i.on_one)}, c->pos);
            },
            [&](const MeasureIf& i) {
                return make_command(
                    MeasureIf{i.var, normalize_seq(i.on_zero), normalize_seq(i.on_one)}, c->pos);
            },
            [&](const auto&) { return c; },
        },
        c->node);
}

namespace {

template <typename F>
void for_each_child(const Command& c, F&& f) {
    std::visit(overloaded{
                   [&](const Seq& s) {
                       f(*s.first);
                       f(*s.second);
                   },
                   [&](const MeasureCase& m) {
                       for (const auto& b : m.branches) {
                           f(*b);
                       }
                   },
                   [&](const While& w) { f(*w.body); },
                   [&](const IfBit& i) {
                       f(*i.on_zero);
                       f(*i.on_one);
                   },
                   [&](const MeasureIf& i) {
                       f(*i.on_zero);
                       f(*i.on_one);
                   },
                   [](const auto&) {},
               },
               c.node);
}

}  // namespace

std::size_t node_count(const Command& c) {
    std::size_t n = 1;
    for_each_child(c, [&](const Command& child) { n += node_count(child); });
    return n;
}

std::size_t depth(const Command& c) {
    std::size_t d = 0;
    for_each_child(c, [&](const Command& child) { d = std::max(d, depth(child)); });
    return d + 1;
}

bool contains_loop(const Command& c) {
    if (holds<While>(c)) {
        return true;
    }
    bool found = false;
    for_each_child(c, [&](const Command& child) { found = found || contains_loop(child); });
    return found;
}

}  // namespace qhl
