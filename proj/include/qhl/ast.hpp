// Abstract syntax shared by both dialects: the core while-language with
// measurement guards, and the QPL-style extension with classical bits,
// allocation and discard.
#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace qhl {

struct SourcePos {
    int line = 0;
    int column = 0;
};

struct Command;
/// Commands are immutable once built, so subtrees are shared freely.
using CommandPtr = std::shared_ptr<const Command>;

struct Skip {};
struct Seq {
    CommandPtr first;
    CommandPtr second;
};
/// q := 0 (for a bit in the QPL dialect this is the same map as b := 0).
struct InitZero {
    std::string var;
};
/// vars *= gate
struct ApplyU {
    std::vector<std::string> vars;
    std::string gate;
};
/// measure M(vars) { case m: branches[m] }
struct MeasureCase {
    std::string meas;
    std::vector<std::string> vars;
    std::vector<CommandPtr> branches;
};
/// while M(vars) = 1 do body od
struct While {
    std::string meas;
    std::vector<std::string> vars;
    CommandPtr body;
};
struct NewBit {
    std::string var;
};
struct NewQbit {
    std::string var;
};
struct Discard {
    std::string var;
};
struct AssignBit {
    std::string var;
    int value = 0;
};
/// if b then on_zero else on_one fi
struct IfBit {
    std::string var;
    CommandPtr on_zero;
    CommandPtr on_one;
};
/// measure q then on_zero else on_one fi
struct MeasureIf {
    std::string var;
    CommandPtr on_zero;
    CommandPtr on_one;
};

using CommandNode = std::variant<Skip, Seq, InitZero, ApplyU, MeasureCase, While, NewBit, NewQbit,
                                 Discard, AssignBit, IfBit, MeasureIf>;

struct Command {
    CommandNode node;
    SourcePos pos;
};

template <typename T>
bool holds(const Command& c) {
    return std::holds_alternative<T>(c.node);
}

CommandPtr make_command(CommandNode node, SourcePos pos = {});

CommandPtr skip();
/// Right-leaning sequence of the given commands; skip when empty.
CommandPtr seq(std::vector<CommandPtr> commands);
CommandPtr seq(CommandPtr first, CommandPtr second);
CommandPtr init_zero(std::string var);
CommandPtr apply_gate(std::vector<std::string> vars, std::string gate);
CommandPtr measure_case(std::string meas, std::vector<std::string> vars,
                        std::vector<CommandPtr> branches);
CommandPtr while_loop(std::string meas, std::vector<std::string> vars, CommandPtr body);
CommandPtr new_bit(std::string var);
CommandPtr new_qbit(std::string var);
CommandPtr discard(std::string var);
CommandPtr assign_bit(std::string var, int value);
CommandPtr if_bit(std::string var, CommandPtr on_zero, CommandPtr on_one);
CommandPtr measure_if(std::string var, CommandPtr on_zero, CommandPtr on_one);

/// Structural equality; source positions are ignored.
bool same_structure(const Command& a, const Command& b);

/// Flattens nested Seq nodes into the statement list they denote.
std::vector<CommandPtr> flatten_seq(const CommandPtr& c);
/// Rebuilds every Seq as a right-leaning spine.
CommandPtr normalize_seq(const CommandPtr& c);

std::size_t node_count(const Command& c);
std::size_t depth(const Command& c);
bool contains_loop(const Command& c);

}  // namespace qhl
