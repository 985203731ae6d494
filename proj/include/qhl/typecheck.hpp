// Typing for both dialects. Ying-core has only quantum variables and a fixed
// context; the QPL dialect adds bits, allocation, discard and classical
// branching, so the context may grow and shrink along the program.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qhl/ast.hpp"
#include "qhl/context.hpp"
#include "qhl/tables.hpp"

namespace qhl {

enum class Dialect { YingCore, Qpl };

std::string dialect_name(Dialect d);

enum class TypeErrorKind {
    UnknownVariable,
    UseAfterDiscard,
    KindMismatch,
    ArityMismatch,
    ContextMismatch,
    UnknownGate,
    UnknownMeasurement,
    DuplicateVariable,
    DialectViolation,
};

struct TypeError {
    TypeErrorKind kind;
    SourcePos pos;
    std::string message;
};

std::string to_string(const TypeError& e);

struct TypedProgram {
    VarContext input;
    VarContext output;
    CommandPtr body;
    Dialect dialect = Dialect::Qpl;
};

struct TypecheckResult {
    std::optional<TypedProgram> program;
    std::vector<TypeError> errors;

    bool ok() const noexcept { return program.has_value(); }
};

TypecheckResult typecheck(const VarContext& ctx, const CommandPtr& c, Dialect dialect,
                          const Tables& tables = {});

/// Context after running c from ctx. Assumes c is well typed.
VarContext context_after(const VarContext& ctx, const Command& c);

}  // namespace qhl
