// Concrete syntax.
//
//   program := ['var' decl (',' decl)* ';'] stmt
//   decl    := ident ':' ('bit' | 'qbit' | 'qunit' ['[' int ']'])
//   stmt    := simple (';' simple)*
//   simple  := 'skip' | ident ':=' ('0'|'1') | identlist '*=' gatename
//            | 'new' ('bit'|'qbit') ident | 'discard' ident
//            | 'if' ident 'then' stmt 'else' stmt 'fi'
//            | 'measure' ident 'then' stmt 'else' stmt 'fi'
//            | 'measure' measname '(' identlist ')' '{' ('case' int ':' stmt)+ '}'
//            | 'while' measname '(' identlist ')' '=' '1' 'do' stmt 'od'
//
// '#' starts a line comment. The 'then' branch of an if / measure-if runs on
// outcome 0, the 'else' branch on outcome 1.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "qhl/ast.hpp"
#include "qhl/context.hpp"

namespace qhl {

class ParseError : public std::runtime_error {
public:
    ParseError(SourcePos pos, const std::string& message);

    SourcePos pos() const noexcept { return pos_; }
    const std::string& message() const noexcept { return message_; }

private:
    SourcePos pos_;
    std::string message_;
};

struct Program {
    VarContext ctx;
    CommandPtr body;
};

Program parse(std::string_view text);

/// Parses a statement whose free variables come from ctx (used for proof
/// outline steps that name program fragments).
CommandPtr parse_statement(std::string_view text, const VarContext& ctx);

std::string print(const VarContext& ctx, const Command& c);
std::string print(const Command& c);

}  // namespace qhl
