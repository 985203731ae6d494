#include "qhl/parser.hpp"

#include <cctype>
#include <map>
#include <set>
#include <vector>

namespace qhl {

ParseError::ParseError(SourcePos pos, const std::string& message)
    : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " +
                         message),
      pos_(pos),
      message_(message) {}

namespace {

enum class Tok { Ident, Keyword, Int, Symbol, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourcePos pos;
};

const std::set<std::string, std::less<>> kKeywords = {
    "var", "bit",     "qbit",    "qunit", "skip",  "new",  "discard", "if",
    "then", "else",   "fi",      "measure", "case", "while", "do",    "od"};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.pos = {line_, col_};
            if (at_end()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            const char c = peek();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                                     peek() == '_')) {
                    t.text += advance();
                }
                t.kind = kKeywords.contains(t.text) ? Tok::Keyword : Tok::Ident;
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
                    t.text += advance();
                }
                t.kind = Tok::Int;
            } else if ((c == ':' || c == '*') && peek(1) == '=') {
                t.text = std::string{advance(), advance()};
                t.kind = Tok::Symbol;
            } else if (std::string_view(":;,(){}[]=").find(c) != std::string_view::npos) {
                t.text = std::string{advance()};
                t.kind = Tok::Symbol;
            } else {
                throw ParseError(t.pos, std::string("unexpected character '") + c + "'");
            }
            out.push_back(std::move(t));
        }
    }

private:
    bool at_end() const { return i_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const {
        return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0';
    }
    char advance() {
        const char c = text_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip_space() {
        while (!at_end()) {
            const char c = peek();
            if (c == '#') {
                while (!at_end() && peek() != '\n') {
                    advance();
                }
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                return;
            }
        }
    }

    std::string_view text_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Program program() {
        std::vector<VarDecl> decls;
        if (is_keyword("var")) {
            next();
            decls.push_back(decl(decls));
            while (is_symbol(",")) {
                next();
                decls.push_back(decl(decls));
            }
            expect_symbol(";");
        }
        VarContext ctx(decls);
        seed(ctx);
        CommandPtr body = statement();
        expect_end();
        return {std::move(ctx), std::move(body)};
    }

    CommandPtr lone_statement(const VarContext& ctx) {
        seed(ctx);
        CommandPtr body = statement();
        expect_end();
        return body;
    }

private:
    const Token& cur() const { return toks_[i_]; }
    const Token& lookahead(std::size_t n) const {
        return toks_[std::min(i_ + n, toks_.size() - 1)];
    }
    Token next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

    bool is_keyword(std::string_view kw) const {
        return cur().kind == Tok::Keyword && cur().text == kw;
    }
    bool is_symbol(std::string_view s) const {
        return cur().kind == Tok::Symbol && cur().text == s;
    }

    [[noreturn]] void fail(const std::string& what) const {
        const Token& t = cur();
        const std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(t.pos, "expected " + what + ", found " + found);
    }

    void expect_keyword(std::string_view kw) {
        if (!is_keyword(kw)) {
            fail("'" + std::string(kw) + "'");
        }
        next();
    }
    void expect_symbol(std::string_view s) {
        if (!is_symbol(s)) {
            fail("'" + std::string(s) + "'");
        }
        next();
    }
    void expect_end() {
        if (cur().kind != Tok::End) {
            fail("end of input");
        }
    }
    Token expect_ident(const char* what) {
        if (cur().kind != Tok::Ident) {
            fail(what);
        }
        return next();
    }
    long expect_int() {
        if (cur().kind != Tok::Int) {
            fail("an integer");
        }
        const Token t = next();
        if (t.text.size() > 9) {
            throw ParseError(t.pos, "integer literal too large");
        }
        return std::stol(t.text);
    }

    void seed(const VarContext& ctx) {
        for (const VarDecl& v : ctx.vars()) {
            known_[v.name] = v.kind;
        }
    }

    VarDecl decl(const std::vector<VarDecl>& so_far) {
        const Token name = expect_ident("a variable name");
        for (const VarDecl& v : so_far) {
            if (v.name == name.text) {
                throw ParseError(name.pos, "duplicate declaration of '" + name.text + "'");
            }
        }
        expect_symbol(":");
        if (is_keyword("bit")) {
            next();
            return make_bit(name.text);
        }
        if (is_keyword("qbit")) {
            next();
            return make_qbit(name.text);
        }
        if (is_keyword("qunit")) {
            next();
            std::size_t dim = kDefaultQunitDim;
            if (is_symbol("[")) {
                next();
                const SourcePos at = cur().pos;
                const long d = expect_int();
                if (d < 2) {
                    throw ParseError(at, "qunit dimension must be at least 2");
                }
                dim = static_cast<std::size_t>(d);
                expect_symbol("]");
            }
            return make_qunit(name.text, dim);
        }
        fail("'bit', 'qbit' or 'qunit'");
    }

    Token use(const char* what) {
        const Token t = expect_ident(what);
        if (!known_.contains(t.text)) {
            throw ParseError(t.pos, "undeclared variable '" + t.text + "'");
        }
        return t;
    }

    std::vector<std::string> ident_list() {
        std::vector<std::string> out{use("a variable name").text};
        while (is_symbol(",")) {
            next();
            out.push_back(use("a variable name").text);
        }
        return out;
    }

    bool at_block_end() const {
        return cur().kind == Tok::End || is_keyword("fi") || is_keyword("od") ||
               is_keyword("else") || is_keyword("case") || is_symbol("}");
    }

    CommandPtr statement() {
        const SourcePos start = cur().pos;
        std::vector<CommandPtr> parts{simple()};
        while (is_symbol(";")) {
            next();
            if (at_block_end()) {
                break;  // tolerate a trailing ';'
            }
            parts.push_back(simple());
        }
        if (parts.size() == 1) {
            return parts.front();
        }
        CommandPtr out = seq(std::move(parts));
        return make_command(out->node, start);
    }

    CommandPtr simple() {
        const SourcePos pos = cur().pos;
        if (is_keyword("skip")) {
            next();
            return make_command(Skip{}, pos);
        }
        if (is_keyword("new")) {
            next();
            const bool is_bit = is_keyword("bit");
            if (!is_bit && !is_keyword("qbit")) {
                fail("'bit' or 'qbit'");
            }
            next();
            const Token name = expect_ident("a variable name");
            known_[name.text] = is_bit ? VarKind::Bit : VarKind::Qbit;
            if (is_bit) {
                return make_command(NewBit{name.text}, pos);
            }
            return make_command(NewQbit{name.text}, pos);
        }
        if (is_keyword("discard")) {
            next();
            return make_command(Discard{use("a variable name").text}, pos);
        }
        if (is_keyword("if")) {
            next();
            const std::string guard = use("a bit variable").text;
            auto [on_zero, on_one] = branches();
            return make_command(IfBit{guard, std::move(on_zero), std::move(on_one)}, pos);
        }
        if (is_keyword("measure")) {
            next();
            if (cur().kind == Tok::Ident && lookahead(1).kind == Tok::Keyword &&
                lookahead(1).text == "then") {
                const std::string guard = use("a qubit variable").text;
                auto [on_zero, on_one] = branches();
                return make_command(MeasureIf{guard, std::move(on_zero), std::move(on_one)}, pos);
            }
            return measure_case(pos);
        }
        if (is_keyword("while")) {
            next();
            const std::string meas = expect_ident("a measurement name").text;
            expect_symbol("(");
            auto vars = ident_list();
            expect_symbol(")");
            expect_symbol("=");
            const SourcePos at = cur().pos;
            if (expect_int() != 1) {
                throw ParseError(at, "loop guard must compare against outcome 1");
            }
            expect_keyword("do");
            CommandPtr body = statement();
            expect_keyword("od");
            return make_command(While{meas, std::move(vars), std::move(body)}, pos);
        }
        if (cur().kind == Tok::Ident) {
            if (lookahead(1).kind == Tok::Symbol && lookahead(1).text == ":=") {
                const Token name = use("a variable name");
                next();
                const SourcePos at = cur().pos;
                const long value = expect_int();
                if (value != 0 && value != 1) {
                    throw ParseError(at, "only 0 or 1 can be assigned");
                }
                if (known_.at(name.text) == VarKind::Bit) {
                    return make_command(AssignBit{name.text, static_cast<int>(value)}, pos);
                }
                if (value != 0) {
                    throw ParseError(at, "quantum variable '" + name.text +
                                             "' can only be initialized to 0");
                }
                return make_command(InitZero{name.text}, pos);
            }
            auto vars = ident_list();
            expect_symbol("*=");
            const std::string gate = expect_ident("a gate name").text;
            return make_command(ApplyU{std::move(vars), gate}, pos);
        }
        fail("a statement");
    }

    std::pair<CommandPtr, CommandPtr> branches() {
        expect_keyword("then");
        CommandPtr on_zero = statement();
        expect_keyword("else");
        CommandPtr on_one = statement();
        expect_keyword("fi");
        return {std::move(on_zero), std::move(on_one)};
    }

    CommandPtr measure_case(SourcePos pos) {
        const std::string meas = expect_ident("a measurement name or qubit").text;
        expect_symbol("(");
        auto vars = ident_list();
        expect_symbol(")");
        expect_symbol("{");
        std::map<long, CommandPtr> cases;
        do {
            const SourcePos at = cur().pos;
            expect_keyword("case");
            const long label = expect_int();
            if (cases.contains(label)) {
                throw ParseError(at, "duplicate case " + std::to_string(label));
            }
            expect_symbol(":");
            cases[label] = statement();
        } while (is_keyword("case"));
        const SourcePos close = cur().pos;
        expect_symbol("}");
        std::vector<CommandPtr> branches;
        for (const auto& [label, body] : cases) {
            if (label != static_cast<long>(branches.size())) {
                throw ParseError(close, "case labels must be 0.." +
                                            std::to_string(cases.size() - 1));
            }
            branches.push_back(body);
        }
        return make_command(MeasureCase{meas, std::move(vars), std::move(branches)}, pos);
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    std::map<std::string, VarKind> known_;
};

}  // namespace

Program parse(std::string_view text) {
    Parser p(Lexer(text).run());
    return p.program();
}

CommandPtr parse_statement(std::string_view text, const VarContext& ctx) {
    Parser p(Lexer(text).run());
    return p.lone_statement(ctx);
}

}  // namespace qhl
