#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "generators.hpp"
#include "qhl/exchange.hpp"
#include "qhl/parser.hpp"
#include "qhl/typecheck.hpp"

using namespace qhl;
namespace fs = std::filesystem;

namespace {

bool has_error(const TypecheckResult& r, TypeErrorKind k) {
    for (const auto& e : r.errors) {
        if (e.kind == k) {
            return true;
        }
    }
    return false;
}

TypecheckResult check(const std::string& text, Dialect d = Dialect::Qpl,
                      const Tables& t = {}) {
    const Program p = parse(text);
    return typecheck(p.ctx, p.body, d, t);
}

}  // namespace

TEST_CASE("parse the smallest program") {
    const Program p = parse("var q: qbit; q := 0");
    REQUIRE(p.ctx.size() == 1);
    CHECK(p.ctx.vars()[0] == make_qbit("q"));
    const auto* z = std::get_if<InitZero>(&p.body->node);
    REQUIRE(z != nullptr);
    CHECK(z->var == "q");
}

TEST_CASE("parse the DJ core listing") {
    const Program p = parse(R"(var q1: qbit, q2: qbit, qe: qbit;
q1 := 0; q2 := 0; qe := 0;   # registers
qe *= N;
q1, q2, qe *= H3;
q1, q2, qe *= Uf;
q1, q2 *= H2
)");
    CHECK(p.ctx.size() == 3);
    const auto spine = flatten_seq(p.body);
    CHECK(spine.size() == 7);
    std::size_t inits = 0;
    std::size_t units = 0;
    for (const auto& c : spine) {
        inits += holds<InitZero>(*c) ? 1 : 0;
        units += holds<ApplyU>(*c) ? 1 : 0;
    }
    CHECK(inits == 3);
    CHECK(units == 4);
    CHECK(std::get<ApplyU>(spine[4]->node).vars == std::vector<std::string>{"q1", "q2", "qe"});
}

TEST_CASE("parse every construct") {
    const Program p = parse(R"(var b: bit, q: qbit, n: qunit[3], m: qunit;
b := 1;
if b then skip else q *= X fi;
measure q then b := 0 else b := 1 fi;
measure std(n) { case 0: skip case 1: n := 0 case 2: n *= I };
while std(q) = 1 do q *= H od;
new qbit r; r, q *= CNOT; discard r;
new bit c; discard c
)");
    CHECK(p.ctx.find("n")->dim == 3);
    CHECK(p.ctx.find("m")->dim == kDefaultQunitDim);
    CHECK(p.ctx.find("b")->kind == VarKind::Bit);
    CHECK(check(print(p.ctx, *p.body)).ok());
    const auto spine = flatten_seq(p.body);
    CHECK(holds<AssignBit>(*spine[0]));
    CHECK(holds<IfBit>(*spine[1]));
    CHECK(holds<MeasureIf>(*spine[2]));
    CHECK(std::get<MeasureCase>(spine[3]->node).branches.size() == 3);
    CHECK(holds<While>(*spine[4]));
    CHECK(holds<NewQbit>(*spine[5]));
    CHECK(holds<NewBit>(*spine[8]));
    CHECK(parse("new qbit q; discard q").ctx.empty());
}

TEST_CASE("parse errors carry positions") {
    try {
        parse("var q: qbit;\nwhile std(r) = 1 do skip od");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.pos().line == 2);
        CHECK(e.pos().column == 11);
        CHECK(std::string(e.what()).find("'r'") != std::string::npos);
    }
    CHECK_THROWS_AS(parse("var q: qbit; q := 2"), ParseError);
    CHECK_THROWS_AS(parse("var q: qbit; q $= H"), ParseError);
    CHECK_THROWS_AS(parse("var q: qbit, q: bit; skip"), ParseError);
    CHECK_THROWS_AS(parse("var q: qbit; if q then skip fi"), ParseError);
    CHECK_THROWS_AS(parse("var q: qbit; while std(q) = 0 do skip od"), ParseError);
    CHECK_THROWS_AS(parse("var n: qunit[1]; skip"), ParseError);
    CHECK_THROWS_AS(parse(""), ParseError);
    try {
        parse("var q: qbit;\n  q @ H");
    } catch (const ParseError& e) {
        CHECK(e.pos().line == 2);
        CHECK(e.pos().column == 5);
    }
}

TEST_CASE("print") {
    CHECK(print(*skip()) == "skip");
    const Program p = parse("var q: qbit; q := 0; q *= H; skip");
    const std::string text = print(p.ctx, *p.body);
    CHECK(text.rfind("var q: qbit;", 0) == 0);
    const Program again = parse(text);
    CHECK(same_structure(*normalize_seq(again.body), *normalize_seq(p.body)));
    CHECK(again.ctx == p.ctx);
}

TEST_CASE("nested Seq prints flat and reparses to the right-leaning spine") {
    gen::Rng rng(53);
    for (int i = 0; i < 50; ++i) {
        const VarContext ctx = gen::ying_context(rng);
        const CommandPtr c = seq(seq(gen::loop_free(ctx, rng, 3), gen::loop_free(ctx, rng, 3)),
                                 gen::loop_free(ctx, rng, 3));
        const Program back = parse(print(ctx, *c));
        CHECK(same_structure(*back.body, *normalize_seq(c)));
        // The spine is right-leaning.
        const CommandPtr* cur = &back.body;
        while (const auto* s = std::get_if<Seq>(&(*cur)->node)) {
            CHECK_FALSE(holds<Seq>(*s->first));
            cur = &s->second;
        }
    }
}

TEST_CASE("typecheck errors") {
    const auto kind = check("var q: qbit; if q then skip else skip fi");
    CHECK_FALSE(kind.ok());
    CHECK(has_error(kind, TypeErrorKind::KindMismatch));

    const auto gone = check("new qbit q; discard q; q *= H");
    CHECK(has_error(gone, TypeErrorKind::UseAfterDiscard));

    const auto arity = check("var q1: qbit, q2: qbit; q1, q2 *= H");
    CHECK(has_error(arity, TypeErrorKind::ArityMismatch));

    const auto branches = check("var q: qbit; measure q then new bit b else skip fi");
    CHECK(has_error(branches, TypeErrorKind::ContextMismatch));

    CHECK(has_error(check("var q: qbit; q *= Foo"), TypeErrorKind::UnknownGate));
    CHECK(has_error(check("var q: qbit; measure Foo(q) { case 0: skip case 1: skip }"),
                    TypeErrorKind::UnknownMeasurement));
    CHECK(has_error(check("var q: qbit; measure std(q) { case 0: skip }"),
                    TypeErrorKind::ArityMismatch));
    CHECK(has_error(check("var q: qbit; new qbit q"), TypeErrorKind::DuplicateVariable));
    CHECK(has_error(check("var b: bit; b *= X"), TypeErrorKind::KindMismatch));
    CHECK_THROWS_AS(parse("var q: qbit; q := 1"), ParseError);
    CHECK(has_error(check("var q: qbit; new qbit r", Dialect::YingCore),
                    TypeErrorKind::DialectViolation));
    CHECK(has_error(check("var b: bit; skip", Dialect::YingCore), TypeErrorKind::DialectViolation));
    CHECK(has_error(check("var q: qbit; while std(q) = 1 do new bit b od"),
                    TypeErrorKind::ContextMismatch));

    const auto many = check("var q: qbit; q *= Foo; q *= Bar");
    CHECK(many.errors.size() == 2);
    CHECK(to_string(many.errors[0]).find("Foo") != std::string::npos);
}

TEST_CASE("typecheck output context") {
    const auto r = check("var q: qbit; new bit b; measure q then b := 0 else b := 1 fi; discard q");
    REQUIRE(r.ok());
    CHECK(to_string(r.program->input) == "[q:qbit]");
    CHECK(to_string(r.program->output) == "[b:bit]");
    const Program p = parse("var q: qbit; new qbit r; new bit c; discard r");
    CHECK(context_after(p.ctx, *p.body) ==
          VarContext({make_bit("c"), make_qbit("q")}));
}

TEST_CASE("measurement of a qunit needs a matching table entry") {
    Tables t;
    t.meas.add("M3", {CMatrix::outer_basis(0, 0, 3), CMatrix::outer_basis(1, 1, 3),
                      CMatrix::outer_basis(2, 2, 3)});
    CHECK(check("var n: qunit[3]; measure M3(n) { case 0: skip case 1: skip case 2: skip }",
                Dialect::YingCore, t)
              .ok());
    CHECK_FALSE(check("var q: qbit; measure M3(q) { case 0: skip case 1: skip case 2: skip }",
                      Dialect::YingCore, t)
                    .ok());
    CHECK_FALSE(check("var n: qunit[3]; while std(n) = 1 do skip od", Dialect::YingCore, t).ok());
}

TEST_CASE("sidecar gates and measurements") {
    const fs::path dir = fs::temp_directory_path() / "qhl_test_lang_sidecars";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_matrix_file(dir / "G.mat", random_unitary(2, 5));
    std::ofstream(dir / "Pm.meas") << R"({"outcomes": [{"dim": [2,2], "re": [[1,0],[0,0]]},
                                                      {"dim": [2,2], "re": [[0,0],[0,1]]}]})";
    write_matrix_file(dir / "Bad.mat", CMatrix::identity(2) * 2.0);
    std::ofstream(dir / "table.json")
        << R"({"gates": {"T2": {"dim": [2,2], "re": [[0,1],[1,0]]}}, "measurements": {}})";

    const Program p = parse("var q: qbit; q *= G; measure Pm(q) { case 0: skip case 1: skip }");
    Tables t;
    load_sidecars(*p.body, {dir}, t);
    CHECK(t.gates.contains("G"));
    CHECK(t.meas.contains("Pm"));
    CHECK(typecheck(p.ctx, p.body, Dialect::YingCore, t).ok());

    const Program bad = parse("var q: qbit; q *= Bad");
    CHECK_THROWS_AS(load_sidecars(*bad.body, {dir}, t), FormatError);

    const Program missing = parse("var q: qbit; q *= Nope");
    CHECK_NOTHROW(load_sidecars(*missing.body, {dir}, t));
    CHECK_FALSE(typecheck(missing.ctx, missing.body, Dialect::YingCore, t).ok());

    load_table_file(dir / "table.json", t);
    CHECK(t.gates.contains("T2"));
    fs::remove_all(dir);
}

TEST_CASE("contexts") {
    CHECK_THROWS_AS(VarContext({make_qbit("a"), make_bit("a")}), std::invalid_argument);
    CHECK_THROWS_AS(VarContext({make_qunit("a", 1)}), std::invalid_argument);
    const VarContext c({make_qbit("a"), make_qunit("n", 3), make_bit("b")});
    CHECK(c.total_dim() == 12);
    CHECK(c.dims() == std::vector<std::size_t>{2, 3, 2});
    CHECK(*c.position("b") == 2);
    CHECK_FALSE(c.position("z"));
    CHECK(c.prepend(make_qbit("z")).vars().front().name == "z");
    CHECK(c.without("n").total_dim() == 4);
    CHECK(VarContext().total_dim() == 1);
    CHECK(to_string(c) == "[a:qbit, n:qunit[3], b:bit]");
}

TEST_CASE("AST helpers") {
    const CommandPtr c = seq({skip(), apply_gate({"q"}, "H"), while_loop("std", {"q"}, skip())});
    CHECK(flatten_seq(c).size() == 3);
    CHECK(contains_loop(*c));
    CHECK_FALSE(contains_loop(*skip()));
    CHECK(depth(*skip()) == 1);
    CHECK(node_count(*c) >= 4);
    CHECK(same_structure(*c, *seq({skip(), apply_gate({"q"}, "H"),
                                   while_loop("std", {"q"}, skip())})));
    CHECK_FALSE(same_structure(*c, *skip()));
}
