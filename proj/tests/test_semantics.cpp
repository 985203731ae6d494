#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "oracle.hpp"
#include "qhl/parser.hpp"
#include "qhl/semantics.hpp"

using namespace qhl;

namespace {

const Tables kTables;

VarContext one_qubit() { return VarContext({make_qbit("q")}); }

CMatrix plus_state() { return CMatrix{{0.5, 0.5}, {0.5, 0.5}}; }

DensityMatrix dm(CMatrix m) { return DensityMatrix(std::move(m)); }

CommandPtr stmt(const std::string& text, const VarContext& ctx) {
    return parse_statement(text, ctx);
}

}  // namespace

TEST_CASE("denote of primitives") {
    const VarContext ctx = one_qubit();
    const DensityMatrix rho = random_density(2, 11);

    const Denotation s = denote(ctx, *skip(), kTables);
    CHECK(max_abs_diff(apply_kraus(s.map, rho.matrix()), rho.matrix()) == 0.0);

    const Denotation z = denote(ctx, *init_zero("q"), kTables);
    CHECK(z.map.size() == 2);
    CHECK(max_abs_diff(apply_kraus(z.map, CMatrix::outer_basis(1, 1, 2)),
                       CMatrix::outer_basis(0, 0, 2)) < 1e-15);

    const Denotation alloc = denote(ctx, *new_qbit("r"), kTables);
    CHECK(alloc.map.out_dim() == 4);
    CHECK(alloc.map.in_dim() == 2);
    CHECK(to_string(alloc.output) == "[r:qbit, q:qbit]");
    const CMatrix big = apply_kraus(alloc.map, rho.matrix());
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            const Complex want = i < 2 && j < 2 ? rho.matrix()(i, j) : Complex{};
            CHECK(big(i, j) == want);
        }
    }
}

TEST_CASE("denote of a qunit reset has one operator per level") {
    const VarContext ctx({make_qunit("n", 5)});
    const Denotation z = denote(ctx, *init_zero("n"), kTables);
    CHECK(z.map.size() == 5);
    CHECK(max_abs_diff(z.map.completeness(), CMatrix::identity(5)) < 1e-15);
}

TEST_CASE("eval examples") {
    const VarContext bctx({make_bit("b")});
    const double p = 0.3;
    const EvalResult a = eval(bctx, *assign_bit("b", 1),
                              dm(CMatrix::diagonal(std::vector<Complex>{p, 1 - p})), kTables);
    CHECK(max_abs_diff(a.state.matrix(), CMatrix::outer_basis(1, 1, 2)) < 1e-15);

    const VarContext ctx = one_qubit();
    const EvalResult h =
        eval(ctx, *apply_gate({"q"}, "H"), dm(CMatrix::outer_basis(0, 0, 2)), kTables);
    CHECK(max_abs_diff(h.state.matrix(), plus_state()) < 1e-15);

    const EvalResult m = eval(ctx, *stmt("measure std(q) { case 0: skip case 1: skip }", ctx),
                              dm(plus_state()), kTables);
    CHECK(max_abs_diff(m.state.matrix(), CMatrix{{0.5, 0.0}, {0.0, 0.5}}) < 1e-15);
}

TEST_CASE("eval agrees with denote and with the reference interpreter") {
    gen::Rng rng(101);
    for (int i = 0; i < 60; ++i) {
        const VarContext ctx = gen::ying_context(rng);
        const CommandPtr c = gen::loop_free(ctx, rng);
        const DensityMatrix rho = gen::state(ctx.total_dim(), rng);
        const EvalResult e = eval(ctx, *c, rho, gen::tables());
        const Denotation d = denote(ctx, *c, gen::tables());
        CHECK(max_abs_diff(e.state.matrix(), apply_kraus(d.map, rho.matrix())) < 1e-9);
        const auto o = oracle::run(ctx, *c, oracle::to_eigen(rho.matrix()), gen::tables());
        CHECK(oracle::distance(e.state.matrix(), o) < 1e-12);
        CHECK(d.map.size() <= ctx.total_dim() * ctx.total_dim());
    }
}

TEST_CASE("QPL constructs against the reference interpreter") {
    gen::Rng rng(7);
    int checked = 0;
    for (int i = 0; i < 200 && checked < 60; ++i) {
        const gen::Generated g = gen::well_typed(rng, 4);
        if (g.dialect != Dialect::Qpl || g.ctx.total_dim() > 16) {
            continue;
        }
        const DensityMatrix rho = gen::state(g.ctx.total_dim(), rng);
        const EvalResult e = eval(g.ctx, *g.body, rho, gen::tables());
        const auto o = oracle::run(g.ctx, *g.body, oracle::to_eigen(rho.matrix()), gen::tables());
        CHECK(oracle::distance(e.state.matrix(), o) < 1e-7);
        if (!contains_loop(*g.body)) {
            const Denotation d = denote(g.ctx, *g.body, gen::tables());
            CHECK(max_abs_diff(e.state.matrix(), apply_kraus(d.map, rho.matrix())) < 1e-9);
        }
        ++checked;
    }
    CHECK(checked >= 30);
}

TEST_CASE("allocation then discard is the identity") {
    gen::Rng rng(5);
    const VarContext ctx({make_qbit("a"), make_bit("b")});
    const CommandPtr c = seq(new_qbit("q"), discard("q"));
    for (int i = 0; i < 20; ++i) {
        const DensityMatrix rho = gen::state(4, rng);
        CHECK(max_abs_diff(eval(ctx, *c, rho, kTables).state.matrix(), rho.matrix()) < 1e-12);
    }
}

TEST_CASE("discard of a middle factor is a partial trace") {
    const VarContext ctx({make_qbit("a"), make_qunit("n", 3), make_qbit("c")});
    const DensityMatrix rho = random_density(12, 4);
    const EvalResult r = eval(ctx, *discard("n"), rho, kTables);
    CHECK(to_string(r.output) == "[a:qbit, c:qbit]");
    // Reference: sum over the middle digit.
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            Complex want{};
            for (std::size_t m = 0; m < 3; ++m) {
                want += rho.matrix()((i / 2) * 6 + m * 2 + i % 2, (j / 2) * 6 + m * 2 + j % 2);
            }
            CHECK(std::abs(r.state.matrix()(i, j) - want) < 1e-15);
        }
    }
}

TEST_CASE("bit assignment is idempotent") {
    gen::Rng rng(9);
    const VarContext ctx({make_bit("b"), make_qbit("q")});
    for (int v = 0; v < 2; ++v) {
        const DensityMatrix rho = gen::state(4, rng);
        const auto once = eval(ctx, *assign_bit("b", v), rho, kTables);
        const auto twice = eval(ctx, *seq(assign_bit("b", v), assign_bit("b", v)), rho, kTables);
        CHECK(max_abs_diff(once.state.matrix(), twice.state.matrix()) < 1e-12);
    }
}

TEST_CASE("loops") {
    const VarContext ctx = one_qubit();
    const CommandPtr spin = stmt("while std(q) = 1 do skip od", ctx);

    SUBCASE("pure divergence") {
        const TerminationReport t =
            termination_probability(ctx, *spin, dm(CMatrix::outer_basis(1, 1, 2)), kTables);
        CHECK(t.probability == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(t.converged);
    }
    SUBCASE("half diverges") {
        const TerminationReport t = termination_probability(ctx, *spin, dm(plus_state()), kTables);
        CHECK(std::abs(t.probability - 0.5) < 1e-12);
        const Denotation d = denote(ctx, *spin, kTables);
        CHECK(d.converged);
        CHECK(max_abs_diff(apply_kraus(d.map, plus_state()), CMatrix::outer_basis(0, 0, 2) * 0.5) <
              1e-12);
    }
    SUBCASE("reset loop terminates") {
        const CommandPtr reset = stmt("while std(q) = 1 do q := 0 od", ctx);
        const auto r = eval(ctx, *reset, dm(CMatrix::outer_basis(1, 1, 2)), kTables);
        CHECK(max_abs_diff(r.state.matrix(), CMatrix::outer_basis(0, 0, 2)) < 1e-15);
    }
    SUBCASE("geometric loop converges within eps") {
        const CommandPtr coin = stmt("while std(q) = 1 do q *= H od", ctx);
        const DensityMatrix one = dm(CMatrix::outer_basis(1, 1, 2));
        const auto e = eval(ctx, *coin, one, kTables);
        CHECK(e.converged);
        CHECK(std::abs(e.state.trace() - 1.0) < 1e-8);
        const auto d = denote(ctx, *coin, kTables);
        CHECK(d.converged);
        CHECK(max_abs_diff(apply_kraus(d.map, one.matrix()), e.state.matrix()) < 1e-8);
        CHECK(d.truncation_error <= 1e-9);
    }
    SUBCASE("iteration cap") {
        const CommandPtr coin = stmt("while std(q) = 1 do q *= H od", ctx);
        EvalOptions opts;
        opts.loop_max_iters = 3;
        const DensityMatrix one = dm(CMatrix::outer_basis(1, 1, 2));
        const auto e = eval(ctx, *coin, one, kTables, opts);
        CHECK_FALSE(e.converged);
        CHECK(e.truncation_error > 0.0);
        CHECK(std::abs(e.state.trace() + e.truncation_error - 1.0) < 1e-12);
        const auto d = denote(ctx, *coin, kTables, opts);
        CHECK_FALSE(d.converged);
        opts.mode = LoopMode::ExactKraus;
        CHECK_THROWS_AS(eval(ctx, *coin, one, kTables, opts), TruncationNotConverged);
        CHECK_THROWS_AS(denote(ctx, *coin, kTables, opts), TruncationNotConverged);
    }
}

TEST_CASE("eval options and inputs are validated") {
    const VarContext ctx = one_qubit();
    EvalOptions bad;
    bad.loop_mass_eps = 0.0;
    CHECK_THROWS_AS(eval(ctx, *skip(), dm(plus_state()), kTables, bad), std::invalid_argument);
    CHECK_THROWS_AS(eval(ctx, *skip(), DensityMatrix(CMatrix::identity(4) * 0.25), kTables),
                    DimensionError);
    CHECK_THROWS_AS(termination_probability(ctx, *skip(), DensityMatrix(CMatrix(2, 2)), kTables),
                    std::invalid_argument);
    CHECK(termination_probability(ctx, *skip(), dm(plus_state()), kTables).probability ==
          doctest::Approx(1.0));
}

TEST_CASE("step follows the transition rules") {
    const VarContext ctx = one_qubit();
    const DensityMatrix rho = random_density(2, 21);

    const auto u = step({apply_gate({"q"}, "H"), rho, ctx}, kTables);
    REQUIRE(u.size() == 1);
    CHECK(is_terminal(u[0]));
    const CMatrix h = gates::hadamard();
    CHECK(max_abs_diff(u[0].state.matrix(), h * rho.matrix() * h) < 1e-15);

    const auto m = step({stmt("measure std(q) { case 0: skip case 1: q *= X }", ctx),
                         dm(plus_state()), ctx},
                        kTables);
    REQUIRE(m.size() == 2);
    CHECK(std::abs(m[0].state.trace() - 0.5) < 1e-15);
    CHECK(std::abs(m[1].state.trace() - 0.5) < 1e-15);
    CHECK(is_terminal(m[0]));
    CHECK(holds<ApplyU>(*m[1].residual));

    const CommandPtr c = apply_gate({"q"}, "X");
    const auto s2 = step({seq(skip(), c), rho, ctx}, kTables);
    REQUIRE(s2.size() == 1);
    CHECK(s2[0].residual == c);
    CHECK(s2[0].state.matrix() == rho.matrix());

    const auto s1 = step({seq(init_zero("q"), c), rho, ctx}, kTables);
    REQUIRE(s1.size() == 1);
    const auto* rest = std::get_if<Seq>(&s1[0].residual->node);
    REQUIRE(rest != nullptr);
    CHECK(holds<Skip>(*rest->first));

    const CommandPtr loop = stmt("while std(q) = 1 do q *= X od", ctx);
    const auto l = step({loop, rho, ctx}, kTables);
    REQUIRE(l.size() == 2);
    CHECK(is_terminal(l[0]));
    CHECK(std::abs(l[0].state.matrix()(0, 0) - rho.matrix()(0, 0)) < 1e-15);
    const auto* again = std::get_if<Seq>(&l[1].residual->node);
    REQUIRE(again != nullptr);
    CHECK(again->second == loop);

    CHECK(step({skip(), rho, ctx}, kTables).empty());
}

TEST_CASE("step on QPL constructs changes the context") {
    const VarContext ctx = one_qubit();
    const auto n = step({new_bit("b"), dm(plus_state()), ctx}, kTables);
    REQUIRE(n.size() == 1);
    CHECK(n[0].ctx.size() == 2);
    CHECK(n[0].state.dim() == 4);
    const auto d = step({discard("b"), n[0].state, n[0].ctx}, kTables);
    REQUIRE(d.size() == 1);
    CHECK(max_abs_diff(d[0].state.matrix(), plus_state()) < 1e-15);
}

TEST_CASE("run_operational") {
    const VarContext ctx = one_qubit();
    SUBCASE("loop-free sums to eval") {
        gen::Rng rng(3);
        for (int i = 0; i < 40; ++i) {
            const VarContext c2 = gen::ying_context(rng);
            const CommandPtr c = gen::loop_free(c2, rng);
            const DensityMatrix rho = gen::state(c2.total_dim(), rng);
            const auto r = run_operational(c2, c, rho, 64, gen::tables());
            CHECK(r.unexplored_mass == 0.0);
            const auto e = eval(c2, *c, rho, gen::tables());
            CHECK(max_abs_diff(r.terminal_sum(), e.state.matrix()) < 1e-9 + r.pruned_mass);
        }
    }
    SUBCASE("reset loop terminates after three transitions") {
        const CommandPtr reset = stmt("while std(q) = 1 do q := 0 od", ctx);
        const auto r2 = run_operational(ctx, reset, dm(CMatrix::outer_basis(1, 1, 2)), 2, kTables);
        CHECK(r2.unexplored_mass > 0.5);
        const auto r3 = run_operational(ctx, reset, dm(CMatrix::outer_basis(1, 1, 2)), 3, kTables);
        CHECK(r3.unexplored_mass == 0.0);
        CHECK(std::abs(r3.terminal_sum()(0, 0) - Complex(1.0)) < 1e-15);
    }
    SUBCASE("divergent branches become unexplored mass that shrinks with depth") {
        const CommandPtr coin = stmt("while std(q) = 1 do q *= H od", ctx);
        const DensityMatrix one = dm(CMatrix::outer_basis(1, 1, 2));
        double last = 1.0;
        for (std::size_t depth : {4u, 8u, 16u, 32u}) {
            const auto r = run_operational(ctx, coin, one, depth, kTables);
            CHECK(r.unexplored_mass < last);
            CHECK(std::abs(trace(r.terminal_sum()).real() + r.unexplored_mass + r.pruned_mass -
                           1.0) < 1e-12);
            last = r.unexplored_mass;
        }
        CHECK(last < 1e-4);
    }
    SUBCASE("multiset keeps one terminal per path") {
        const CommandPtr m = stmt("measure std(q) { case 0: skip case 1: skip }", ctx);
        const auto r = run_operational(ctx, m, dm(plus_state()), 8, kTables);
        CHECK(r.terminals.size() == 2);
    }
}

TEST_CASE("Kraus list compression keeps the map") {
    gen::Rng rng(13);
    for (int i = 0; i < 10; ++i) {
        std::vector<CMatrix> ops;
        for (int k = 0; k < 9; ++k) {
            CMatrix e = random_unitary(2, rng.seed());
            e *= Complex(1.0 / 3.0);
            ops.push_back(e);
        }
        const auto small = kraus::compress(ops);
        CHECK(small.size() <= 4);
        CHECK(max_abs_diff(kraus::choi(small), kraus::choi(ops)) < 1e-12);
    }
    CHECK(kraus::compose({CMatrix(2, 2)}, {CMatrix::identity(2)}).size() == 1);
}
