// Invariants on random corpora.
#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "oracle.hpp"
#include "qhl/hoare.hpp"
#include "qhl/parser.hpp"
#include "qhl/semantics.hpp"

using namespace qhl;

namespace {

CMatrix random_square(std::size_t n, gen::Rng& rng) {
    CMatrix m(n, n);
    for (auto& z : m.data()) {
        z = Complex(rng.uniform() * 2 - 1, rng.uniform() * 2 - 1);
    }
    return m;
}

double tr_prod(const CMatrix& a, const CMatrix& b) { return trace_of_product(a, b).real(); }

// Small enough for the dense engines to stay fast.
gen::Generated small_program(gen::Rng& rng, std::size_t max_depth = 4) {
    for (;;) {
        gen::Generated g = gen::well_typed(rng, max_depth);
        if (g.ctx.total_dim() <= 16) {
            return g;
        }
    }
}

}  // namespace

TEST_CASE("kron associativity and mixed product") {
    gen::Rng rng(61);
    for (int i = 0; i < 100; ++i) {
        const CMatrix a = random_square(2 + rng.below(2), rng);
        const CMatrix b = random_square(2 + rng.below(2), rng);
        const CMatrix c = random_square(2 + rng.below(2), rng);
        CHECK(max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))) < 1e-12);
        const CMatrix a2 = random_square(a.rows(), rng);
        const CMatrix b2 = random_square(b.rows(), rng);
        CHECK(max_abs_diff(kron(a, b) * kron(a2, b2), kron(a * a2, b * b2)) < 1e-12);
    }
}

TEST_CASE("Kraus maps never increase trace") {
    gen::Rng rng(67);
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 1 + rng.below(4);
        const CMatrix u = random_unitary(2 * n, rng.seed());
        // Split an isometry into two blocks: an admissible pair.
        CMatrix e0(n, n);
        CMatrix e1(n, n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                e0(r, c) = u(r, c);
                e1(r, c) = u(n + r, c);
            }
        }
        const DensityMatrix rho = gen::state(n, rng);
        const KrausMap full({e0, e1});
        CHECK(full.is_admissible());
        CHECK(std::abs(trace(apply_kraus(full, rho.matrix())).real() - 1.0) < 1e-10);
        const KrausMap part({e0});
        CHECK(trace(apply_kraus(part, rho.matrix())).real() <= 1.0 + 1e-10);
    }
}

TEST_CASE("Loewner order laws") {
    gen::Rng rng(71);
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 1 + rng.below(6);
        const CMatrix a = gen::psd(n, rng);
        CHECK(loewner_leq(a, a));

        // Perturbations well inside tol are equal in both directions.
        CMatrix tiny(n, n);
        for (std::size_t k = 0; k < n; ++k) {
            tiny(k, k) = 1e-12 * rng.uniform();
        }
        const CMatrix b = a + tiny;
        if (loewner_leq(a, b) && loewner_leq(b, a)) {
            CHECK(max_abs_diff(a, b) <= 2e-9 * std::max(1.0, max_abs(a)));
        }

        const CMatrix big = a + gen::psd(n, rng);
        REQUIRE(loewner_leq(a, big));
        const CMatrix e = random_square(n, rng);
        CHECK(loewner_leq(conjugate_by(a, e), conjugate_by(big, e)));
        CHECK(oracle::min_eigenvalue(conjugate_by(big, e) - conjugate_by(a, e)) >= -1e-9);
    }
}

TEST_CASE("parse and print round-trip") {
    gen::Rng rng(73);
    for (int i = 0; i < 300; ++i) {
        const gen::Generated g = gen::well_typed(rng, 6);
        const std::string text = print(g.ctx, *g.body);
        const Program back = parse(text);
        CHECK(back.ctx == g.ctx);
        CHECK_MESSAGE(same_structure(*back.body, *normalize_seq(g.body)), text);
        CHECK(print(back.ctx, *back.body) == text);
    }
}

TEST_CASE("typecheck agrees with the reference simulator") {
    gen::Rng rng(79);
    for (int i = 0; i < 150; ++i) {
        const gen::Generated g = small_program(rng);
        const auto r = typecheck(g.ctx, g.body, g.dialect, gen::tables());
        REQUIRE(r.ok());
        const DensityMatrix rho = gen::state(g.ctx.total_dim(), rng);
        oracle::EMatrix out;
        CHECK_NOTHROW(out = oracle::run(g.ctx, *g.body, oracle::to_eigen(rho.matrix()),
                                        gen::tables()));
        CHECK(static_cast<std::size_t>(out.rows()) == r.program->output.total_dim());

        // Appending a use of a discarded variable breaks both.
        if (g.dialect == Dialect::Qpl && !r.program->output.empty()) {
            const std::string v = r.program->output.vars().front().name;
            const CommandPtr bad = seq({g.body, discard(v), init_zero(v)});
            CHECK_FALSE(typecheck(g.ctx, bad, g.dialect, gen::tables()).ok());
            CHECK_THROWS(oracle::run(g.ctx, *bad, oracle::to_eigen(rho.matrix()), gen::tables()));
        }
    }
}

TEST_CASE("eval is trace-nonincreasing and PSD-preserving") {
    gen::Rng rng(83);
    for (int i = 0; i < 500; ++i) {
        const gen::Generated g = small_program(rng, 3);
        const DensityMatrix rho = gen::state(g.ctx.total_dim(), rng);
        const EvalResult r = eval(g.ctx, *g.body, rho, gen::tables());
        CHECK(r.state.trace() <= rho.trace() + 1e-10);
        CHECK(oracle::min_eigenvalue(r.state.matrix()) >= -1e-10);
    }
}

TEST_CASE("eval is linear") {
    gen::Rng rng(89);
    for (int i = 0; i < 100; ++i) {
        const gen::Generated g = small_program(rng, 3);
        const std::size_t n = g.ctx.total_dim();
        const DensityMatrix r1 = gen::state(n, rng);
        const DensityMatrix r2 = gen::state(n, rng);
        const double a = rng.uniform();
        const double b = (1.0 - a) * rng.uniform();
        const DensityMatrix mix(r1.matrix() * a + r2.matrix() * b);
        const auto e1 = eval(g.ctx, *g.body, r1, gen::tables()).state.matrix();
        const auto e2 = eval(g.ctx, *g.body, r2, gen::tables()).state.matrix();
        const auto em = eval(g.ctx, *g.body, mix, gen::tables()).state.matrix();
        CHECK(max_abs_diff(em, e1 * a + e2 * b) < 1e-9);
    }
}

TEST_CASE("allocation, discard and bit assignment laws") {
    gen::Rng rng(97);
    for (int i = 0; i < 50; ++i) {
        const gen::Generated g = small_program(rng, 2);
        const std::size_t n = g.ctx.total_dim();
        const DensityMatrix rho = gen::state(n, rng);
        const auto id = eval(g.ctx, *seq(new_qbit("fresh"), discard("fresh")), rho, gen::tables());
        CHECK(max_abs_diff(id.state.matrix(), rho.matrix()) < 1e-12);

        const VarContext with_bit = g.ctx.prepend(make_bit("flag"));
        const DensityMatrix rb = gen::state(2 * n, rng);
        for (int v = 0; v < 2; ++v) {
            const auto once = eval(with_bit, *assign_bit("flag", v), rb, gen::tables());
            const auto twice =
                eval(with_bit, *seq(assign_bit("flag", v), assign_bit("flag", v)), rb, gen::tables());
            CHECK(max_abs_diff(once.state.matrix(), twice.state.matrix()) < 1e-12);
        }
    }
}

TEST_CASE("operational and denotational agreement") {
    gen::Rng rng(101);
    for (int i = 0; i < 100; ++i) {
        const VarContext ctx = gen::ying_context(rng);
        const CommandPtr c = gen::loop_free(ctx, rng);
        const DensityMatrix rho = gen::state(ctx.total_dim(), rng);
        const auto op = run_operational(ctx, c, rho, 1000, gen::tables());
        CHECK(op.unexplored_mass == 0.0);
        const auto ev = eval(ctx, *c, rho, gen::tables());
        CHECK(max_abs_diff(op.terminal_sum(), ev.state.matrix()) < 1e-9);
    }
}

TEST_CASE("wp monotone in the postcondition") {
    gen::Rng rng(103);
    for (int i = 0; i < 100; ++i) {
        const gen::Generated g = small_program(rng, 3);
        const std::size_t m = context_after(g.ctx, *g.body).total_dim();
        const CMatrix q1 = gen::predicate(m, rng).matrix();
        // q2 = q1 + t (I - q1) stays a predicate above q1.
        const CMatrix q2 = q1 + (CMatrix::identity(m) - q1) * rng.uniform();
        const auto w1 = wp(g.ctx, *g.body, QuantumPredicate(q1), gen::tables());
        const auto w2 = wp(g.ctx, *g.body, QuantumPredicate(q2), gen::tables());
        CHECK(loewner_leq(w1.pred.matrix(), w2.pred.matrix(), 1e-8));
    }
}

TEST_CASE("wp of I and admissibility") {
    gen::Rng rng(107);
    int inadmissible = 0;
    for (int i = 0; i < 150; ++i) {
        const gen::Generated g = small_program(rng, 3);
        const std::size_t m = context_after(g.ctx, *g.body).total_dim();
        const auto w = wp(g.ctx, *g.body, QuantumPredicate(CMatrix::identity(m)), gen::tables());
        const std::size_t n = g.ctx.total_dim();
        CHECK(loewner_leq(w.pred.matrix(), CMatrix::identity(n)));
        const bool full = max_abs_diff(w.pred.matrix(), CMatrix::identity(n)) < 1e-6;
        const Denotation d = denote(g.ctx, *g.body, gen::tables());
        const bool admissible = max_abs_diff(d.map.completeness(), CMatrix::identity(n)) < 1e-6;
        CHECK(full == admissible);
        inadmissible += admissible ? 0 : 1;
    }
    // The spinning loops in the corpus make some programs lose mass.
    CHECK(inadmissible > 0);
}

TEST_CASE("AsgnB soundness identity") {
    gen::Rng rng(109);
    for (int i = 0; i < 100; ++i) {
        const VarContext ctx = gen::ying_context(rng);
        const std::string q = ctx.vars()[rng.below(ctx.size())].name;
        const QuantumPredicate p = gen::predicate(ctx.total_dim(), rng);
        const DensityMatrix rho = gen::state(ctx.total_dim(), rng);
        const CommandPtr c = init_zero(q);
        const double lhs = tr_prod(wp(ctx, *c, p).pred.matrix(), rho.matrix());
        const double rhs = tr_prod(p.matrix(), eval(ctx, *c, rho, gen::tables()).state.matrix());
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("wp and wlp duality on programs with loops") {
    gen::Rng rng(113);
    for (int i = 0; i < 80; ++i) {
        const gen::Generated g = small_program(rng, 3);
        const std::size_t m = context_after(g.ctx, *g.body).total_dim();
        const QuantumPredicate q = gen::predicate(m, rng);
        const auto w = wp(g.ctx, *g.body, q, gen::tables());
        const auto wl = wlp(g.ctx, *g.body, q, gen::tables());
        REQUIRE(w.converged);
        for (int k = 0; k < 3; ++k) {
            const DensityMatrix rho = gen::state(g.ctx.total_dim(), rng);
            const CMatrix out = eval(g.ctx, *g.body, rho, gen::tables()).state.matrix();
            const double post = tr_prod(q.matrix(), out);
            CHECK(std::abs(tr_prod(w.pred.matrix(), rho.matrix()) - post) < 1e-7);
            const double lost = rho.trace() - trace(out).real();
            CHECK(std::abs(tr_prod(wl.pred.matrix(), rho.matrix()) - post - lost) < 1e-7);
        }
    }
}

TEST_CASE("accepted outlines have semantically valid conclusions") {
    gen::Rng rng(127);
    for (int i = 0; i < 60; ++i) {
        const VarContext ctx = gen::ying_context(rng);
        const CommandPtr c = gen::loop_free(ctx, rng);
        const CMatrix post = gen::predicate(ctx.total_dim(), rng).matrix();
        const CMatrix w = wp(ctx, *c, QuantumPredicate(post), gen::tables()).pred.matrix();
        ProofOutline o = derive_outline(ctx, c, post, w * rng.uniform(), gen::tables());
        // Corrupt one step half of the time; rejected outlines prove nothing.
        if (rng.chance(0.5) && !o.steps.empty()) {
            auto& s = o.steps[rng.below(o.steps.size())];
            s.pre = s.pre * 0.5 + CMatrix::identity(s.pre.rows()) * 0.5;
        }
        const auto r = check_outline(o, gen::tables());
        if (r.valid) {
            CHECK(check_triple({ctx, c, QuantumPredicate(*o.pre), QuantumPredicate(*o.post)},
                               gen::tables())
                      .verdict == Verdict::Valid);
        }
    }
}
