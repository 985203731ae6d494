// Acceptance criteria 1-9. One PASS/FAIL line each; exit status is the
// number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "generators.hpp"
#include "oracle.hpp"
#include "qhl/casestudy.hpp"
#include "qhl/hoare.hpp"
#include "qhl/parser.hpp"
#include "qhl/semantics.hpp"

using namespace qhl;

namespace {

constexpr double kDjTol = 1e-9;
constexpr double kWpTol = 1e-9;
constexpr double kExactTol = 1e-12;
constexpr double kDualityTol = 1e-9;
constexpr double kOperationalTol = 1e-9;
constexpr double kDjSeconds = 1.0;
constexpr double kProofSeconds = 1.0;
constexpr double kDualitySeconds = 30.0;

struct Outcome {
    bool ok = true;
    std::string detail;
};

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

double tr_prod(const CMatrix& a, const CMatrix& b) { return trace_of_product(a, b).real(); }

Outcome dj_reproduction() {
    Outcome o;
    double worst = 0.0;
    for (const auto& f : all_dj_oracles(2)) {
        const DjReport r = dj_verify(f);
        const double want = f.cls() == OracleClass::Constant ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(r.p00 - want));
        o.ok = o.ok && r.classification == f.cls();
    }
    o.ok = o.ok && worst <= kDjTol && all_dj_oracles(2).size() == 8;
    o.detail = "8 oracles, max |Pr(00) - expected| = " + sci(worst);
    return o;
}

Outcome proof_reproduction() {
    const DjProgram p = dj_program(BooleanOracle::parse("constant1", 2), Dialect::YingCore);
    const CMatrix t = dj_target(2);
    const Transformed w = wp(p.ctx, *p.body, QuantumPredicate(t), p.tables);
    const double diff = max_abs_diff(w.pred.matrix(), CMatrix::identity(8));
    const TripleReport r = check_triple(
        {p.ctx, p.body, QuantumPredicate(CMatrix::identity(8)), QuantumPredicate(t), TripleMode::Total},
        p.tables);
    return {diff <= kWpTol && r.verdict == Verdict::Valid,
            "|wp - I8|max = " + sci(diff) + ", check: " + verdict_name(r.verdict)};
}

Outcome measurement_superoperator() {
    gen::Rng rng(2024);
    const KrausMap forget({CMatrix::outer_basis(0, 0, 2), CMatrix::outer_basis(1, 1, 2)});
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        Complex a{rng.uniform() - 0.5, rng.uniform() - 0.5};
        Complex b{rng.uniform() - 0.5, rng.uniform() - 0.5};
        const double n = std::sqrt(std::norm(a) + std::norm(b));
        a /= n;
        b /= n;
        const CMatrix rho{{std::norm(a), a * std::conj(b)}, {std::conj(a) * b, std::norm(b)}};
        const CMatrix want{{std::norm(a), 0.0}, {0.0, std::norm(b)}};
        worst = std::max(worst, max_abs_diff(apply_kraus(forget, rho), want));
    }
    return {worst <= kExactTol, "100 states, max error " + sci(worst)};
}

Outcome allocation() {
    gen::Rng rng(7);
    const KrausMap alloc({kraus::allocate(VarContext({make_qbit("q")}))});
    double worst = 0.0;
    bool shape = alloc.out_dim() == 4 && alloc.in_dim() == 2;
    for (int i = 0; i < 20; ++i) {
        const CMatrix rho = gen::state(2, rng).matrix();
        const CMatrix out = apply_kraus(alloc, rho);
        shape = shape && out.rows() == 4;
        for (std::size_t r = 0; r < 4; ++r) {
            for (std::size_t c = 0; c < 4; ++c) {
                const Complex want = r < 2 && c < 2 ? rho(r, c) : Complex{};
                worst = std::max(worst, std::abs(out(r, c) - want));
            }
        }
    }
    return {shape && worst <= kExactTol, "4x2 allocation, max error " + sci(worst)};
}

struct CorpusItem {
    VarContext ctx;
    CommandPtr prog;
};

std::vector<CorpusItem> loop_free_corpus() {
    gen::Rng rng(5150);
    std::vector<CorpusItem> out;
    for (int i = 0; i < 200; ++i) {
        const VarContext ctx = gen::ying_context(rng, 3);
        out.push_back({ctx, gen::loop_free(ctx, rng, 5)});
    }
    return out;
}

Outcome wp_duality(const std::vector<CorpusItem>& corpus) {
    gen::Rng rng(99);
    double worst = 0.0;
    std::size_t pairs = 0;
    for (const auto& item : corpus) {
        const QuantumPredicate q = gen::predicate(item.ctx.total_dim(), rng);
        const CMatrix w = wp(item.ctx, *item.prog, q, gen::tables()).pred.matrix();
        for (int k = 0; k < 20; ++k) {
            const DensityMatrix rho = gen::state(item.ctx.total_dim(), rng);
            const CMatrix out = eval(item.ctx, *item.prog, rho, gen::tables()).state.matrix();
            worst = std::max(worst, std::abs(tr_prod(w, rho.matrix()) - tr_prod(q.matrix(), out)));
            ++pairs;
        }
    }
    return {worst <= kDualityTol,
            std::to_string(pairs) + " pairs, max gap " + sci(worst)};
}

Outcome wlp_duality(std::vector<CorpusItem> corpus) {
    const VarContext one({make_qbit("q")});
    corpus.push_back({one, parse_statement("while std(q) = 1 do skip od", one)});
    gen::Rng rng(100);
    double worst = 0.0;
    double divergent_worst = 0.0;
    for (const auto& item : corpus) {
        const QuantumPredicate q = gen::predicate(item.ctx.total_dim(), rng);
        const CMatrix w = wlp(item.ctx, *item.prog, q, gen::tables()).pred.matrix();
        for (int k = 0; k < 20; ++k) {
            const DensityMatrix rho = gen::state(item.ctx.total_dim(), rng);
            const CMatrix out = eval(item.ctx, *item.prog, rho, gen::tables()).state.matrix();
            const double gap = std::abs(tr_prod(w, rho.matrix()) - tr_prod(q.matrix(), out) -
                                        rho.trace() + trace(out).real());
            worst = std::max(worst, gap);
            if (&item == &corpus.back()) {
                divergent_worst = std::max(divergent_worst, gap);
            }
        }
    }
    return {worst <= kDualityTol, std::to_string(corpus.size()) + " programs, max gap " +
                                      sci(worst) + " (divergent loop " +
                                      sci(divergent_worst) + ")"};
}

Outcome operational_agreement(const std::vector<CorpusItem>& corpus) {
    gen::Rng rng(101);
    double worst = 0.0;
    bool finite = true;
    for (const auto& item : corpus) {
        const DensityMatrix rho = gen::state(item.ctx.total_dim(), rng);
        const auto op = run_operational(item.ctx, item.prog, rho, 1000, gen::tables());
        finite = finite && op.unexplored_mass == 0.0;
        const CMatrix ev = eval(item.ctx, *item.prog, rho, gen::tables()).state.matrix();
        worst = std::max(worst, max_abs_diff(op.terminal_sum(), ev));
    }
    const VarContext one({make_qbit("q")});
    const CommandPtr reset = parse_statement("while std(q) = 1 do q := 0 od", one);
    const auto r =
        run_operational(one, reset, DensityMatrix(CMatrix::outer_basis(1, 1, 2)), 3, Tables{});
    const double p = trace(r.terminal_sum()).real();
    return {finite && worst <= kOperationalTol && std::abs(p - 1.0) <= kExactTol,
            "corpus max gap " + sci(worst) + ", reset loop mass at depth 3 = " +
                sci(p)};
}

Outcome loewner_laws(const std::vector<CorpusItem>& corpus) {
    gen::Rng rng(8);
    int reflexive = 0;
    int antisymmetric = 0;
    int conjugation = 0;
    int monotone = 0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 1 + rng.below(8);
        const CMatrix a = gen::psd(n, rng);
        reflexive += loewner_leq(a, a) ? 1 : 0;

        CMatrix nudge(n, n);
        for (std::size_t k = 0; k < n; ++k) {
            nudge(k, k) = 1e-11 * (rng.uniform() - 0.5);
        }
        const CMatrix b = a + nudge;
        const bool both = loewner_leq(a, b) && loewner_leq(b, a);
        antisymmetric += both && max_abs_diff(a, b) <= 2 * kDefaultTol * std::max(1.0, max_abs(a))
                             ? 1
                             : 0;

        const CMatrix big = a + gen::psd(n, rng);
        CMatrix e(n, n);
        for (auto& z : e.data()) {
            z = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
        }
        conjugation += loewner_leq(conjugate_by(a, e), conjugate_by(big, e)) ? 1 : 0;
    }
    for (std::size_t i = 0; i < 100; ++i) {
        const auto& item = corpus[i];
        const std::size_t n = item.ctx.total_dim();
        const CMatrix q1 = gen::predicate(n, rng).matrix();
        const CMatrix q2 = q1 + (CMatrix::identity(n) - q1) * rng.uniform();
        const CMatrix w1 = wp(item.ctx, *item.prog, QuantumPredicate(q1), gen::tables()).pred.matrix();
        const CMatrix w2 = wp(item.ctx, *item.prog, QuantumPredicate(q2), gen::tables()).pred.matrix();
        monotone += loewner_leq(w1, w2) ? 1 : 0;
    }
    const bool ok = reflexive == 100 && antisymmetric == 100 && conjugation == 100 && monotone == 100;
    return {ok, "reflexive " + std::to_string(reflexive) + "/100, antisymmetric " +
                    std::to_string(antisymmetric) + "/100, conjugation " +
                    std::to_string(conjugation) + "/100, wp monotone " + std::to_string(monotone) +
                    "/100"};
}

Outcome round_trip() {
    gen::Rng rng(909);
    int same = 0;
    for (int i = 0; i < 500; ++i) {
        const gen::Generated g = gen::well_typed(rng, 6);
        const Program back = parse(print(g.ctx, *g.body));
        same += back.ctx == g.ctx && same_structure(*back.body, *normalize_seq(g.body)) ? 1 : 0;
    }
    return {same == 500, std::to_string(same) + "/500 programs"};
}

int report(int id, const std::string& name, double limit_s, const std::function<Outcome()>& run) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = run();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = limit_s <= 0.0 || s < limit_s;
    const bool pass = o.ok && in_time;
    std::printf("%s %d %s: %s [%.3f s%s]\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                o.detail.c_str(), s, in_time ? "" : ", over time limit");
    return pass ? 0 : 1;
}

}  // namespace

int main() {
    const auto corpus = loop_free_corpus();
    int failures = 0;
    failures += report(1, "Deutsch-Jozsa k=2", kDjSeconds, dj_reproduction);
    failures += report(2, "wp(DJ core, T) = I8", kProofSeconds, proof_reproduction);
    failures += report(3, "measurement superoperator", 0.0, measurement_superoperator);
    failures += report(4, "allocation", 0.0, allocation);
    failures += report(5, "wp/eval duality", kDualitySeconds, [&] { return wp_duality(corpus); });
    failures += report(6, "wlp/eval duality", 0.0, [&] { return wlp_duality(corpus); });
    failures += report(7, "operational/denotational agreement", 0.0,
                       [&] { return operational_agreement(corpus); });
    failures += report(8, "Loewner laws", 0.0, [&] { return loewner_laws(corpus); });
    failures += report(9, "parse/print round-trip", 0.0, round_trip);
    return failures;
}
