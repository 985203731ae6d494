#include <cctype>
#include <cmath>
#include <cstdlib>

#include "qhl/hoare.hpp"

namespace qhl {

namespace {

class AssertionParser {
public:
    explicit AssertionParser(std::string_view text) : text_(text) {}

    ProbAssertion run() {
        ProbAssertion a;
        a.lhs = sum();
        a.cmp = comparison();
        a.rhs = sum();
        space();
        if (i_ != text_.size()) {
            fail("unexpected trailing input");
        }
        return a;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw AssertionError("column " + std::to_string(i_ + 1) + ": " + what);
    }

    void space() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) {
            ++i_;
        }
    }

    bool eat(std::string_view s) {
        space();
        if (text_.substr(i_, s.size()) == s) {
            i_ += s.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view s) {
        if (!eat(s)) {
            fail("expected '" + std::string(s) + "'");
        }
    }

    std::string ident() {
        space();
        const std::size_t start = i_;
        while (i_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_')) {
            ++i_;
        }
        if (start == i_ || std::isdigit(static_cast<unsigned char>(text_[start]))) {
            i_ = start;
            fail("expected a variable name");
        }
        return std::string(text_.substr(start, i_ - start));
    }

    bool at_number() {
        space();
        return i_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[i_])) || text_[i_] == '.');
    }

    double number() {
        space();
        const std::string rest(text_.substr(i_));
        char* end = nullptr;
        const double v = std::strtod(rest.c_str(), &end);
        if (end == rest.c_str() || !std::isfinite(v)) {
            fail("expected a number");
        }
        i_ += static_cast<std::size_t>(end - rest.c_str());
        return v;
    }

    bool keyword(std::string_view kw) {
        space();
        if (text_.substr(i_, kw.size()) != kw) {
            return false;
        }
        const std::size_t after = i_ + kw.size();
        if (after < text_.size() &&
            (std::isalnum(static_cast<unsigned char>(text_[after])) || text_[after] == '_')) {
            return false;
        }
        i_ = after;
        return true;
    }

    std::vector<ProbTerm> sum() {
        std::vector<ProbTerm> terms;
        double sign = 1.0;
        if (eat("-")) {
            sign = -1.0;
        }
        for (;;) {
            ProbTerm t = term();
            t.coeff *= sign;
            terms.push_back(std::move(t));
            if (eat("+")) {
                sign = 1.0;
            } else if (eat("-")) {
                sign = -1.0;
            } else {
                return terms;
            }
        }
    }

    ProbTerm term() {
        ProbTerm t;
        if (at_number()) {
            t.coeff = number();
            if (!eat("*")) {
                space();
                if (!(text_.substr(i_, 2) == "Pr" || text_.substr(i_, 2) == "tr")) {
                    return t;  // bare constant
                }
            }
        }
        if (keyword("Pr")) {
            t.kind = ProbTerm::Kind::Pr;
            expect("(");
            do {
                std::string var = ident();
                expect("=");
                space();
                if (!at_number()) {
                    fail("expected a basis value");
                }
                const std::size_t start = i_;
                while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) {
                    ++i_;
                }
                if (i_ - start > 9) {
                    fail("basis value too large");
                }
                t.conj.emplace_back(std::move(var),
                                    std::stoul(std::string(text_.substr(start, i_ - start))));
            } while (eat("&&") || eat("&") || eat("∧") || keyword("and"));
            expect(")");
            return t;
        }
        if (keyword("tr")) {
            t.kind = ProbTerm::Kind::Trace;
            if (eat("(")) {
                ident();
                expect(")");
            } else {
                eat("ρ") || keyword("rho");
            }
            return t;
        }
        fail("expected Pr(...), tr or a number");
    }

    Comparison comparison() {
        if (eat("<=") || eat("≤")) {
            return Comparison::Le;
        }
        if (eat(">=") || eat("≥")) {
            return Comparison::Ge;
        }
        if (eat("==") || eat("=")) {
            return Comparison::Eq;
        }
        fail("expected '=', '<=' or '>='");
    }

    std::string_view text_;
    std::size_t i_ = 0;
};

double probability(const ProbTerm& t, const VarContext& ctx, const DensityMatrix& rho) {
    const auto dims = ctx.dims();
    std::vector<std::pair<std::size_t, std::size_t>> fixed;  // position, value
    for (const auto& [name, value] : t.conj) {
        const auto pos = ctx.position(name);
        if (!pos) {
            throw AssertionError("unknown variable '" + name + "'");
        }
        if (value >= dims[*pos]) {
            throw AssertionError("value " + std::to_string(value) + " is out of range for '" +
                                 name + "'");
        }
        fixed.emplace_back(*pos, value);
    }
    double p = 0.0;
    for (std::size_t j = 0; j < rho.dim(); ++j) {
        bool match = true;
        for (const auto& [pos, value] : fixed) {
            std::size_t stride = 1;
            for (std::size_t k = pos + 1; k < dims.size(); ++k) {
                stride *= dims[k];
            }
            match = match && (j / stride) % dims[pos] == value;
        }
        if (match) {
            p += rho.matrix()(j, j).real();
        }
    }
    return p;
}

double side(const std::vector<ProbTerm>& terms, const VarContext& ctx, const DensityMatrix& rho,
            std::vector<double>* probs) {
    double acc = 0.0;
    for (const ProbTerm& t : terms) {
        double v = 1.0;
        if (t.kind == ProbTerm::Kind::Pr) {
            v = probability(t, ctx, rho);
            if (probs != nullptr) {
                probs->push_back(v);
            }
        } else if (t.kind == ProbTerm::Kind::Trace) {
            v = rho.trace();
        }
        acc += t.coeff * v;
    }
    return acc;
}

}  // namespace

ProbAssertion parse_assertion(std::string_view text) { return AssertionParser(text).run(); }

AssertionResult eval_assertion(const ProbAssertion& a, const VarContext& ctx,
                               const DensityMatrix& rho, double tol) {
    if (rho.dim() != ctx.total_dim()) {
        throw DimensionError("state has dimension " + std::to_string(rho.dim()) +
                             " but the context needs " + std::to_string(ctx.total_dim()));
    }
    AssertionResult r;
    r.lhs = side(a.lhs, ctx, rho, &r.probabilities);
    r.rhs = side(a.rhs, ctx, rho, nullptr);
    const double diff = r.lhs - r.rhs;
    switch (a.cmp) {
        case Comparison::Eq:
            r.holds = std::abs(diff) <= tol;
            break;
        case Comparison::Le:
            r.holds = diff <= tol;
            break;
        case Comparison::Ge:
            r.holds = diff >= -tol;
            break;
    }
    return r;
}

}  // namespace qhl
