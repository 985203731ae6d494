#include <algorithm>

#include "qhl/casestudy.hpp"
#include "qhl/semantics.hpp"

namespace qhl {

std::string class_name(OracleClass c) {
    switch (c) {
        case OracleClass::Constant:
            return "constant";
        case OracleClass::Balanced:
            return "balanced";
        case OracleClass::Other:
            break;
    }
    return "other";
}

BooleanOracle::BooleanOracle(std::size_t k, std::vector<bool> table)
    : k_(k), table_(std::move(table)) {
    if (k_ < 1 || k_ > kMaxOracleBits) {
        throw OracleError("oracle width must be between 1 and " + std::to_string(kMaxOracleBits) +
                          ", got " + std::to_string(k_));
    }
    if (table_.size() != (std::size_t{1} << k_)) {
        throw OracleError("oracle on " + std::to_string(k_) + " bits needs " +
                          std::to_string(std::size_t{1} << k_) + " table entries, got " +
                          std::to_string(table_.size()));
    }
}

BooleanOracle BooleanOracle::parse(const std::string& spec, std::size_t k) {
    if (k < 1 || k > kMaxOracleBits) {
        throw OracleError("k must be between 1 and " + std::to_string(kMaxOracleBits));
    }
    const std::size_t n = std::size_t{1} << k;
    if (spec == "constant0" || spec == "constant1") {
        return BooleanOracle(k, std::vector<bool>(n, spec == "constant1"));
    }
    const std::string prefix = "balanced:";
    if (spec.rfind(prefix, 0) != 0) {
        throw OracleError("oracle must be constant0, constant1 or balanced:<bits>, got '" + spec +
                          "'");
    }
    const std::string bits = spec.substr(prefix.size());
    if (bits.size() != n) {
        throw OracleError("balanced oracle on " + std::to_string(k) + " bits needs " +
                          std::to_string(n) + " table bits, got " + std::to_string(bits.size()));
    }
    std::vector<bool> table;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw OracleError("oracle table may contain only 0 and 1");
        }
        table.push_back(c == '1');
    }
    BooleanOracle f(k, std::move(table));
    if (f.cls() != OracleClass::Balanced) {
        throw OracleError("table '" + bits + "' is not balanced");
    }
    return f;
}

OracleClass BooleanOracle::cls() const {
    const auto ones = static_cast<std::size_t>(std::count(table_.begin(), table_.end(), true));
    if (ones == 0 || ones == table_.size()) {
        return OracleClass::Constant;
    }
    return 2 * ones == table_.size() ? OracleClass::Balanced : OracleClass::Other;
}

std::string BooleanOracle::spec() const {
    std::string bits;
    for (bool b : table_) {
        bits += b ? '1' : '0';
    }
    switch (cls()) {
        case OracleClass::Constant:
            return table_.front() ? "constant1" : "constant0";
        case OracleClass::Balanced:
            return "balanced:" + bits;
        case OracleClass::Other:
            break;
    }
    return "table:" + bits;
}

std::vector<BooleanOracle> all_dj_oracles(std::size_t k) {
    if (k < 1 || k > 4) {
        throw OracleError("enumeration is limited to 1 <= k <= 4");
    }
    const std::size_t n = std::size_t{1} << k;
    std::vector<BooleanOracle> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<bool> table(n);
        for (std::size_t x = 0; x < n; ++x) {
            table[x] = ((mask >> (n - 1 - x)) & 1U) != 0;
        }
        BooleanOracle f(k, std::move(table));
        if (f.cls() != OracleClass::Other) {
            out.push_back(std::move(f));
        }
    }
    return out;
}

CMatrix build_hadamard(std::size_t k) {
    if (k == 0) {
        throw std::invalid_argument("build_hadamard needs k >= 1");
    }
    CMatrix h = gates::hadamard();
    CMatrix out = h;
    for (std::size_t i = 1; i < k; ++i) {
        out = kron(out, h);
    }
    return out;
}

CMatrix build_uf(const BooleanOracle& f) {
    const std::size_t n = std::size_t{1} << f.k();
    CMatrix u(2 * n, 2 * n);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t b = 0; b < 2; ++b) {
            const std::size_t out = x * 2 + (b ^ (f(x) ? 1U : 0U));
            u(out, x * 2 + b) = 1.0;
        }
    }
    return u;
}

namespace {

std::vector<std::string> input_names(std::size_t k) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= k; ++i) {
        names.push_back("q" + std::to_string(i));
    }
    return names;
}

}  // namespace

DjProgram dj_program(const BooleanOracle& f, Dialect dialect) {
    if (f.cls() == OracleClass::Other) {
        throw OracleError("Deutsch-Jozsa needs a constant or balanced oracle");
    }
    const std::size_t k = f.k();
    const auto qs = input_names(k);
    auto all = qs;
    all.push_back("qe");
    const std::string hk = "H" + std::to_string(k);
    const std::string hk1 = "H" + std::to_string(k + 1);

    DjProgram p;
    p.tables.gates.add(hk, build_hadamard(k));
    if (!p.tables.gates.contains(hk1)) {
        p.tables.gates.add(hk1, build_hadamard(k + 1));
    }
    p.tables.gates.add("Uf", build_uf(f));

    std::vector<CommandPtr> body;
    if (dialect == Dialect::Qpl) {
        for (auto it = all.rbegin(); it != all.rend(); ++it) {
            body.push_back(new_qbit(*it));
        }
    } else {
        std::vector<VarDecl> decls;
        for (const auto& q : all) {
            decls.push_back(make_qbit(q));
        }
        p.ctx = VarContext(std::move(decls));
    }
    for (const auto& q : all) {
        body.push_back(init_zero(q));
    }
    body.push_back(apply_gate({"qe"}, "N"));
    body.push_back(apply_gate(all, hk1));
    body.push_back(apply_gate(all, "Uf"));
    body.push_back(apply_gate(qs, hk));
    if (dialect == Dialect::Qpl) {
        body.push_back(discard("qe"));
        for (std::size_t i = k; i >= 1; --i) {
            body.push_back(new_bit("b" + std::to_string(i)));
        }
        for (std::size_t i = 1; i <= k; ++i) {
            const std::string b = "b" + std::to_string(i);
            body.push_back(measure_if(qs[i - 1], assign_bit(b, 0), assign_bit(b, 1)));
        }
    }
    p.body = seq(std::move(body));
    return p;
}

CMatrix dj_target(std::size_t k) {
    const std::size_t n = std::size_t{1} << k;
    return kron(CMatrix::outer_basis(0, 0, n), CMatrix::identity(2));
}

DjReport dj_verify(const BooleanOracle& f) {
    const DjProgram p = dj_program(f, Dialect::YingCore);
    const std::size_t d = p.ctx.total_dim();
    const DensityMatrix start(CMatrix::outer_basis(0, 0, d));
    const EvalResult r = eval(p.ctx, *p.body, start, p.tables);
    DjReport report;
    const std::size_t n = d / 2;
    report.distribution.assign(n, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        report.distribution[j / 2] += r.state.matrix()(j, j).real();
    }
    report.p00 = report.distribution.front();
    report.classification = report.p00 > 0.5 ? OracleClass::Constant : OracleClass::Balanced;
    return report;
}

}  // namespace qhl
