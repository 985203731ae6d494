#include "qhl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "common/json_matrix.hpp"
#include "qhl/casestudy.hpp"
#include "qhl/exchange.hpp"
#include "qhl/hoare.hpp"
#include "qhl/parser.hpp"
#include "qhl/semantics.hpp"
#include "qhl/typecheck.hpp"

namespace qhl::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr double kZeroDisplay = 1e-12;

class Malformed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double clean(double x) { return x == 0.0 ? 0.0 : x; }  // folds -0.0

Json matrix_json(const CMatrix& m) {
    CMatrix c = m;
    for (Complex& z : c.data()) {
        z = {clean(z.real()), clean(z.imag())};
    }
    return Json::parse(detail::matrix_to_json(c).dump());
}

bool is_matrix(const Json& j) {
    return j.is_object() && j.contains("dim") && j.contains("re");
}

std::string fixed(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10f", std::abs(x) < kZeroDisplay ? 0.0 : x);
    return buf;
}

std::string scalar_text(const Json& v) {
    if (v.is_number_float()) {
        return fixed(v.get<double>());
    }
    if (v.is_string()) {
        return v.get<std::string>();
    }
    return v.dump();
}

void render_human(std::ostream& os, const std::string& key, const Json& v, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    if (is_matrix(v)) {
        os << pad << key << ":\n";
        std::istringstream lines(format_human(detail::matrix_from_json(nlohmann::json::parse(v.dump()))));
        for (std::string line; std::getline(lines, line);) {
            os << pad << "  " << line << "\n";
        }
    } else if (v.is_object()) {
        os << pad << key << ":\n";
        for (const auto& [k, x] : v.items()) {
            render_human(os, k, x, indent + 2);
        }
    } else if (v.is_array() && !v.empty() && v.front().is_object()) {
        os << pad << key << ":\n";
        for (const Json& item : v) {
            os << pad << "  -\n";
            for (const auto& [k, x] : item.items()) {
                render_human(os, k, x, indent + 4);
            }
        }
    } else if (v.is_array()) {
        os << pad << key << ": [";
        for (std::size_t i = 0; i < v.size(); ++i) {
            os << (i ? ", " : "") << scalar_text(v[i]);
        }
        os << "]\n";
    } else {
        os << pad << key << ": " << scalar_text(v) << "\n";
    }
}

std::string render(const Json& report, Format f) {
    if (f == Format::Machine) {
        return report.dump(2) + "\n";
    }
    std::ostringstream os;
    for (const auto& [k, v] : report.items()) {
        if (k != "schema_version") {
            render_human(os, k, v, 0);
        }
    }
    return os.str();
}

Json header(const std::string& command) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    return j;
}

struct Loaded {
    TypedProgram prog;
    Tables tables;
};

Dialect dialect_of(const std::string& s) {
    return s == "qpl" ? Dialect::Qpl : Dialect::YingCore;
}

void load_tables_option(const RunConfig& cfg, Tables& tables) {
    if (cfg.tables) {
        load_table_file(*cfg.tables, tables, cfg.tol);
    }
}

Loaded load_program(const RunConfig& cfg) {
    Loaded out;
    load_tables_option(cfg, out.tables);
    const Program p = parse(read_text_file(cfg.program));
    std::vector<fs::path> dirs{cfg.program.parent_path().empty() ? fs::path(".")
                                                                 : cfg.program.parent_path()};
    dirs.insert(dirs.end(), cfg.lib_dirs.begin(), cfg.lib_dirs.end());
    load_sidecars(*p.body, dirs, out.tables, cfg.tol);
    TypecheckResult r = typecheck(p.ctx, p.body, dialect_of(cfg.dialect), out.tables);
    if (!r.ok()) {
        std::string msg = cfg.program.string() + ": type errors";
        for (const TypeError& e : r.errors) {
            msg += "\n  " + to_string(e);
        }
        throw Malformed(msg);
    }
    out.prog = std::move(*r.program);
    return out;
}

EvalOptions eval_options(const RunConfig& cfg) {
    EvalOptions o;
    o.loop_max_iters = cfg.loop_max_iters;
    o.loop_mass_eps = cfg.loop_mass_eps;
    o.mode = cfg.exact ? LoopMode::ExactKraus : LoopMode::Truncated;
    o.tol = cfg.tol;
    o.validate();
    return o;
}

HoareOptions hoare_options(const RunConfig& cfg) {
    HoareOptions o;
    o.fix_eps = cfg.fix_eps;
    o.max_iters = cfg.fix_max_iters;
    o.tol = cfg.tol;
    o.validate();
    return o;
}

void require_dim(const CMatrix& m, std::size_t dim, const std::string& what) {
    if (m.rows() != dim || m.cols() != dim) {
        throw DimensionError(what + " is " + shape_string(m) + ", expected " +
                             std::to_string(dim) + "x" + std::to_string(dim));
    }
}

int cmd_run(const RunConfig& cfg, Json& report) {
    const Loaded l = load_program(cfg);
    const CMatrix m = read_matrix_file(cfg.rho);
    require_dim(m, l.prog.input.total_dim(), "state");
    const DensityMatrix rho(m, cfg.tol);
    const EvalOptions opts = eval_options(cfg);
    const TerminationReport term =
        termination_probability(l.prog.input, *l.prog.body, rho, l.tables, opts);
    const EvalResult r = eval(l.prog.input, *l.prog.body, rho, l.tables, opts);
    const OperationalResult op =
        run_operational(l.prog.input, l.prog.body, rho, cfg.depth, l.tables);

    report["program"] = cfg.program.string();
    report["input_context"] = to_string(l.prog.input);
    report["output_context"] = to_string(r.output);
    report["final_state"] = matrix_json(r.state.matrix());
    report["trace"] = clean(r.state.trace());
    report["termination_probability"] = clean(term.probability);
    report["truncation_error"] = clean(r.truncation_error);
    report["converged"] = r.converged;
    report["path_count"] = std::count_if(op.terminals.begin(), op.terminals.end(),
                                         [](const DensityMatrix& t) { return t.trace() >= 1e-12; });
    report["unexplored_mass"] = clean(op.unexplored_mass);
    report["depth_cap"] = cfg.depth;
    return kSuccess;
}

int cmd_transform(const RunConfig& cfg, Json& report, bool liberal) {
    const Loaded l = load_program(cfg);
    const CMatrix m = read_matrix_file(cfg.post);
    require_dim(m, l.prog.output.total_dim(), "postcondition");
    const QuantumPredicate post(m, cfg.tol);
    const HoareOptions opts = hoare_options(cfg);
    const Transformed t = liberal ? wlp(l.prog.input, *l.prog.body, post, l.tables, opts)
                                  : wp(l.prog.input, *l.prog.body, post, l.tables, opts);
    report["program"] = cfg.program.string();
    report["predicate"] = matrix_json(t.pred.matrix());
    report["converged"] = t.converged;
    report["residual"] = clean(t.residual);
    report["clamp"] = clean(t.clamp);
    return t.converged ? kSuccess : kInconclusive;
}

int cmd_check(const RunConfig& cfg, Json& report) {
    const Loaded l = load_program(cfg);
    const CMatrix pre = read_matrix_file(cfg.pre);
    const CMatrix post = read_matrix_file(cfg.post);
    require_dim(pre, l.prog.input.total_dim(), "precondition");
    require_dim(post, l.prog.output.total_dim(), "postcondition");
    const TripleMode mode = cfg.mode == "par" ? TripleMode::Partial : TripleMode::Total;
    const HoareTriple t{l.prog.input, l.prog.body, QuantumPredicate(pre, cfg.tol),
                        QuantumPredicate(post, cfg.tol), mode};
    const TripleReport r = check_triple(t, l.tables, hoare_options(cfg));
    report["program"] = cfg.program.string();
    report["mode"] = mode_name(mode);
    report["verdict"] = verdict_name(r.verdict);
    report["min_eigenvalue"] = clean(r.min_eigenvalue);
    report["converged"] = r.transformed.converged;
    report["residual"] = clean(r.transformed.residual);
    report[mode == TripleMode::Total ? "wp" : "wlp"] = matrix_json(r.transformed.pred.matrix());
    if (r.witness) {
        report["witness"] = matrix_json(r.witness->matrix());
    }
    switch (r.verdict) {
        case Verdict::Valid:
            return kSuccess;
        case Verdict::Invalid:
            return kInvalid;
        case Verdict::Inconclusive:
            return kInconclusive;
    }
    return kInconclusive;
}

int cmd_prove(const RunConfig& cfg, Json& report) {
    Tables tables;
    load_tables_option(cfg, tables);
    const ProofOutline o = read_outline_file(cfg.outline, tables, cfg.lib_dirs, cfg.tol);
    const OutlineReport r = check_outline(o, tables, hoare_options(cfg));
    report["outline"] = cfg.outline.string();
    report["valid"] = r.valid;
    Json steps = Json::array();
    for (const StepVerdict& s : r.steps) {
        Json j;
        j["id"] = s.id;
        j["rule"] = s.rule;
        j["ok"] = s.ok;
        j["residual"] = clean(s.residual);
        j["message"] = s.message;
        steps.push_back(std::move(j));
    }
    report["steps"] = std::move(steps);
    report["problems"] = r.problems;
    return r.valid ? kSuccess : kInvalid;
}

int cmd_dj(const RunConfig& cfg, Json& report) {
    const BooleanOracle f = BooleanOracle::parse(cfg.oracle, cfg.k);
    const DjReport r = dj_verify(f);
    report["k"] = cfg.k;
    report["oracle"] = f.spec();
    report["p00"] = clean(r.p00);
    report["classification"] = class_name(r.classification);
    Json dist = Json::array();
    for (double p : r.distribution) {
        dist.push_back(clean(p));
    }
    report["distribution"] = std::move(dist);
    return kSuccess;
}

int cmd_assert(const RunConfig& cfg, Json& report) {
    const Loaded l = load_program(cfg);
    const ProbAssertion a = parse_assertion(cfg.expr);
    const CMatrix m = read_matrix_file(cfg.rho);
    require_dim(m, l.prog.input.total_dim(), "state");
    const EvalResult r =
        eval(l.prog.input, *l.prog.body, DensityMatrix(m, cfg.tol), l.tables, eval_options(cfg));
    const AssertionResult res = eval_assertion(a, r.output, r.state, cfg.tol);
    report["program"] = cfg.program.string();
    report["expr"] = cfg.expr;
    report["holds"] = res.holds;
    report["lhs"] = clean(res.lhs);
    report["rhs"] = clean(res.rhs);
    Json probs = Json::array();
    for (double p : res.probabilities) {
        probs.push_back(clean(p));
    }
    report["probabilities"] = std::move(probs);
    report["truncation_error"] = clean(r.truncation_error);
    return res.holds ? kSuccess : kInvalid;
}

std::optional<double> env_tol(std::ostream& err) {
    const char* v = std::getenv("QHL_TOL");
    if (v == nullptr || *v == '\0') {
        return kDefaultTol;
    }
    char* end = nullptr;
    const double t = std::strtod(v, &end);
    if (end == v || *end != '\0' || !(t > 0.0) || !std::isfinite(t)) {
        err << "error: QHL_TOL must be a positive number, got '" << v << "'\n";
        return std::nullopt;
    }
    return t;
}

}  // namespace

std::string format_human(const CMatrix& m) {
    bool complex = false;
    for (const Complex& z : m.data()) {
        complex = complex || std::abs(z.imag()) >= kZeroDisplay;
    }
    std::vector<std::string> cells;
    std::size_t width = 0;
    for (const Complex& z : m.data()) {
        std::string s = fixed(z.real());
        if (complex) {
            const double im = std::abs(z.imag()) < kZeroDisplay ? 0.0 : z.imag();
            char buf[48];
            std::snprintf(buf, sizeof buf, "%s %c %.10fi", s.c_str(), im < 0 ? '-' : '+',
                          std::abs(im));
            s = buf;
        }
        width = std::max(width, s.size());
        cells.push_back(std::move(s));
    }
    std::string out;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const std::string& s = cells[r * m.cols() + c];
            out += std::string(width - s.size() + (c ? 2 : 0), ' ') + s;
        }
        out += "\n";
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const auto tol = env_tol(err);
    if (!tol) {
        return kMalformed;
    }
    RunConfig cfg;
    cfg.tol = *tol;

    CLI::App app{"Quantum Hoare logic toolkit", "qhl"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "human";
    std::string output;
    std::vector<std::string> libs;
    std::string tables;
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"human", "machine"}));
    app.add_option("-o,--output", output, "Write the report to a file");
    app.add_option("--lib", libs, "Extra directories searched for gate sidecars");
    app.add_option("--tables", tables, "Combined gate/measurement table file");
    app.add_option("--dialect", cfg.dialect, "Language dialect")
        ->check(CLI::IsMember({"ying", "qpl"}));
    app.add_option("--tol", cfg.tol, "Tolerance (overrides QHL_TOL)")->check(CLI::PositiveNumber);
    app.add_option("--loop-max-iters", cfg.loop_max_iters)->check(CLI::PositiveNumber);
    app.add_option("--loop-eps", cfg.loop_mass_eps)->check(CLI::PositiveNumber);
    app.add_flag("--exact", cfg.exact, "Fail instead of truncating loops");
    app.add_option("--fix-eps", cfg.fix_eps)->check(CLI::PositiveNumber);
    app.add_option("--fix-max-iters", cfg.fix_max_iters)->check(CLI::PositiveNumber);

    std::string program;
    std::string rho;
    std::string pre;
    std::string post;
    std::string outline;

    auto* run_cmd = app.add_subcommand("run", "Evaluate a program on a state");
    run_cmd->add_option("program", program)->required();
    run_cmd->add_option("--rho", rho)->required();
    run_cmd->add_option("--depth", cfg.depth, "Operational depth cap")->check(CLI::PositiveNumber);

    auto* wp_cmd = app.add_subcommand("wp", "Weakest precondition");
    auto* wlp_cmd = app.add_subcommand("wlp", "Weakest liberal precondition");
    for (auto* c : {wp_cmd, wlp_cmd}) {
        c->add_option("program", program)->required();
        c->add_option("--post", post)->required();
    }

    auto* check_cmd = app.add_subcommand("check", "Decide a Hoare triple");
    check_cmd->add_option("program", program)->required();
    check_cmd->add_option("--pre", pre)->required();
    check_cmd->add_option("--post", post)->required();
    check_cmd->add_option("--mode", cfg.mode)->check(CLI::IsMember({"tot", "par"}));

    auto* prove_cmd = app.add_subcommand("prove", "Check a proof outline");
    prove_cmd->add_option("outline", outline)->required();

    auto* dj_cmd = app.add_subcommand("dj", "Deutsch-Jozsa report");
    dj_cmd->add_option("--k", cfg.k)->check(CLI::Range(std::size_t{1}, kMaxOracleBits));
    dj_cmd->add_option("--f", cfg.oracle)->required();

    auto* assert_cmd = app.add_subcommand("assert", "Evaluate a probability assertion");
    assert_cmd->add_option("program", program)->required();
    assert_cmd->add_option("--rho", rho)->required();
    assert_cmd->add_option("--expr", cfg.expr)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kMalformed;
    }

    cfg.subcommand = app.get_subcommands().front()->get_name();
    cfg.program = program;
    cfg.rho = rho;
    cfg.pre = pre;
    cfg.post = post;
    cfg.outline = outline;
    cfg.format = format == "machine" ? Format::Machine : Format::Human;
    for (const auto& d : libs) {
        cfg.lib_dirs.emplace_back(d);
    }
    if (!tables.empty()) {
        cfg.tables = tables;
    }
    if (!output.empty()) {
        cfg.output = output;
    }

    Json report = header(cfg.subcommand);
    int code = kSuccess;
    try {
        if (cfg.subcommand == "run") {
            code = cmd_run(cfg, report);
        } else if (cfg.subcommand == "wp" || cfg.subcommand == "wlp") {
            code = cmd_transform(cfg, report, cfg.subcommand == "wlp");
        } else if (cfg.subcommand == "check") {
            code = cmd_check(cfg, report);
        } else if (cfg.subcommand == "prove") {
            code = cmd_prove(cfg, report);
        } else if (cfg.subcommand == "dj") {
            code = cmd_dj(cfg, report);
        } else {
            code = cmd_assert(cfg, report);
        }
    } catch (const TruncationNotConverged& e) {
        err << "inconclusive: " << e.what() << " (residual " << e.residual() << ")\n";
        return kInconclusive;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kMalformed;
    }

    const std::string text = render(report, cfg.format);
    if (cfg.output) {
        std::ofstream f(*cfg.output, std::ios::binary);
        if (!f) {
            err << "error: cannot write " << cfg.output->string() << "\n";
            return kMalformed;
        }
        f << text;
    } else {
        out << text;
    }
    return code;
}

}  // namespace qhl::cli
