#include <fstream>
#include <map>

#include <json.hpp>

#include "common/json_matrix.hpp"
#include "qhl/exchange.hpp"
#include "qhl/hoare.hpp"
#include "qhl/parser.hpp"
#include "qhl/semantics.hpp"
#include "semantics/resolve.hpp"

namespace qhl {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string require_string(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw OutlineError(where + ": missing string field '" + key + "'");
    }
    return j.at(key).get<std::string>();
}

class OutlineReader {
public:
    OutlineReader(const fs::path& path, Tables& tables, std::vector<fs::path> search_dirs,
                  double tol)
        : path_(path), base_(path.parent_path()), tables_(tables), dirs_(std::move(search_dirs)),
          tol_(tol) {}

    ProofOutline read() {
        json doc;
        try {
            doc = json::parse(read_text_file(path_));
        } catch (const json::exception& e) {
            throw OutlineError(path_.string() + ": " + e.what());
        }
        if (!doc.is_object()) {
            throw OutlineError(path_.string() + ": outline must be a JSON object");
        }
        if (doc.contains("tables")) {
            load_table_file(base_ / require_string(doc, "tables", "outline"), tables_, tol_);
        }
        ProofOutline o;
        std::vector<fs::path> dirs{base_};
        if (doc.contains("program")) {
            const fs::path prog = base_ / require_string(doc, "program", "outline");
            Program p = parse(read_text_file(prog));
            dirs.insert(dirs.begin(), prog.parent_path());
            o.ctx = p.ctx;
            o.program = p.body;
        } else if (doc.contains("context")) {
            o.ctx = parse("var " + require_string(doc, "context", "outline") + "; skip").ctx;
        } else {
            throw OutlineError("outline needs a 'program' or a 'context'");
        }
        dirs.insert(dirs.end(), dirs_.begin(), dirs_.end());

        if (doc.contains("predicates")) {
            if (!doc.at("predicates").is_object()) {
                throw OutlineError("'predicates' must be an object");
            }
            for (const auto& [name, value] : doc.at("predicates").items()) {
                preds_[name] = matrix_value(value, "predicate '" + name + "'");
            }
        }
        if (doc.contains("pre")) {
            o.pre = ref(doc.at("pre"), "outline pre");
        }
        if (doc.contains("post")) {
            o.post = ref(doc.at("post"), "outline post");
        }
        if (doc.contains("steps")) {
            if (!doc.at("steps").is_array()) {
                throw OutlineError("'steps' must be an array");
            }
            for (const json& s : doc.at("steps")) {
                o.steps.push_back(step(s, o.ctx));
            }
        }
        if (o.program) {
            load_sidecars(*o.program, dirs, tables_, tol_);
        }
        for (const OutlineStep& s : o.steps) {
            if (s.stmt) {
                load_sidecars(*s.stmt, dirs, tables_, tol_);
            }
        }
        return o;
    }

private:
    CMatrix matrix_value(const json& v, const std::string& what) {
        try {
            if (v.is_string()) {
                return read_matrix_file(base_ / v.get<std::string>());
            }
            return detail::matrix_from_json(v);
        } catch (const FormatError& e) {
            throw OutlineError(what + ": " + e.what());
        }
    }

    CMatrix ref(const json& v, const std::string& what) {
        if (v.is_string()) {
            const auto it = preds_.find(v.get<std::string>());
            if (it == preds_.end()) {
                throw OutlineError(what + ": unknown predicate '" + v.get<std::string>() + "'");
            }
            return it->second;
        }
        return matrix_value(v, what);
    }

    OutlineStep step(const json& s, const VarContext& ctx) {
        if (!s.is_object()) {
            throw OutlineError("each step must be an object");
        }
        OutlineStep out;
        out.id = require_string(s, "id", "step");
        const std::string where = "step '" + out.id + "'";
        out.rule = require_string(s, "rule", where);
        if (s.contains("stmt")) {
            try {
                out.stmt = parse_statement(require_string(s, "stmt", where), ctx);
            } catch (const ParseError& e) {
                throw OutlineError(where + ": " + e.what());
            }
        }
        if (!s.contains("pre") || !s.contains("post")) {
            throw OutlineError(where + ": needs 'pre' and 'post'");
        }
        out.pre = ref(s.at("pre"), where + " pre");
        out.post = ref(s.at("post"), where + " post");
        if (s.contains("premises")) {
            if (!s.at("premises").is_array()) {
                throw OutlineError(where + ": 'premises' must be an array of step ids");
            }
            for (const json& p : s.at("premises")) {
                if (!p.is_string()) {
                    throw OutlineError(where + ": 'premises' must be an array of step ids");
                }
                out.premises.push_back(p.get<std::string>());
            }
        }
        return out;
    }

    fs::path path_;
    fs::path base_;
    Tables& tables_;
    std::vector<fs::path> dirs_;
    double tol_;
    std::map<std::string, CMatrix> preds_;
};

class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& what, double residual)
        : std::runtime_error(what), residual(residual) {}
    double residual;
};

class OutlineChecker {
public:
    OutlineChecker(const ProofOutline& o, const Tables& tables, const HoareOptions& opts)
        : o_(o), tables_(tables), opts_(opts) {}

    OutlineReport run() {
        OutlineReport report;
        for (std::size_t i = 0; i < o_.steps.size(); ++i) {
            const OutlineStep& s = o_.steps[i];
            StepVerdict v{s.id, s.rule, true, "ok", 0.0};
            try {
                if (index_.contains(s.id)) {
                    throw StepFailure("duplicate step id", 0.0);
                }
                stmts_.push_back(check(s));
                v.residual = residual_;
            } catch (const StepFailure& e) {
                v.ok = false;
                v.message = e.what();
                v.residual = e.residual;
                stmts_.push_back(s.stmt);
            } catch (const std::exception& e) {
                v.ok = false;
                v.message = e.what();
                stmts_.push_back(s.stmt);
            }
            index_.emplace(s.id, i);
            report.steps.push_back(std::move(v));
        }
        conclusion(report);
        report.valid = report.problems.empty();
        for (const StepVerdict& v : report.steps) {
            report.valid = report.valid && v.ok;
        }
        return report;
    }

private:
    void equal(const CMatrix& a, const CMatrix& b, const std::string& what) {
        if (a.rows() != b.rows() || a.cols() != b.cols()) {
            throw StepFailure(what + ": shapes " + shape_string(a) + " and " + shape_string(b) +
                                  " differ",
                              0.0);
        }
        const double diff = max_abs_diff(a, b);
        residual_ = std::max(residual_, diff);
        if (diff > opts_.tol) {
            throw StepFailure(what + " (max entry difference " + std::to_string(diff) + ")", diff);
        }
    }

    void below(const CMatrix& a, const CMatrix& b, const std::string& what) {
        if (a.rows() != b.rows() || a.cols() != b.cols()) {
            throw StepFailure(what + ": shapes " + shape_string(a) + " and " + shape_string(b) +
                                  " differ",
                              0.0);
        }
        if (!loewner_leq(a, b, opts_.tol)) {
            const double low = eig_hermitian(hermitian_part(b - a)).front();
            throw StepFailure(what + " (smallest eigenvalue " + std::to_string(low) + ")", low);
        }
    }

    const OutlineStep& premise(const std::string& id) {
        const auto it = index_.find(id);
        if (it == index_.end()) {
            throw StepFailure("premise '" + id + "' is not an earlier step", 0.0);
        }
        return o_.steps[it->second];
    }

    CommandPtr stmt_of(const std::string& id) {
        const CommandPtr s = stmts_[index_.at(id)];
        if (!s) {
            throw StepFailure("premise '" + id + "' has no statement", 0.0);
        }
        return s;
    }

    void arity(const OutlineStep& s, std::size_t n) {
        if (s.premises.size() != n) {
            throw StepFailure(s.rule + " takes " + std::to_string(n) + " premise(s), got " +
                                  std::to_string(s.premises.size()),
                              0.0);
        }
    }

    template <typename T>
    const T& shape(const OutlineStep& s) {
        if (!s.stmt) {
            throw StepFailure(s.rule + " needs a statement", 0.0);
        }
        const T* node = std::get_if<T>(&s.stmt->node);
        if (node == nullptr) {
            throw StepFailure("statement does not have the shape " + s.rule + " expects", 0.0);
        }
        return *node;
    }

    static bool same(const CommandPtr& a, const CommandPtr& b) {
        return same_structure(*normalize_seq(a), *normalize_seq(b));
    }

    // Checks s and returns the statement it proves.
    CommandPtr check(const OutlineStep& s) {
        residual_ = 0.0;
        const std::size_t d = o_.ctx.total_dim();
        if (s.pre.rows() != d || s.pre.cols() != d || s.post.rows() != d || s.post.cols() != d) {
            throw StepFailure("predicates must be " + std::to_string(d) + "x" + std::to_string(d),
                              0.0);
        }
        const VarContext& ctx = o_.ctx;
        if (s.rule == "Skip") {
            shape<Skip>(s);
            arity(s, 0);
            equal(s.pre, s.post, "pre and post differ");
            return s.stmt;
        }
        if (s.rule == "AsgnB" || s.rule == "AsgnN") {
            const InitZero& x = shape<InitZero>(s);
            arity(s, 0);
            const VarDecl* v = ctx.find(x.var);
            if (v == nullptr) {
                throw StepFailure("unknown variable '" + x.var + "'", 0.0);
            }
            const bool qunit = v->kind == VarKind::Qunit;
            if (qunit != (s.rule == "AsgnN")) {
                throw StepFailure(s.rule + " does not apply to " + kind_name(v->kind) + " '" +
                                      x.var + "'",
                                  0.0);
            }
            CMatrix expect(d, d);
            for (const CMatrix& e : kraus::init_zero(ctx, x.var)) {
                expect += conjugate_by(s.post, e);
            }
            equal(s.pre, expect, "pre is not the assignment precondition of post");
            return s.stmt;
        }
        if (s.rule == "Unit") {
            const ApplyU& x = shape<ApplyU>(s);
            arity(s, 0);
            const CMatrix u = detail::resolve_gate(tables_, ctx, x);
            equal(s.pre, conjugate_by(s.post, u), "pre is not U^dagger post U");
            return s.stmt;
        }
        if (s.rule == "Measure") {
            const MeasureCase& x = shape<MeasureCase>(s);
            arity(s, x.branches.size());
            const auto ms = detail::resolve_measurement(tables_, ctx, x.meas, x.vars);
            CMatrix expect(d, d);
            for (std::size_t m = 0; m < x.branches.size(); ++m) {
                const OutlineStep& p = premise(s.premises[m]);
                if (!same(stmt_of(p.id), x.branches[m])) {
                    throw StepFailure("premise '" + p.id + "' is not about case " +
                                          std::to_string(m),
                                      0.0);
                }
                equal(p.post, s.post, "premise '" + p.id + "' has a different post");
                expect += conjugate_by(p.pre, ms[m]);
            }
            equal(s.pre, expect, "pre is not the measurement sum of the premises");
            return s.stmt;
        }
        if (s.rule == "Seq") {
            if (s.premises.size() < 2) {
                throw StepFailure("Seq takes at least 2 premises", 0.0);
            }
            std::vector<CommandPtr> parts;
            for (std::size_t i = 0; i < s.premises.size(); ++i) {
                const OutlineStep& p = premise(s.premises[i]);
                parts.push_back(stmt_of(p.id));
                if (i + 1 < s.premises.size()) {
                    const OutlineStep& q = premise(s.premises[i + 1]);
                    equal(p.post, q.pre,
                          "midpoint between '" + p.id + "' and '" + q.id + "' does not chain");
                }
            }
            equal(s.pre, premise(s.premises.front()).pre, "pre differs from the first premise");
            equal(s.post, premise(s.premises.back()).post, "post differs from the last premise");
            CommandPtr joined = seq(std::move(parts));
            if (s.stmt && !same(s.stmt, joined)) {
                throw StepFailure("statement is not the sequence of the premises", 0.0);
            }
            return joined;
        }
        if (s.rule == "While") {
            const While& x = shape<While>(s);
            arity(s, 1);
            const OutlineStep& p = premise(s.premises.front());
            if (!same(stmt_of(p.id), x.body)) {
                throw StepFailure("premise '" + p.id + "' is not about the loop body", 0.0);
            }
            const auto ms = detail::resolve_measurement(tables_, ctx, x.meas, x.vars);
            const CMatrix split = conjugate_by(s.post, ms[0]) + conjugate_by(p.pre, ms[1]);
            equal(p.post, split, "premise post is not M0^dagger P M0 + M1^dagger Q M1");
            equal(s.pre, split, "pre is not M0^dagger P M0 + M1^dagger Q M1");
            return s.stmt;
        }
        if (s.rule == "Cons") {
            arity(s, 1);
            const OutlineStep& p = premise(s.premises.front());
            const CommandPtr inner = stmt_of(p.id);
            if (s.stmt && !same(s.stmt, inner)) {
                throw StepFailure("statement differs from the premise's", 0.0);
            }
            below(s.pre, p.pre, "pre is not below the premise's pre");
            below(p.post, s.post, "premise's post is not below post");
            return inner;
        }
        throw StepFailure("unknown rule '" + s.rule + "'", 0.0);
    }

    void conclusion(OutlineReport& report) {
        if (o_.steps.empty()) {
            if (o_.program && !holds<Skip>(*normalize_seq(o_.program))) {
                report.problems.push_back("an empty outline only proves skip");
            }
            if (!o_.pre || !o_.post) {
                report.problems.push_back("an empty outline needs 'pre' and 'post'");
            } else if (o_.pre->rows() != o_.post->rows() || o_.pre->cols() != o_.post->cols() ||
                       max_abs_diff(*o_.pre, *o_.post) > opts_.tol) {
                report.problems.push_back("pre and post differ");
            }
            return;
        }
        const OutlineStep& last = o_.steps.back();
        const CommandPtr proved = stmts_.back();
        if (o_.program && (!proved || !same(proved, o_.program))) {
            report.problems.push_back("last step '" + last.id + "' is not about the program");
        }
        const auto matches = [&](const CMatrix& a, const CMatrix& b) {
            return a.rows() == b.rows() && a.cols() == b.cols() &&
                   max_abs_diff(a, b) <= opts_.tol;
        };
        if (o_.pre && !matches(*o_.pre, last.pre)) {
            report.problems.push_back("last step's pre is not the outline's pre");
        }
        if (o_.post && !matches(*o_.post, last.post)) {
            report.problems.push_back("last step's post is not the outline's post");
        }
    }

    const ProofOutline& o_;
    const Tables& tables_;
    const HoareOptions& opts_;
    std::map<std::string, std::size_t> index_;
    std::vector<CommandPtr> stmts_;
    double residual_ = 0.0;
};

class Deriver {
public:
    Deriver(const VarContext& ctx, const Tables& tables) : ctx_(ctx), tables_(tables) {}

    // Appends the steps proving {?} c {post}; returns the concluding step.
    OutlineStep derive(const CommandPtr& c, const CMatrix& post) {
        const std::size_t d = ctx_.total_dim();
        OutlineStep s;
        s.stmt = c;
        s.post = post;
        if (holds<Skip>(*c)) {
            s.rule = "Skip";
            s.pre = post;
        } else if (const auto* x = std::get_if<InitZero>(&c->node)) {
            const VarDecl* v = ctx_.find(x->var);
            s.rule = v != nullptr && v->kind == VarKind::Qunit ? "AsgnN" : "AsgnB";
            s.pre = CMatrix(d, d);
            for (const CMatrix& e : kraus::init_zero(ctx_, x->var)) {
                s.pre += conjugate_by(post, e);
            }
        } else if (const auto* x = std::get_if<ApplyU>(&c->node)) {
            s.rule = "Unit";
            s.pre = conjugate_by(post, detail::resolve_gate(tables_, ctx_, *x));
        } else if (holds<Seq>(*c)) {
            s.rule = "Seq";
            const auto parts = flatten_seq(c);
            CMatrix mid = post;
            std::vector<std::string> ids(parts.size());
            for (std::size_t i = parts.size(); i-- > 0;) {
                const OutlineStep p = derive(parts[i], mid);
                ids[i] = p.id;
                mid = p.pre;
            }
            s.premises = std::move(ids);
            s.pre = mid;
        } else if (const auto* x = std::get_if<MeasureCase>(&c->node)) {
            s.rule = "Measure";
            const auto ms = detail::resolve_measurement(tables_, ctx_, x->meas, x->vars);
            s.pre = CMatrix(d, d);
            for (std::size_t m = 0; m < x->branches.size(); ++m) {
                const OutlineStep p = derive(x->branches[m], post);
                s.premises.push_back(p.id);
                s.pre += conjugate_by(p.pre, ms[m]);
            }
        } else {
            throw OutlineError("derive_outline handles loop-free ying-core programs only");
        }
        s.id = "s" + std::to_string(steps_.size() + 1);
        steps_.push_back(std::move(s));
        return steps_.back();
    }

    std::vector<OutlineStep> take() { return std::move(steps_); }

private:
    const VarContext& ctx_;
    const Tables& tables_;
    std::vector<OutlineStep> steps_;
};

}  // namespace

ProofOutline derive_outline(const VarContext& ctx, const CommandPtr& program, const CMatrix& post,
                            const std::optional<CMatrix>& pre, const Tables& tables) {
    Deriver d(ctx, tables);
    const OutlineStep top = d.derive(program, post);
    ProofOutline o;
    o.ctx = ctx;
    o.program = program;
    o.steps = d.take();
    o.post = post;
    o.pre = top.pre;
    if (pre) {
        OutlineStep cons;
        cons.id = "s" + std::to_string(o.steps.size() + 1);
        cons.rule = "Cons";
        cons.stmt = program;
        cons.pre = *pre;
        cons.post = post;
        cons.premises = {top.id};
        o.steps.push_back(std::move(cons));
        o.pre = *pre;
    }
    return o;
}

ProofOutline read_outline_file(const fs::path& path, Tables& tables,
                               const std::vector<fs::path>& search_dirs, double tol) {
    return OutlineReader(path, tables, search_dirs, tol).read();
}

OutlineReport check_outline(const ProofOutline& o, const Tables& tables,
                            const HoareOptions& opts) {
    opts.validate();
    return OutlineChecker(o, tables, opts).run();
}

}  // namespace qhl
