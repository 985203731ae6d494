// Writes the sample programs, matrices and outlines used by the CLI tests.
//   make_samples <dir>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <algorithm>

#include <json.hpp>

#include "qhl/casestudy.hpp"
#include "qhl/exchange.hpp"
#include "qhl/hoare.hpp"
#include "qhl/parser.hpp"

using namespace qhl;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (!out) {
        throw std::runtime_error("cannot write " + p.string());
    }
}

// Serializes an outline, storing each distinct predicate once under preds/.
// Predicates listed in known keep their names and point at <name>.mat.
nlohmann::ordered_json outline_json(const ProofOutline& o, const std::string& program,
                                    const fs::path& dir, const std::string& prefix,
                                    const std::vector<std::pair<CMatrix, std::string>>& known = {}) {
    std::vector<std::pair<CMatrix, std::string>> seen = known;
    auto name_of = [&](const CMatrix& m) {
        for (const auto& [mat, name] : seen) {
            if (max_abs_diff(mat, m) < 1e-15) {
                return name;
            }
        }
        const std::string name = prefix + std::to_string(seen.size() - known.size());
        seen.emplace_back(m, name);
        return name;
    };
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
    for (const OutlineStep& s : o.steps) {
        nlohmann::ordered_json j;
        j["id"] = s.id;
        j["rule"] = s.rule;
        if (s.stmt) {
            j["stmt"] = print(*s.stmt);
        }
        j["pre"] = name_of(s.pre);
        j["post"] = name_of(s.post);
        if (!s.premises.empty()) {
            j["premises"] = s.premises;
        }
        steps.push_back(std::move(j));
    }
    const std::string pre = name_of(*o.pre);
    const std::string post = name_of(*o.post);
    nlohmann::ordered_json preds;
    fs::create_directories(dir / "preds");
    for (const auto& [m, name] : seen) {
        if (std::find_if(known.begin(), known.end(),
                         [&](const auto& k) { return k.second == name; }) != known.end()) {
            preds[name] = name + ".mat";
            continue;
        }
        const std::string file = "preds/" + name + ".json";
        write_matrix_file(dir / file, m);
        preds[name] = file;
    }
    nlohmann::ordered_json doc;
    doc["program"] = program;
    doc["predicates"] = preds;
    doc["pre"] = pre;
    doc["post"] = post;
    doc["steps"] = steps;
    return doc;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_samples <dir>\n";
        return 2;
    }
    const fs::path dir = argv[1];
    fs::create_directories(dir);

    // Deutsch-Jozsa, k = 2, f = 1.
    const DjProgram dj = dj_program(BooleanOracle::parse("constant1", 2), Dialect::YingCore);
    write_text(dir / "dj.qpl", "# Deutsch-Jozsa core, k = 2, f = 1\n" + print(dj.ctx, *dj.body) + "\n");
    for (const std::string g : {"H2", "H3", "Uf"}) {
        write_matrix_file(dir / (g + ".mat"), *dj.tables.gates.lookup(g, 0));
    }
    write_matrix_file(dir / "I8.mat", CMatrix::identity(8));
    write_matrix_file(dir / "T.mat", dj_target(2));
    write_matrix_file(dir / "zero8.mat", CMatrix::outer_basis(0, 0, 8));
    const ProofOutline o =
        derive_outline(dj.ctx, dj.body, dj_target(2), CMatrix::identity(8), dj.tables);
    write_text(dir / "dj_outline.json", outline_json(o, "dj.qpl", dir, "P",
                                                 {{dj_target(2), "T"}, {CMatrix::identity(8), "I8"}}).dump(2) + "\n");

    // QPL form with measurement into bits; starts from the empty context.
    const DjProgram djq = dj_program(BooleanOracle::parse("balanced:0110", 2), Dialect::Qpl);
    fs::create_directories(dir / "parity");
    write_text(dir / "parity" / "dj_bits.qpl",
               "# Deutsch-Jozsa with measured bits, k = 2, f = parity\n" + print(djq.ctx, *djq.body) +
                   "\n");
    for (const std::string g : {"H2", "H3", "Uf"}) {
        write_matrix_file(dir / "parity" / (g + ".mat"), *djq.tables.gates.lookup(g, 0));
    }
    write_matrix_file(dir / "scalar1.mat", CMatrix::identity(1));

    // One-qubit programs.
    write_text(dir / "flip.qpl", "var q: qbit;\nq *= X\n");
    write_text(dir / "hadamard.qpl", "var q: qbit;\nq *= H\n");
    write_text(dir / "coin.qpl", "# repeat H until the qubit reads 0\nvar q: qbit;\nwhile std(q) = 1 do q *= H od\n");
    write_text(dir / "spin.qpl", "# diverges on |1>\nvar q: qbit;\nwhile std(q) = 1 do skip od\n");
    write_text(dir / "reset.qpl", "var q: qbit;\nwhile std(q) = 1 do q := 0 od\n");
    write_text(dir / "bad_type.qpl", "var q: qbit;\nif q then skip else skip fi\n");
    write_text(dir / "bad_syntax.qpl", "var q: qbit;\nq *= \n");
    write_matrix_file(dir / "I.mat", CMatrix::identity(2));
    write_matrix_file(dir / "zero.mat", CMatrix::outer_basis(0, 0, 2));
    write_matrix_file(dir / "one.mat", CMatrix::outer_basis(1, 1, 2));
    write_matrix_file(dir / "plus.mat", CMatrix{{0.5, 0.5}, {0.5, 0.5}});
    write_matrix_file(dir / "half.mat", CMatrix::identity(2) * 0.5);
    write_matrix_file(dir / "not_a_state.mat", CMatrix::identity(2));

    // An outline whose Unit step has the wrong precondition.
    const VarContext q({make_qbit("q")});
    ProofOutline bad{q, apply_gate({"q"}, "H"), CMatrix::identity(2), CMatrix::outer_basis(0, 0, 2), {}};
    bad.steps.push_back({"s1", "Unit", apply_gate({"q"}, "H"), CMatrix::identity(2),
                         CMatrix::outer_basis(0, 0, 2), {}});
    write_text(dir / "bad_outline.json", outline_json(bad, "hadamard.qpl", dir, "B").dump(2) + "\n");
    return 0;
}
