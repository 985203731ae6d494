#include "qhl/tables.hpp"

#include <cmath>
#include <set>

#include "common/json_matrix.hpp"
#include "common/overloaded.hpp"
#include "qhl/exchange.hpp"
#include "qhl/linalg.hpp"

namespace qhl {

namespace gates {

CMatrix hadamard() {
    const double h = 1.0 / std::sqrt(2.0);
    return CMatrix{{h, h}, {h, -h}};
}

CMatrix pauli_x() { return CMatrix{{0.0, 1.0}, {1.0, 0.0}}; }

CMatrix pauli_y() {
    const Complex i{0.0, 1.0};
    return CMatrix{{0.0, -i}, {i, 0.0}};
}

CMatrix pauli_z() { return CMatrix{{1.0, 0.0}, {0.0, -1.0}}; }

CMatrix phase_s() { return CMatrix{{1.0, 0.0}, {0.0, Complex{0.0, 1.0}}}; }

CMatrix cnot() {
    return CMatrix{{1.0, 0.0, 0.0, 0.0},
                   {0.0, 1.0, 0.0, 0.0},
                   {0.0, 0.0, 0.0, 1.0},
                   {0.0, 0.0, 1.0, 0.0}};
}

}  // namespace gates

GateTable GateTable::builtins() {
    GateTable t;
    t.add("H", gates::hadamard());
    t.add("X", gates::pauli_x());
    t.add("N", gates::pauli_x());
    t.add("Y", gates::pauli_y());
    t.add("Z", gates::pauli_z());
    t.add("S", gates::phase_s());
    t.add("CNOT", gates::cnot());
    return t;
}

void GateTable::add(const std::string& name, CMatrix gate, double tol) {
    if (name == "I") {
        throw std::invalid_argument("gate name 'I' is reserved");
    }
    if (!gate.is_square() || gate.empty()) {
        throw std::invalid_argument("gate '" + name + "' is not square");
    }
    if (!is_unitary(gate, tol)) {
        throw std::invalid_argument("gate '" + name + "' is not unitary");
    }
    gates_[name] = std::move(gate);
}

bool GateTable::contains(const std::string& name) const {
    return name == "I" || gates_.contains(name);
}

std::optional<CMatrix> GateTable::lookup(const std::string& name, std::size_t target_dim) const {
    if (name == "I") {
        return CMatrix::identity(target_dim);
    }
    const auto it = gates_.find(name);
    if (it == gates_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<CMatrix> standard_measurement(std::size_t dim) {
    std::vector<CMatrix> out;
    out.reserve(dim);
    for (std::size_t m = 0; m < dim; ++m) {
        out.push_back(CMatrix::outer_basis(m, m, dim));
    }
    return out;
}

MeasTable MeasTable::builtins() { return MeasTable{}; }

void MeasTable::add(const std::string& name, std::vector<CMatrix> outcomes, double tol) {
    if (name == "std") {
        throw std::invalid_argument("measurement name 'std' is reserved");
    }
    if (outcomes.empty()) {
        throw std::invalid_argument("measurement '" + name + "' has no outcomes");
    }
    const std::size_t dim = outcomes.front().rows();
    CMatrix sum(dim, dim);
    for (const CMatrix& m : outcomes) {
        if (!m.is_square() || m.rows() != dim) {
            throw std::invalid_argument("measurement '" + name + "' mixes operator shapes");
        }
        sum += dagger(m) * m;
    }
    if (max_abs_diff(sum, CMatrix::identity(dim)) > tol) {
        throw std::invalid_argument("measurement '" + name + "' is not complete");
    }
    meas_[name] = std::move(outcomes);
}

bool MeasTable::contains(const std::string& name) const {
    return name == "std" || meas_.contains(name);
}

std::optional<std::vector<CMatrix>> MeasTable::lookup(const std::string& name,
                                                      std::size_t target_dim) const {
    if (name == "std") {
        return standard_measurement(target_dim);
    }
    const auto it = meas_.find(name);
    if (it == meas_.end()) {
        return std::nullopt;
    }
    return it->second;
}

namespace {

nlohmann::json parse_json_file(const std::filesystem::path& path) {
    try {
        return nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::vector<CMatrix> outcomes_from_json(const nlohmann::json& list, const std::string& where) {
    if (!list.is_array() || list.empty()) {
        throw FormatError(where + ": measurement outcomes must be a nonempty array");
    }
    std::vector<CMatrix> out;
    for (const auto& m : list) {
        out.push_back(detail::matrix_from_json(m));
    }
    return out;
}

void collect_names(const Command& c, std::set<std::string>& gate_names,
                   std::set<std::string>& meas_names) {
    std::visit(detail::overloaded{
                   [&](const Seq& s) {
                       collect_names(*s.first, gate_names, meas_names);
                       collect_names(*s.second, gate_names, meas_names);
                   },
                   [&](const ApplyU& u) { gate_names.insert(u.gate); },
                   [&](const MeasureCase& m) {
                       meas_names.insert(m.meas);
                       for (const auto& b : m.branches) {
                           collect_names(*b, gate_names, meas_names);
                       }
                   },
                   [&](const While& w) {
                       meas_names.insert(w.meas);
                       collect_names(*w.body, gate_names, meas_names);
                   },
                   [&](const IfBit& i) {
                       collect_names(*i.on_zero, gate_names, meas_names);
                       collect_names(*i.on_one, gate_names, meas_names);
                   },
                   [&](const MeasureIf& i) {
                       collect_names(*i.on_zero, gate_names, meas_names);
                       collect_names(*i.on_one, gate_names, meas_names);
                   },
                   [](const auto&) {},
               },
               c.node);
}

}  // namespace

void load_table_file(const std::filesystem::path& path, Tables& tables, double tol) {
    const nlohmann::json doc = parse_json_file(path);
    if (!doc.is_object()) {
        throw FormatError(path.string() + ": table document must be an object");
    }
    try {
        if (const auto g = doc.find("gates"); g != doc.end()) {
            for (const auto& [name, m] : g->items()) {
                tables.gates.add(name, detail::matrix_from_json(m), tol);
            }
        }
        if (const auto ms = doc.find("measurements"); ms != doc.end()) {
            for (const auto& [name, list] : ms->items()) {
                tables.meas.add(name, outcomes_from_json(list, path.string()), tol);
            }
        }
    } catch (const std::invalid_argument& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void load_sidecars(const Command& program, const std::vector<std::filesystem::path>& search_dirs,
                   Tables& tables, double tol) {
    std::set<std::string> gate_names, meas_names;
    collect_names(program, gate_names, meas_names);

    for (const std::string& name : gate_names) {
        if (tables.gates.contains(name)) {
            continue;
        }
        for (const auto& dir : search_dirs) {
            const auto file = dir / (name + ".mat");
            if (std::filesystem::exists(file)) {
                try {
                    tables.gates.add(name, read_matrix_file(file), tol);
                } catch (const std::invalid_argument& e) {
                    throw FormatError(file.string() + ": " + e.what());
                }
                break;
            }
        }
    }
    for (const std::string& name : meas_names) {
        if (tables.meas.contains(name)) {
            continue;
        }
        for (const auto& dir : search_dirs) {
            const auto file = dir / (name + ".meas");
            if (std::filesystem::exists(file)) {
                const nlohmann::json doc = parse_json_file(file);
                const auto list = doc.find("outcomes");
                if (!doc.is_object() || list == doc.end()) {
                    throw FormatError(file.string() + ": missing 'outcomes'");
                }
                try {
                    tables.meas.add(name, outcomes_from_json(*list, file.string()), tol);
                } catch (const std::invalid_argument& e) {
                    throw FormatError(file.string() + ": " + e.what());
                }
                break;
            }
        }
    }
}

}  // namespace qhl
