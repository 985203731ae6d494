// Named gates and measurements. Tables are explicit values passed to the
// typechecker and the semantics; nothing is global.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qhl/ast.hpp"
#include "qhl/matrix.hpp"

namespace qhl {

namespace gates {
CMatrix hadamard();
CMatrix pauli_x();  // also N
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix phase_s();
/// Control is the first (most significant) qubit.
CMatrix cnot();
}  // namespace gates

/// name -> unitary. "I" is dimension-polymorphic.
class GateTable {
public:
    /// Built-ins: I, H, X, N (= X), Y, Z, S, CNOT.
    static GateTable builtins();

    /// Validates unitarity at tol; throws std::invalid_argument otherwise.
    void add(const std::string& name, CMatrix gate, double tol = kDefaultTol);
    bool contains(const std::string& name) const;
    /// The gate for a target of dimension target_dim; nullopt if unknown.
    std::optional<CMatrix> lookup(const std::string& name, std::size_t target_dim) const;
    const std::map<std::string, CMatrix>& entries() const noexcept { return gates_; }

private:
    std::map<std::string, CMatrix> gates_;
};

/// name -> measurement {M_m} with Σ M_m^dagger M_m = I. "std" is the
/// computational-basis measurement of any dimension.
class MeasTable {
public:
    static MeasTable builtins();

    /// Validates completeness at tol; throws std::invalid_argument otherwise.
    void add(const std::string& name, std::vector<CMatrix> outcomes, double tol = kDefaultTol);
    bool contains(const std::string& name) const;
    std::optional<std::vector<CMatrix>> lookup(const std::string& name,
                                               std::size_t target_dim) const;
    const std::map<std::string, std::vector<CMatrix>>& entries() const noexcept { return meas_; }

private:
    std::map<std::string, std::vector<CMatrix>> meas_;
};

struct Tables {
    GateTable gates = GateTable::builtins();
    MeasTable meas = MeasTable::builtins();
};

std::vector<CMatrix> standard_measurement(std::size_t dim);

/// Loads a combined sidecar document:
///   { "gates": { name: matrix, ... }, "measurements": { name: [matrix, ...] } }
void load_table_file(const std::filesystem::path& path, Tables& tables, double tol = kDefaultTol);

/// Resolves every gate or measurement the program names that the tables do
/// not yet hold, from "<name>.mat" (gate) or "<name>.meas" (measurement,
/// { "outcomes": [matrix, ...] }) in the search directories. Names that are
/// still missing are left for the typechecker to report.
void load_sidecars(const Command& program, const std::vector<std::filesystem::path>& search_dirs,
                   Tables& tables, double tol = kDefaultTol);

}  // namespace qhl
