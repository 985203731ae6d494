// Quantum-specific checks on dense matrices: Hermitian eigensolve, PSD and
// Loewner tests, unitarity, density matrices, predicates, Kraus maps.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qhl/matrix.hpp"

namespace qhl {

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    CMatrix vectors;             // column k belongs to values[k]
};

bool is_hermitian(const CMatrix& a, double tol = kDefaultTol);

/// Eigenvalues of a Hermitian matrix, ascending. Cyclic complex Jacobi.
std::vector<double> eig_hermitian(const CMatrix& a, double tol = kDefaultTol);
EigenDecomposition eigh(const CMatrix& a, double tol = kDefaultTol);

/// min eigenvalue >= -tol * max(1, |a|_max)
bool is_psd(const CMatrix& a, double tol = kDefaultTol);

/// p ⊑ q in the Loewner order: q - p is PSD within tol.
bool loewner_leq(const CMatrix& p, const CMatrix& q, double tol = kDefaultTol);

bool is_unitary(const CMatrix& u, double tol = kDefaultTol);

/// Hermitian PSD matrix with trace in [0, 1] (subdistributions allowed).
class DensityMatrix {
public:
    explicit DensityMatrix(CMatrix mat, double tol = kDefaultTol);

    /// Skips validation; for results of maps known to preserve the invariant.
    static DensityMatrix assume_valid(CMatrix mat, double tol = kDefaultTol);

    const CMatrix& matrix() const noexcept { return mat_; }
    double tol() const noexcept { return tol_; }
    std::size_t dim() const noexcept { return mat_.rows(); }
    double trace() const { return qhl::trace(mat_).real(); }

private:
    struct Unchecked {};
    DensityMatrix(Unchecked, CMatrix mat, double tol) : mat_(std::move(mat)), tol_(tol) {}

    CMatrix mat_;
    double tol_;
};

/// Hermitian P with 0 ⊑ P ⊑ I.
class QuantumPredicate {
public:
    explicit QuantumPredicate(CMatrix mat, double tol = kDefaultTol);

    static QuantumPredicate assume_valid(CMatrix mat, double tol = kDefaultTol);

    const CMatrix& matrix() const noexcept { return mat_; }
    double tol() const noexcept { return tol_; }
    std::size_t dim() const noexcept { return mat_.rows(); }

private:
    struct Unchecked {};
    QuantumPredicate(Unchecked, CMatrix mat, double tol) : mat_(std::move(mat)), tol_(tol) {}

    CMatrix mat_;
    double tol_;
};

/// Symmetrize and clamp eigenvalues into [0, 1]. Returns the largest amount
/// any eigenvalue moved.
double clamp_to_predicate(CMatrix& mat);

/// rho ↦ Σ E_i rho E_i^dagger with Σ E_i^dagger E_i ⊑ I. Operators may be
/// non-square; all share one shape (out_dim x in_dim).
class KrausMap {
public:
    explicit KrausMap(std::vector<CMatrix> ops, double tol = kDefaultTol);

    /// Shape checks only; the sub-unital bound is the caller's guarantee.
    static KrausMap assume_valid(std::vector<CMatrix> ops);
    static KrausMap identity(std::size_t dim);

    const std::vector<CMatrix>& ops() const noexcept { return ops_; }
    std::size_t in_dim() const noexcept { return ops_.front().cols(); }
    std::size_t out_dim() const noexcept { return ops_.front().rows(); }
    std::size_t size() const noexcept { return ops_.size(); }

    /// Σ E_i^dagger E_i
    CMatrix completeness() const;
    bool is_admissible(double tol = kDefaultTol) const;

private:
    struct Unchecked {};
    KrausMap(Unchecked, std::vector<CMatrix> ops);

    std::vector<CMatrix> ops_;
};

CMatrix apply_kraus(const KrausMap& k, const CMatrix& rho);
DensityMatrix apply_kraus(const KrausMap& k, const DensityMatrix& rho);
/// Σ E_i^dagger q E_i: the Heisenberg-picture dual.
CMatrix apply_kraus_dual(const KrausMap& k, const CMatrix& q);

/// Places op on the tensor factors at the given positions (in the given
/// order), identity elsewhere. Factor 0 is the most significant.
CMatrix embed_at(const CMatrix& op, std::span<const std::size_t> positions,
                 std::span<const std::size_t> factor_dims);

std::size_t product_of(std::span<const std::size_t> dims);

DensityMatrix random_density(std::size_t dim, std::uint64_t seed);
CMatrix random_unitary(std::size_t dim, std::uint64_t seed);
/// Random Hermitian matrix with 0 ⊑ P ⊑ I.
CMatrix random_predicate(std::size_t dim, std::uint64_t seed);

}  // namespace qhl
