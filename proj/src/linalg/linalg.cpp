#include "qhl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace qhl {

namespace {

void require_square(const CMatrix& a, const char* what) {
    if (!a.is_square() || a.empty()) {
        throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                             shape_string(a));
    }
}

void require_hermitian(const CMatrix& a, double tol, const char* what) {
    require_square(a, what);
    if (!is_hermitian(a, tol)) {
        throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
    }
}

double off_diagonal_norm2(const CMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (i != j) {
                s += std::norm(a(i, j));
            }
        }
    }
    return s;
}

// Cyclic Jacobi on a Hermitian matrix. Each rotation is a phase on column q
// that makes a_pq real followed by a real Givens rotation zeroing it.
EigenDecomposition jacobi(CMatrix a, bool want_vectors) {
    const std::size_t n = a.rows();
    CMatrix v = want_vectors ? CMatrix::identity(n) : CMatrix{};

    double total = 0.0;
    for (const Complex& z : a.data()) {
        total += std::norm(z);
    }
    const double stop = std::max(total, 1e-300) * 1e-30;

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm2(a) <= stop) {
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex z = a(p, q);
                const double r = std::abs(z);
                if (r == 0.0) {
                    continue;
                }
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = 0.5 * std::atan2(2.0 * r, aqq - app);
                const double c = std::cos(theta);
                const double s = std::sin(theta);
                const Complex phase = std::conj(z) / r;  // e^{-i phi}

                // G = diag(1, phase) * [[c, s], [-s, c]] restricted to (p, q).
                const Complex gpp = c;
                const Complex gpq = s;
                const Complex gqp = -s * phase;
                const Complex gqq = c * phase;

                for (std::size_t k = 0; k < n; ++k) {  // A <- A G
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * gpp + akq * gqp;
                    a(k, q) = akp * gpq + akq * gqq;
                }
                for (std::size_t k = 0; k < n; ++k) {  // A <- G^dagger A
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
                    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                if (want_vectors) {
                    for (std::size_t k = 0; k < n; ++k) {
                        const Complex vkp = v(k, p);
                        const Complex vkq = v(k, q);
                        v(k, p) = vkp * gpp + vkq * gqp;
                        v(k, q) = vkp * gpq + vkq * gqq;
                    }
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i).real() < a(j, j).real();
    });

    EigenDecomposition out;
    out.values.reserve(n);
    for (std::size_t i : order) {
        out.values.push_back(a(i, i).real());
    }
    if (want_vectors) {
        out.vectors = CMatrix(n, n);
        for (std::size_t col = 0; col < n; ++col) {
            for (std::size_t k = 0; k < n; ++k) {
                out.vectors(k, col) = v(k, order[col]);
            }
        }
    }
    return out;
}

double psd_threshold(const CMatrix& a, double tol) {
    return -tol * std::max(1.0, max_abs(a));
}

}  // namespace

bool is_hermitian(const CMatrix& a, double tol) {
    if (!a.is_square()) {
        return false;
    }
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = i; j < a.cols(); ++j) {
            if (std::abs(a(i, j) - std::conj(a(j, i))) > tol) {
                return false;
            }
        }
    }
    return true;
}

std::vector<double> eig_hermitian(const CMatrix& a, double tol) {
    require_hermitian(a, tol, "eig_hermitian");
    return jacobi(hermitian_part(a), false).values;
}

EigenDecomposition eigh(const CMatrix& a, double tol) {
    require_hermitian(a, tol, "eigh");
    return jacobi(hermitian_part(a), true);
}

bool is_psd(const CMatrix& a, double tol) {
    const auto values = eig_hermitian(a, tol);
    return values.front() >= psd_threshold(a, tol);
}

bool loewner_leq(const CMatrix& p, const CMatrix& q, double tol) {
    require_hermitian(p, tol, "loewner_leq");
    require_hermitian(q, tol, "loewner_leq");
    if (p.rows() != q.rows()) {
        throw DimensionError("loewner_leq: dimension mismatch " + shape_string(p) + " vs " +
                             shape_string(q));
    }
    return is_psd(q - p, tol);
}

bool is_unitary(const CMatrix& u, double tol) {
    require_square(u, "is_unitary");
    return max_abs_diff(dagger(u) * u, CMatrix::identity(u.rows())) <= tol;
}

DensityMatrix::DensityMatrix(CMatrix mat, double tol) : mat_(std::move(mat)), tol_(tol) {
    if (tol < 0.0) {
        throw std::invalid_argument("density matrix: negative tolerance");
    }
    require_square(mat_, "density matrix");
    if (!is_hermitian(mat_, tol)) {
        throw std::invalid_argument("density matrix is not Hermitian");
    }
    if (!is_psd(mat_, tol)) {
        throw std::invalid_argument("density matrix is not positive semidefinite");
    }
    const double tr = qhl::trace(mat_).real();
    if (tr < -tol || tr > 1.0 + tol) {
        throw std::invalid_argument("density matrix trace " + std::to_string(tr) +
                                    " outside [0, 1]");
    }
}

DensityMatrix DensityMatrix::assume_valid(CMatrix mat, double tol) {
    require_square(mat, "density matrix");
    return DensityMatrix(Unchecked{}, std::move(mat), tol);
}

QuantumPredicate::QuantumPredicate(CMatrix mat, double tol) : mat_(std::move(mat)), tol_(tol) {
    if (tol < 0.0) {
        throw std::invalid_argument("predicate: negative tolerance");
    }
    require_square(mat_, "predicate");
    if (!is_hermitian(mat_, tol)) {
        throw std::invalid_argument("predicate is not Hermitian");
    }
    const auto values = eig_hermitian(mat_, tol);
    const double slack = tol * std::max(1.0, max_abs(mat_));
    if (values.front() < -slack) {
        throw std::invalid_argument("predicate is not above 0 in the Loewner order");
    }
    if (values.back() > 1.0 + slack) {
        throw std::invalid_argument("predicate is not below I in the Loewner order");
    }
}

QuantumPredicate QuantumPredicate::assume_valid(CMatrix mat, double tol) {
    require_square(mat, "predicate");
    return QuantumPredicate(Unchecked{}, std::move(mat), tol);
}

double clamp_to_predicate(CMatrix& mat) {
    const CMatrix sym = hermitian_part(mat);
    EigenDecomposition ed = jacobi(sym, true);
    double moved = 0.0;
    bool changed = false;
    for (double& lambda : ed.values) {
        const double clamped = std::clamp(lambda, 0.0, 1.0);
        moved = std::max(moved, std::abs(clamped - lambda));
        if (clamped != lambda) {
            changed = true;
            lambda = clamped;
        }
    }
    if (!changed) {
        mat = sym;
        return 0.0;
    }
    const std::size_t n = sym.rows();
    CMatrix rebuilt(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const Complex vik = ed.vectors(i, k) * ed.values[k];
            for (std::size_t j = 0; j < n; ++j) {
                rebuilt(i, j) += vik * std::conj(ed.vectors(j, k));
            }
        }
    }
    mat = hermitian_part(rebuilt);
    return moved;
}

KrausMap::KrausMap(Unchecked, std::vector<CMatrix> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) {
        throw std::invalid_argument("Kraus map needs at least one operator");
    }
    for (const CMatrix& e : ops_) {
        if (e.empty() || e.rows() != ops_.front().rows() || e.cols() != ops_.front().cols()) {
            throw DimensionError("Kraus operators must share one shape");
        }
    }
}

KrausMap::KrausMap(std::vector<CMatrix> ops, double tol) : KrausMap(Unchecked{}, std::move(ops)) {
    const CMatrix sum = completeness();
    if (!loewner_leq(sum, CMatrix::identity(in_dim()), tol)) {
        throw std::invalid_argument("Kraus operators are not trace non-increasing");
    }
}

KrausMap KrausMap::assume_valid(std::vector<CMatrix> ops) {
    return KrausMap(Unchecked{}, std::move(ops));
}

KrausMap KrausMap::identity(std::size_t dim) {
    return assume_valid({CMatrix::identity(dim)});
}

CMatrix KrausMap::completeness() const {
    CMatrix sum(in_dim(), in_dim());
    for (const CMatrix& e : ops_) {
        sum += dagger(e) * e;
    }
    return sum;
}

bool KrausMap::is_admissible(double tol) const {
    return max_abs_diff(completeness(), CMatrix::identity(in_dim())) <= tol;
}

CMatrix apply_kraus(const KrausMap& k, const CMatrix& rho) {
    if (rho.rows() != k.in_dim() || rho.cols() != k.in_dim()) {
        throw DimensionError("apply_kraus: state " + shape_string(rho) +
                             " does not match map input dimension " +
                             std::to_string(k.in_dim()));
    }
    CMatrix out(k.out_dim(), k.out_dim());
    for (const CMatrix& e : k.ops()) {
        out += e * rho * dagger(e);
    }
    return out;
}

DensityMatrix apply_kraus(const KrausMap& k, const DensityMatrix& rho) {
    return DensityMatrix::assume_valid(apply_kraus(k, rho.matrix()), rho.tol());
}

CMatrix apply_kraus_dual(const KrausMap& k, const CMatrix& q) {
    if (q.rows() != k.out_dim() || q.cols() != k.out_dim()) {
        throw DimensionError("apply_kraus_dual: predicate " + shape_string(q) +
                             " does not match map output dimension " +
                             std::to_string(k.out_dim()));
    }
    CMatrix out(k.in_dim(), k.in_dim());
    for (const CMatrix& e : k.ops()) {
        out += conjugate_by(q, e);
    }
    return out;
}

std::size_t product_of(std::span<const std::size_t> dims) {
    std::size_t p = 1;
    for (std::size_t d : dims) {
        p *= d;
    }
    return p;
}

CMatrix embed_at(const CMatrix& op, std::span<const std::size_t> positions,
                 std::span<const std::size_t> factor_dims) {
    const std::size_t nfactors = factor_dims.size();
    std::vector<bool> selected(nfactors, false);
    for (std::size_t pos : positions) {
        if (pos >= nfactors) {
            throw DimensionError("embed_at: position " + std::to_string(pos) + " out of range");
        }
        if (selected[pos]) {
            throw DimensionError("embed_at: duplicate position " + std::to_string(pos));
        }
        selected[pos] = true;
    }
    std::size_t op_dim = 1;
    for (std::size_t pos : positions) {
        op_dim *= factor_dims[pos];
    }
    if (!op.is_square() || op.rows() != op_dim) {
        throw DimensionError("embed_at: operator " + shape_string(op) +
                             " does not match target dimension " + std::to_string(op_dim));
    }

    const std::size_t full = product_of(factor_dims);
    // strides[f]: weight of factor f's digit in the full index.
    std::vector<std::size_t> strides(nfactors, 1);
    for (std::size_t f = nfactors; f-- > 1;) {
        strides[f - 1] = strides[f] * factor_dims[f];
    }

    // Split every full index into (selected index, rest index).
    std::vector<std::size_t> sel_index(full), rest_index(full);
    for (std::size_t idx = 0; idx < full; ++idx) {
        std::size_t s = 0;
        for (std::size_t pos : positions) {
            s = s * factor_dims[pos] + (idx / strides[pos]) % factor_dims[pos];
        }
        std::size_t r = 0;
        for (std::size_t f = 0; f < nfactors; ++f) {
            if (!selected[f]) {
                r = r * factor_dims[f] + (idx / strides[f]) % factor_dims[f];
            }
        }
        sel_index[idx] = s;
        rest_index[idx] = r;
    }

    CMatrix out(full, full);
    for (std::size_t i = 0; i < full; ++i) {
        for (std::size_t j = 0; j < full; ++j) {
            if (rest_index[i] == rest_index[j]) {
                out(i, j) = op(sel_index[i], sel_index[j]);
            }
        }
    }
    return out;
}

namespace {

CMatrix gaussian_matrix(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMatrix g(dim, dim);
    for (Complex& z : g.data()) {
        const double re = normal(rng);
        const double im = normal(rng);
        z = Complex(re, im);
    }
    return g;
}

}  // namespace

DensityMatrix random_density(std::size_t dim, std::uint64_t seed) {
    if (dim == 0) {
        throw DimensionError("random_density: dimension must be positive");
    }
    std::mt19937_64 rng(seed);
    const CMatrix g = gaussian_matrix(dim, rng);
    CMatrix rho = g * dagger(g);
    rho *= 1.0 / trace(rho).real();
    return DensityMatrix::assume_valid(hermitian_part(rho));
}

CMatrix random_unitary(std::size_t dim, std::uint64_t seed) {
    if (dim == 0) {
        throw DimensionError("random_unitary: dimension must be positive");
    }
    std::mt19937_64 rng(seed);
    CMatrix u = gaussian_matrix(dim, rng);
    // Modified Gram-Schmidt over columns, two passes for orthogonality.
    for (std::size_t col = 0; col < dim; ++col) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t prev = 0; prev < col; ++prev) {
                Complex dot{};
                for (std::size_t k = 0; k < dim; ++k) {
                    dot += std::conj(u(k, prev)) * u(k, col);
                }
                for (std::size_t k = 0; k < dim; ++k) {
                    u(k, col) -= dot * u(k, prev);
                }
            }
        }
        double norm = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            norm += std::norm(u(k, col));
        }
        norm = std::sqrt(norm);
        for (std::size_t k = 0; k < dim; ++k) {
            u(k, col) /= norm;
        }
    }
    return u;
}

CMatrix random_predicate(std::size_t dim, std::uint64_t seed) {
    const CMatrix u = random_unitary(dim, seed);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Complex> diag(dim);
    for (Complex& d : diag) {
        d = unit(rng);
    }
    return hermitian_part(u * CMatrix::diagonal(diag) * dagger(u));
}

}  // namespace qhl
