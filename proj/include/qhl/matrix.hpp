// Dense complex matrices: the carrier for states, gates, and predicates.
#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qhl {

using Complex = std::complex<double>;

/// Default tolerance wherever a caller does not supply one.
inline constexpr double kDefaultTol = 1e-9;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Row-major dense complex matrix. Every entry is finite.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);
    CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
    CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix zero(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }
    static CMatrix diagonal(std::span<const Complex> diag);
    /// Column vector |index> in a space of dimension dim.
    static CMatrix ket(std::size_t index, std::size_t dim);
    /// |row><col| in a space of dimension dim.
    static CMatrix outer_basis(std::size_t row, std::size_t col, std::size_t dim);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const Complex> data() const noexcept { return data_; }
    std::span<Complex> data() noexcept { return data_; }

    CMatrix& operator+=(const CMatrix& other);
    CMatrix& operator-=(const CMatrix& other);
    CMatrix& operator*=(Complex scalar);

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
    friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }
    friend CMatrix operator*(const CMatrix& a, const CMatrix& b);

    /// Exact entrywise comparison.
    friend bool operator==(const CMatrix& a, const CMatrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

CMatrix kron(const CMatrix& a, const CMatrix& b);
/// Conjugate transpose.
CMatrix dagger(const CMatrix& a);
Complex trace(const CMatrix& a);
/// tr(a * b) without forming the product.
Complex trace_of_product(const CMatrix& a, const CMatrix& b);
/// Max-norm: largest entry modulus.
double max_abs(const CMatrix& a);
double max_abs_diff(const CMatrix& a, const CMatrix& b);
/// (a + a^dagger) / 2
CMatrix hermitian_part(const CMatrix& a);
/// a^dagger * x * a
CMatrix conjugate_by(const CMatrix& x, const CMatrix& a);

std::string shape_string(const CMatrix& a);

}  // namespace qhl
