// Small dense matrices and a symmetric eigensolver.
//
// The eigensolver is the classical two-stage scheme: Householder reduction to
// tridiagonal form followed by implicit-shift QL iterations. Storage is
// column-major so the inner loops of both stages walk contiguous memory.
#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sphint {

using Complex = std::complex<double>;

template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }
  static DenseMatrix diagonal(std::span<const double> d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = T{d[i]};
    return m;
  }
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<T>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  // Contiguous view of column j.
  std::span<T> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const T> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  std::vector<T>& raw() { return data_; }
  const std::vector<T>& raw() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T>
DenseMatrix<T> DenseMatrix<T>::from_rows(std::initializer_list<std::initializer_list<T>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  DenseMatrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (const auto& v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

using Matrix = DenseMatrix<double>;
using CMatrix = DenseMatrix<Complex>;

Matrix multiply(const Matrix& a, const Matrix& b);
CMatrix multiply(const CMatrix& a, const CMatrix& b);
Matrix transpose(const Matrix& a);
CMatrix adjoint(const CMatrix& a);
Matrix add(const Matrix& a, const Matrix& b);
double max_abs(const Matrix& a);
double frobenius_norm(const Matrix& a);
double trace(const Matrix& a);

// Largest |a(i,j) - a(j,i)|, or |a(i,j) - conj(a(j,i))| for complex input.
double asymmetry(const Matrix& a);
double asymmetry(const CMatrix& a);

struct SymEigen {
  std::vector<double> values;  // non-increasing
  Matrix vectors;              // column j pairs with values[j]; empty unless requested
};

// Largest dimension accepted by eig_sym (complex input counts twice).
inline constexpr std::size_t kEigDimensionCap = 2048;

// Full spectrum of a real symmetric matrix. Throws std::invalid_argument if
// the input is not square, not symmetric to 1e-10 relative to its largest
// entry, or larger than kEigDimensionCap.
SymEigen eig_sym(const Matrix& a, bool want_vectors = false);

// Spectrum of a Hermitian matrix via its real 2n x 2n embedding
// [[Re, -Im], [Im, Re]], whose eigenvalues are those of `a` doubled.
std::vector<double> eig_hermitian(const CMatrix& a);

// V diag(f(values)) V^T for a symmetric matrix.
template <class F>
Matrix spectral_apply(const SymEigen& eig, F&& f) {
  const std::size_t n = eig.values.size();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(eig.values[k]);
    if (fk == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double vjk = fk * eig.vectors(j, k);
      for (std::size_t i = 0; i < n; ++i) out(i, j) += eig.vectors(i, k) * vjk;
    }
  }
  return out;
}

}  // namespace sphint
