#include "sphint/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sphint {

namespace {

template <class T>
DenseMatrix<T> multiply_impl(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: dimension mismatch");
  DenseMatrix<T> out(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto oj = out.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T bkj = b(k, j);
      if (bkj == T{}) continue;
      auto ak = a.col(k);
      for (std::size_t i = 0; i < a.rows(); ++i) oj[i] += ak[i] * bkj;
    }
  }
  return out;
}

// Householder tridiagonalization. On entry v holds the symmetric matrix
// (column-major, n x n). On exit d holds the diagonal, e the subdiagonal in
// e[1..n-1], and v the accumulated orthogonal transform if requested.
void tridiagonalize(std::size_t n, std::vector<double>& v, std::vector<double>& d,
                    std::vector<double>& e, bool accumulate) {
  auto V = [&](std::size_t i, std::size_t j) -> double& { return v[j * n + i]; };
  for (std::size_t j = 0; j < n; ++j) d[j] = V(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
        V(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        V(j, i) = f;
        g = e[j] + V(j, j) * f;
        double* colj = &V(0, j);
        for (std::size_t k = j + 1; k < i; ++k) {
          g += colj[k] * d[k];
          e[k] += colj[k] * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        double* colj = &V(0, j);
        for (std::size_t k = j; k < i; ++k) colj[k] -= (f * e[k] + g * d[k]);
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  if (!accumulate) {
    for (std::size_t j = 0; j < n; ++j) d[j] = V(j, j);
    e[0] = 0.0;
    return;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    V(n - 1, i) = V(i, i);
    V(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = V(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += V(k, i + 1) * V(k, j);
        for (std::size_t k = 0; k <= i; ++k) V(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) V(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = V(n - 1, j);
    V(n - 1, j) = 0.0;
  }
  V(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit-shift QL on the tridiagonal (d, e). Rotations are applied to the
// columns of v when accumulate is set.
void tridiagonal_ql(std::size_t n, std::vector<double>& v, std::vector<double>& d,
                    std::vector<double>& e, bool accumulate) {
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  constexpr double eps = 0x1p-52;
  constexpr int kMaxIter = 64;

  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > kMaxIter) throw std::runtime_error("eig_sym: QL iteration did not converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          if (accumulate) {
            double* vi = &v[ii * n];
            double* vi1 = &v[(ii + 1) * n];
            for (std::size_t k = 0; k < n; ++k) {
              const double t = vi1[k];
              vi1[k] = s * vi[k] + c * t;
              vi[k] = c * vi[k] - s * t;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

}  // namespace

Matrix multiply(const Matrix& a, const Matrix& b) { return multiply_impl(a, b); }
CMatrix multiply(const CMatrix& a, const CMatrix& b) { return multiply_impl(a, b); }

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
  return t;
}

CMatrix adjoint(const CMatrix& a) {
  CMatrix t(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = std::conj(a(i, j));
  return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("add: dimension mismatch");
  Matrix out = a;
  for (std::size_t k = 0; k < out.raw().size(); ++k) out.raw()[k] += b.raw()[k];
  return out;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double x : a.raw()) m = std::max(m, std::abs(x));
  return m;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double x : a.raw()) s += x * x;
  return std::sqrt(s);
}

double trace(const Matrix& a) {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
  return t;
}

double asymmetry(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("asymmetry: matrix is not square");
  double m = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = j + 1; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, j) - a(j, i)));
  return m;
}

double asymmetry(const CMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("asymmetry: matrix is not square");
  double m = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = j; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

SymEigen eig_sym(const Matrix& a, bool want_vectors) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("eig_sym: matrix is not square");
  if (n > kEigDimensionCap)
    throw std::invalid_argument("eig_sym: dimension " + std::to_string(n) + " exceeds cap");
  if (asymmetry(a) > 1e-10 * std::max(1.0, max_abs(a)))
    throw std::invalid_argument("eig_sym: matrix is not symmetric");

  SymEigen out;
  if (n == 0) return out;

  std::vector<double> v = a.raw();
  // Symmetrize so tiny asymmetries cannot bias the lower-triangle reduction.
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i) {
      const double s = 0.5 * (v[j * n + i] + v[i * n + j]);
      v[j * n + i] = s;
      v[i * n + j] = s;
    }
  std::vector<double> d(n), e(n);
  tridiagonalize(n, v, d, e, want_vectors);
  tridiagonal_ql(n, v, d, e, want_vectors);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] > d[y]; });

  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.values[k] = d[order[k]];
  if (want_vectors) {
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v[order[k] * n + i];
  }
  return out;
}

std::vector<double> eig_hermitian(const CMatrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("eig_hermitian: matrix is not square");
  double scale = 1.0;
  for (const auto& z : a.raw()) scale = std::max(scale, std::abs(z));
  if (asymmetry(a) > 1e-10 * scale) throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");

  Matrix embed(2 * n, 2 * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const double re = a(i, j).real();
      const double im = a(i, j).imag();
      embed(i, j) = re;
      embed(i + n, j + n) = re;
      embed(i + n, j) = im;
      embed(i, j + n) = -im;
    }
  const auto doubled = eig_sym(embed).values;
  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) values[k] = 0.5 * (doubled[2 * k] + doubled[2 * k + 1]);
  return values;
}

}  // namespace sphint
