#include "sphint/randmat.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "sphint/numeric.hpp"

namespace sphint {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

void require_beta(int beta) {
  if (beta != 1 && beta != 2) throw std::invalid_argument("beta must be 1 or 2");
}

// Modified Gram-Schmidt with one reorthogonalization pass per column.
template <class T, class Dot>
void orthonormalize_columns(DenseMatrix<T>& g, Dot dot) {
  const std::size_t n = g.rows();
  for (std::size_t j = 0; j < g.cols(); ++j) {
    auto cj = g.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t p = 0; p < j; ++p) {
        auto cp = g.col(p);
        const T c = dot(cp, cj);
        for (std::size_t i = 0; i < n; ++i) cj[i] -= c * cp[i];
      }
    const double norm = std::sqrt(std::abs(dot(cj, cj)));
    if (!(norm > 0.0)) throw std::runtime_error("haar_columns: degenerate Gaussian draw");
    for (std::size_t i = 0; i < n; ++i) cj[i] /= norm;
  }
}

}  // namespace

DeformationSpec DeformationSpec::from(std::vector<double> thetas) {
  for (double t : thetas)
    if (!std::isfinite(t)) throw std::invalid_argument("DeformationSpec: non-finite temperature");
  std::sort(thetas.begin(), thetas.end(), std::greater<>());
  return {std::move(thetas)};
}

std::size_t DeformationSpec::l() const {
  return static_cast<std::size_t>(std::count_if(thetas.begin(), thetas.end(), [](double t) { return t >= 0.0; }));
}

double draw_entry(EntryLaw law, Rng& rng) {
  switch (law) {
    case EntryLaw::Gaussian:
      return rng.gaussian();
    case EntryLaw::Rademacher:
      return rng.sign();
    case EntryLaw::UniformSym:
      return kSqrt3 * (2.0 * rng.uniform01() - 1.0);
  }
  return 0.0;
}

double entry_log_mgf(EntryLaw law, double t) {
  const double a = std::abs(t);
  switch (law) {
    case EntryLaw::Gaussian:
      return 0.5 * t * t;
    case EntryLaw::Rademacher:
      // ln cosh a, stable for large a.
      return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
    case EntryLaw::UniformSym: {
      // ln(sinh(s)/s) with s = sqrt(3)|t|. The series sinh(s)/s >= 1 + s^2/6
      // termwise dominated by exp(s^2/6) is what makes this law sharp
      // sub-Gaussian: s^2/6 = t^2/2.
      const double s = kSqrt3 * a;
      if (s < 1e-4) return s * s / 6.0 - s * s * s * s / 180.0;
      return s - std::log(2.0 * s) + std::log1p(-std::exp(-2.0 * s));
    }
  }
  return 0.0;
}

Matrix sample_wigner_real(const EnsembleSpec& spec) {
  if (spec.beta != 1) throw std::invalid_argument("sample_wigner_real: beta must be 1");
  const std::size_t n = spec.n;
  Rng rng(spec.seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Matrix x(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) {
      const double z = draw_entry(spec.law, rng) * scale;
      if (i == j) {
        x(i, i) = std::sqrt(2.0) * z;
      } else {
        x(i, j) = z;
        x(j, i) = z;
      }
    }
  return x;
}

CMatrix sample_wigner_complex(const EnsembleSpec& spec) {
  if (spec.beta != 2) throw std::invalid_argument("sample_wigner_complex: beta must be 2");
  const std::size_t n = spec.n;
  Rng rng(spec.seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CMatrix x(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) {
      if (i == j) {
        x(i, i) = draw_entry(spec.law, rng) * scale;
      } else {
        const double re = draw_entry(spec.law, rng);
        const double im = draw_entry(spec.law, rng);
        const Complex z = Complex(re, im) * (scale / std::sqrt(2.0));
        x(i, j) = z;
        x(j, i) = std::conj(z);
      }
    }
  return x;
}

Matrix sample_gaussian_invariant(const EnsembleSpec& spec) {
  if (spec.law != EntryLaw::Gaussian) throw std::invalid_argument("sample_gaussian_invariant: law must be Gaussian");
  return sample_wigner_real(spec);
}

CMatrix sample_gaussian_invariant_complex(const EnsembleSpec& spec) {
  if (spec.law != EntryLaw::Gaussian)
    throw std::invalid_argument("sample_gaussian_invariant_complex: law must be Gaussian");
  return sample_wigner_complex(spec);
}

Matrix sample_wigner(const EnsembleSpec& spec) {
  if (spec.law == EntryLaw::Gaussian) throw std::invalid_argument("sample_wigner: law must be sharp sub-Gaussian");
  return sample_wigner_real(spec);
}

std::vector<double> wigner_spectrum(const EnsembleSpec& spec) {
  require_beta(spec.beta);
  if (spec.beta == 1) return eig_sym(sample_wigner_real(spec)).values;
  return eig_hermitian(sample_wigner_complex(spec));
}

Matrix haar_columns(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw std::invalid_argument("haar_columns: k exceeds n");
  Matrix g(n, k);
  for (auto& x : g.raw()) x = rng.gaussian();
  orthonormalize_columns(g, [](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  });
  return g;
}

CMatrix haar_columns_complex(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw std::invalid_argument("haar_columns_complex: k exceeds n");
  CMatrix g(n, k);
  const double s = 1.0 / std::sqrt(2.0);
  for (auto& z : g.raw()) {
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    z = Complex(re * s, im * s);
  }
  orthonormalize_columns(g, [](std::span<const Complex> a, std::span<const Complex> b) {
    Complex acc{};
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
  });
  return g;
}

Matrix sample_haar(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return haar_columns(n, n, rng);
}

CMatrix sample_haar_unitary(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return haar_columns_complex(n, n, rng);
}

Measure extremal_measure(std::span<const double> eigenvalues, std::size_t k) {
  const std::size_t n = eigenvalues.size();
  if (k == 0 || k > n) throw std::invalid_argument("extremal_measure: need 1 <= k <= N");
  std::vector<double> pts;
  pts.reserve(2 * k);
  for (std::size_t i = 0; i < k; ++i) {
    pts.push_back(eigenvalues[i]);
    pts.push_back(eigenvalues[n - 1 - i]);
  }
  return Measure::empirical(pts);
}

SpectrumSample spiked_sample(const EnsembleSpec& ensemble, const DeformationSpec& deform) {
  require_beta(ensemble.beta);
  const std::size_t n = ensemble.n;
  const std::size_t k = deform.k();
  if (k > n) throw std::invalid_argument("spiked_sample: rank exceeds dimension");
  Rng urng(Rng::derive(ensemble.seed, 0x5eed));

  SpectrumSample out;
  if (ensemble.beta == 1) {
    Matrix y = sample_wigner_real(ensemble);
    if (k > 0) {
      const Matrix u = haar_columns(n, k, urng);
      for (std::size_t c = 0; c < k; ++c) {
        const double t = deform.thetas[c];
        auto uc = u.col(c);
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t i = 0; i < n; ++i) y(i, j) += t * uc[i] * uc[j];
      }
    }
    out.eigenvalues = eig_sym(y).values;
  } else {
    CMatrix y = sample_wigner_complex(ensemble);
    if (k > 0) {
      const CMatrix u = haar_columns_complex(n, k, urng);
      for (std::size_t c = 0; c < k; ++c) {
        const double t = deform.thetas[c];
        auto uc = u.col(c);
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t i = 0; i < n; ++i) y(i, j) += t * uc[i] * std::conj(uc[j]);
      }
    }
    out.eigenvalues = eig_hermitian(y);
  }
  out.empirical = Measure::empirical(out.eigenvalues);
  out.extremal = extremal_measure(out.eigenvalues, std::max<std::size_t>(k, 1));
  return out;
}

std::vector<CovarianceRow> quadratic_form_cov_check(std::size_t n, std::size_t replicates, std::uint64_t seed) {
  if (n < 2 || replicates < 3) throw std::invalid_argument("quadratic_form_cov_check: need n >= 2, replicates >= 3");
  const double nd = static_cast<double>(n);
  std::vector<double> e1(n, 1.0 / std::sqrt(nd));
  std::vector<double> w(n, 0.0);
  w[0] = 1.0 / std::sqrt(2.0);
  w[1] = -1.0 / std::sqrt(2.0);
  std::vector<double> half(n);
  for (std::size_t i = 0; i < n; ++i) half[i] = 0.5 * e1[i] + std::sqrt(3.0) / 2.0 * w[i];
  const std::vector<std::vector<double>> partners = {e1, w, half};

  auto form = [&](const Matrix& g, const std::vector<double>& e) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < n; ++i) col += g(i, j) * e[i];
      s += col * e[j];
    }
    return nd / 2.0 * s;
  };

  const std::size_t m = partners.size();
  std::vector<double> h1(replicates);
  std::vector<std::vector<double>> h2(m, std::vector<double>(replicates));
  for (std::size_t r = 0; r < replicates; ++r) {
    const Matrix g = sample_gaussian_invariant({n, 1, EntryLaw::Gaussian, Rng::derive(seed, r)});
    h1[r] = form(g, e1);
    for (std::size_t p = 0; p < m; ++p) h2[p][r] = form(g, partners[p]);
  }

  const double rd = static_cast<double>(replicates);
  auto mean = [&](const std::vector<double>& v) {
    NeumaierSum s;
    for (double x : v) s.add(x);
    return s.value() / rd;
  };
  const double m1 = mean(h1);
  std::vector<CovarianceRow> rows;
  for (std::size_t p = 0; p < m; ++p) {
    const double m2 = mean(h2[p]);
    std::vector<double> prod(replicates);
    for (std::size_t r = 0; r < replicates; ++r) prod[r] = (h1[r] - m1) * (h2[p][r] - m2);
    const double pm = mean(prod);
    NeumaierSum ss;
    for (double x : prod) ss.add((x - pm) * (x - pm));
    CovarianceRow row;
    double overlap = 0.0;
    for (std::size_t i = 0; i < n; ++i) overlap += e1[i] * partners[p][i];
    row.overlap = overlap;
    row.empirical = pm * rd / (rd - 1.0);
    row.predicted = nd / 2.0 * overlap * overlap;
    row.stderr_cov = std::sqrt(ss.value() / (rd - 1.0) / rd);
    row.within_3sigma = std::abs(row.empirical - row.predicted) <= 3.0 * row.stderr_cov;
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> semicircle_spectrum(std::size_t n, std::span<const double> top, std::span<const double> bottom) {
  if (top.size() + bottom.size() > n) throw std::invalid_argument("semicircle_spectrum: too many planted values");
  for (double t : top)
    if (!(t >= 2.0)) throw std::invalid_argument("semicircle_spectrum: top outliers must be >= 2");
  for (double b : bottom)
    if (!(b <= -2.0)) throw std::invalid_argument("semicircle_spectrum: bottom outliers must be <= -2");

  const std::vector<double> q = quantile_grid(Measure::semicircle(), n);
  std::vector<double> a(q.rbegin(), q.rend());
  std::vector<double> t(top.begin(), top.end());
  std::vector<double> b(bottom.begin(), bottom.end());
  std::sort(t.begin(), t.end(), std::greater<>());
  std::sort(b.begin(), b.end(), std::greater<>());
  std::copy(t.begin(), t.end(), a.begin());
  std::copy(b.begin(), b.end(), a.end() - static_cast<long>(b.size()));
  return a;
}

Matrix deterministic_semicircle_matrix(std::size_t n, std::span<const double> top, std::span<const double> bottom) {
  const auto a = semicircle_spectrum(n, top, bottom);
  return Matrix::diagonal(a);
}

}  // namespace sphint
