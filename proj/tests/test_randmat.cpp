#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sphint/randmat.hpp"

using namespace sphint;

TEST_CASE("deformation spec sorts and counts non-negative temperatures") {
  const auto d = DeformationSpec::from({-1.0, 2.0, 0.0, 0.5});
  CHECK(d.thetas == std::vector<double>{2.0, 0.5, 0.0, -1.0});
  CHECK(d.k() == 4);
  CHECK(d.l() == 3);
}

TEST_CASE("entry laws have unit variance and the right moment generating function") {
  Rng rng(11);
  for (EntryLaw law : {EntryLaw::Gaussian, EntryLaw::Rademacher, EntryLaw::UniformSym}) {
    double s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double x = draw_entry(law, rng);
      s2 += x * x;
    }
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
    // Sharp sub-Gaussian: log MGF never above t^2/2.
    for (double t : {0.1, 1.0, 3.0}) CHECK(entry_log_mgf(law, t) <= t * t / 2.0 + 1e-14);
  }
  CHECK(entry_log_mgf(EntryLaw::Rademacher, 1.0) == doctest::Approx(std::log(std::cosh(1.0))));
  CHECK(entry_log_mgf(EntryLaw::Gaussian, 1.5) == doctest::Approx(1.125));
}

TEST_CASE("Wigner spectra follow the semicircle") {
  for (int beta : {1, 2}) {
    const auto ev = wigner_spectrum({300, beta, EntryLaw::Gaussian, 5});
    CHECK(ev.size() == 300);
    double m2 = 0.0;
    for (double x : ev) m2 += x * x;
    CHECK(m2 / 300 == doctest::Approx(1.0).epsilon(0.05));
    CHECK(ev.front() < 2.3);
    CHECK(ev.back() > -2.3);
  }
}

TEST_CASE("Haar columns are orthonormal") {
  Rng rng(3);
  const Matrix u = haar_columns(20, 4, rng);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      double d = 0.0;
      for (std::size_t i = 0; i < 20; ++i) d += u(i, a) * u(i, b);
      CHECK(d == doctest::Approx(a == b ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
    }
  const CMatrix v = haar_columns_complex(10, 3, rng);
  std::complex<double> d = 0.0;
  for (std::size_t i = 0; i < 10; ++i) d += std::conj(v(i, 0)) * v(i, 1);
  CHECK(std::abs(d) < 1e-12);
}

TEST_CASE("Haar entries squared are Beta(1/2, (n-1)/2)") {
  // One-sample Kolmogorov-Smirnov against the exact Beta(1/2, 2) law of a
  // squared entry of a 5x5 Haar matrix: F(x) = 1.5 sqrt(x) - 0.5 x^1.5.
  const std::size_t n = 5, reps = 4000;
  for (auto [row, col] : {std::pair<std::size_t, std::size_t>{0, 0}, {3, 2}}) {
    std::vector<double> x;
    for (std::size_t r = 0; r < reps; ++r) {
      const Matrix h = sample_haar(n, Rng::derive(77, r));
      x.push_back(h(row, col) * h(row, col));
    }
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (std::size_t i = 0; i < reps; ++i) {
      const double f = 1.5 * std::sqrt(x[i]) - 0.5 * std::pow(x[i], 1.5);
      d = std::max({d, std::abs(f - double(i) / reps), std::abs(f - double(i + 1) / reps)});
    }
    // 0.1% critical value of sqrt(n) D.
    CHECK(std::sqrt(double(reps)) * d < 1.95);
  }
}

TEST_CASE("spiked sample and extremal measure") {
  const auto s = spiked_sample({200, 1, EntryLaw::Gaussian, 8}, DeformationSpec::from({3.0}));
  CHECK(s.eigenvalues.front() == doctest::Approx(3.0 + 1.0 / 3.0).epsilon(0.05));
  CHECK(std::is_sorted(s.eigenvalues.rbegin(), s.eigenvalues.rend()));
  CHECK(s.extremal.atom_list().size() == 2);
  const auto same = spiked_sample({200, 1, EntryLaw::Gaussian, 8}, DeformationSpec::from({3.0}));
  CHECK(same.eigenvalues == s.eigenvalues);
  const std::vector<double> ev = {5, 4, 3, 2, 1, 0};
  const Measure e = extremal_measure(ev, 2);
  CHECK(e.atom_list().size() == 4);
  CHECK(e.left() == 0.0);
  CHECK(e.right() == 5.0);
}

TEST_CASE("quadratic-form covariance of the GOE") {
  const auto rows = quadratic_form_cov_check(40, 4000, 21);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) CHECK(r.within_3sigma);
  CHECK(rows[0].predicted == doctest::Approx(20.0));
}

TEST_CASE("deterministic semicircle spectrum with planted outliers") {
  const std::vector<double> top = {2.5};
  const auto sp = semicircle_spectrum(100, top);
  CHECK(sp.size() == 100);
  CHECK(std::count(sp.begin(), sp.end(), 2.5) == 1);
  const double mean = std::accumulate(sp.begin(), sp.end(), 0.0) / 100.0;
  CHECK(std::abs(mean) < 0.05);
}
