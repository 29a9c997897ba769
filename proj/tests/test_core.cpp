#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "sphint/linalg.hpp"
#include "sphint/numeric.hpp"
#include "sphint/parallel.hpp"
#include "sphint/rng.hpp"

using namespace sphint;

TEST_CASE("eig_sym recovers the spectrum of a rotated diagonal matrix") {
  // Q diag(d) Q^T with Q a Givens rotation in the (0, 2) plane.
  const double c = std::cos(0.7), s = std::sin(0.7);
  const Matrix q = Matrix::from_rows({{c, 0, -s}, {0, 1, 0}, {s, 0, c}});
  const std::vector<double> d = {3.0, -1.0, 0.5};
  const Matrix a = multiply(multiply(q, Matrix::diagonal(d)), transpose(q));
  const auto e = eig_sym(a, true);
  CHECK(e.values[0] == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(e.values[1] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(e.values[2] == doctest::Approx(-1.0).epsilon(1e-13));
  // A v = lambda v for every returned pair.
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 3; ++i) {
      double av = 0.0;
      for (std::size_t j = 0; j < 3; ++j) av += a(i, j) * e.vectors(j, k);
      CHECK(av == doctest::Approx(e.values[k] * e.vectors(i, k)).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("eig_sym rejects non-symmetric input") {
  const Matrix a = Matrix::from_rows({{1, 2}, {0, 1}});
  CHECK_THROWS_AS(eig_sym(a), std::invalid_argument);
}

TEST_CASE("eig_hermitian matches the trace and determinant of a 2x2 matrix") {
  CMatrix h(2, 2);
  h(0, 0) = 2.0;
  h(1, 1) = -1.0;
  h(0, 1) = {0.5, 1.5};
  h(1, 0) = {0.5, -1.5};
  const auto v = eig_hermitian(h);
  // Roots of x^2 - x - (2 + |h01|^2) = 0.
  const double det = -2.0 - 2.5;
  const double disc = std::sqrt(1.0 - 4.0 * det);
  CHECK(v[0] == doctest::Approx((1.0 + disc) / 2.0).epsilon(1e-13));
  CHECK(v[1] == doctest::Approx((1.0 - disc) / 2.0).epsilon(1e-13));
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  const auto rule = gauss_legendre(8);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], 14);
  CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-14));
}

TEST_CASE("adaptive_simpson and golden section on textbook problems") {
  CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) ==
        doctest::Approx(2.0).epsilon(1e-10));
  const auto m = golden_section_minimize([](double x) { return (x - 0.3) * (x - 0.3) + 1.0; }, -2.0, 2.0);
  CHECK(m.x == doctest::Approx(0.3).epsilon(1e-6));
  // Minimum on the boundary is found exactly.
  const auto b = golden_section_minimize([](double x) { return x; }, 1.0, 5.0);
  CHECK(b.x == 1.0);
  CHECK(bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("log_mean_exp is stable for huge exponents") {
  const std::vector<double> t = {1000.0, 1000.0 + std::log(3.0)};
  CHECK(log_mean_exp(t) == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
  const std::vector<double> same(10, 5.0);
  const auto jk = jackknife_log_mean_exp(same);
  CHECK(jk.log_mean == doctest::Approx(5.0));
  CHECK(jk.stderr_log == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("isotonic_projection pools adjacent violators") {
  const std::vector<double> y = {1.0, 3.0, 2.0, 4.0};
  const auto p = isotonic_projection(y);
  CHECK(p[1] == doctest::Approx(2.5));
  CHECK(p[2] == doctest::Approx(2.5));
  CHECK(p[3] == doctest::Approx(4.0));
}

TEST_CASE("nelder_mead_maximize finds the top of a concave bowl") {
  const auto r = nelder_mead_maximize(
      [](std::span<const double> x) { return -(x[0] - 1) * (x[0] - 1) - 2 * (x[1] + 0.5) * (x[1] + 0.5); },
      {0.0, 0.0});
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.x[1] == doctest::Approx(-0.5).epsilon(1e-4));
}

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(42), b(42), c(Rng::derive(42, 1));
  for (int i = 0; i < 5; ++i) CHECK(a.next() == b.next());
  CHECK(Rng::derive(42, 1) != Rng::derive(42, 2));
  Rng d(Rng::derive(42, 1));
  CHECK(c.next() == d.next());
  // Standard normal moments.
  Rng g(7);
  double s1 = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = g.gaussian();
    s1 += x;
    s2 += x * x;
  }
  CHECK(std::abs(s1 / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.01);
}

TEST_CASE("parallel_for visits every index once and propagates exceptions") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 3) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}
