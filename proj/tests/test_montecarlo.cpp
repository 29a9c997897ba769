#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "sphint/montecarlo.hpp"

using namespace sphint;

namespace {

// ln I_2 for beta = 1 by trapezoid on the circle of first columns
// (cos a, sin a); spectrally accurate for the periodic integrand.
double n2_oracle(double l1, double l2, double theta, int m = 512) {
  double s = 0.0;
  for (int j = 0; j < m; ++j) {
    const double a = 2.0 * std::numbers::pi * j / m;
    const double c = std::cos(a), si = std::sin(a);
    s += std::exp(theta * (l1 * c * c + l2 * si * si));  // (beta N / 2) = 1
  }
  return std::log(s / m);
}

}  // namespace

TEST_CASE("Bessel I0 against the standard library") {
  for (double x : {0.0, 0.5, 3.0, 12.0, 29.0}) CHECK(log_bessel_i0(x) == doctest::Approx(std::log(std::cyl_bessel_i(0.0, x))).epsilon(1e-13));
  CHECK_THROWS_AS(log_bessel_i0(31.0), std::domain_error);
}

TEST_CASE("exact N = 2 value against circle quadrature") {
  CHECK(spherical_exact_n2(1.0, -1.0, 1.0) == doctest::Approx(n2_oracle(1.0, -1.0, 1.0)).epsilon(1e-12));
  CHECK(spherical_exact_n2(3.0, 0.5, 2.0) == doctest::Approx(n2_oracle(3.0, 0.5, 2.0)).epsilon(1e-12));
}

TEST_CASE("plain and importance-sampled N = 2 estimates") {
  const std::vector<double> a = {1.0, -1.0};
  const double exact = spherical_exact_n2(1.0, -1.0, 1.0);
  const auto plain = spherical_mc_spectrum(a, DeformationSpec::from({1.0}), 1, 40000, 5);
  CHECK(std::abs(plain.log_value - exact) < 4.0 * plain.stderr_log);
  const auto is = spherical_rank1_is(a, 1.0, 1, 40000, -1.0, 5);
  CHECK(std::abs(is.log_value - exact) < 4.0 * is.stderr_log + 1e-12);
  CHECK(is.method == EstimateMethod::AngularIS);
  CHECK_THROWS_AS(spherical_rank1_is(a, 1.0, 1, 100, 1.5, 5), std::domain_error);
}

TEST_CASE("estimates are independent of the worker count") {
  const std::vector<double> a = {2.0, 0.5, -0.5, -1.0};
  const auto d = DeformationSpec::from({1.0});
  setenv("SPHINT_WORKERS", "1", 1);
  const auto one = spherical_mc_spectrum(a, d, 1, 10000, 17);
  setenv("SPHINT_WORKERS", "3", 1);
  const auto three = spherical_mc_spectrum(a, d, 1, 10000, 17);
  unsetenv("SPHINT_WORKERS");
  CHECK(one.log_value == three.log_value);
  CHECK(one.stderr_log == three.stderr_log);
}

TEST_CASE("matrix and spectrum entry points agree for diagonal input") {
  const std::vector<double> a = {1.5, 0.0, -1.5};
  const auto d = DeformationSpec::from({0.7});
  const auto m = spherical_mc(Matrix::diagonal(a), d, 1, 20000, 4);
  const auto s = spherical_mc_spectrum(a, d, 1, 20000, 4);
  CHECK(std::abs(m.log_value - s.log_value) < 4.0 * (m.stderr_log + s.stderr_log));
}

TEST_CASE("annealed exponent for Gaussian entries") {
  const auto d = DeformationSpec::from({1.0, 0.5});
  CHECK(annealed_exact(d, 1, 50) == doctest::Approx(0.3125));
  const auto est = annealed_mc({20, 1, EntryLaw::Gaussian, 3}, d, 4096, 3);
  CHECK(normalization(1, 2, 20) * est.log_value == doctest::Approx(0.3125).epsilon(1e-12));
  const auto cplx = annealed_mc({10, 2, EntryLaw::Gaussian, 3}, DeformationSpec::from({1.0}), 4096, 3);
  CHECK(normalization(2, 1, 10) * cplx.log_value == doctest::Approx(annealed_exact(DeformationSpec::from({1.0}), 2, 10)).epsilon(1e-12));
}

TEST_CASE("annealed joint sampler agrees with the conditional one at small N") {
  const auto d = DeformationSpec::from({0.5});
  const auto joint = annealed_mc({4, 1, EntryLaw::Gaussian, 9}, d, 200000, 9, AnnealedMode::Joint);
  const double exact = annealed_exact(d, 1, 4) / normalization(1, 1, 4);
  CHECK(std::abs(joint.log_value - exact) < 4.0 * joint.stderr_log);
}

TEST_CASE("exact small-N values") {
  const std::vector<double> a2 = {1.0, -1.0}, b2 = {1.0, 0.0};
  CHECK(spherical_exact_small(a2, b2) == doctest::Approx(spherical_exact_n2(1.0, -1.0, 1.0)).epsilon(1e-12));
  // N = 3 with B = diag(1, 1, 1) * t: trivial integrand exp((3/2) t tr A).
  const std::vector<double> a3 = {1.0, 0.5, -0.2}, ones = {0.4, 0.4, 0.4};
  CHECK(spherical_exact_small(a3, ones) == doctest::Approx(1.5 * 0.4 * 1.3).epsilon(1e-12));
}

TEST_CASE("exact N = 3 rank one against Monte Carlo") {
  const std::vector<double> a = {1.0, 0.0, -1.0}, b = {1.0, 0.0, 0.0};
  const double exact = spherical_exact_small(a, b);
  const auto mc = spherical_mc_spectrum(a, DeformationSpec::from({1.0}), 1, 200000, 12);
  CHECK(std::abs(mc.log_value - exact) < 4.0 * mc.stderr_log);
}

TEST_CASE("decomposition sandwich in both directions") {
  const std::vector<double> p = {1.0, 0.2, -0.5};
  const auto up = decomposition_check(p, std::vector<double>{0.7, 0.6, 0.3}, 1);
  CHECK(up.holds);
  CHECK_FALSE(up.reversed);
  const auto down = decomposition_check(p, std::vector<double>{0.7, -0.6, -0.3}, 1);
  CHECK(down.holds);
  CHECK(down.reversed);
  CHECK_THROWS_AS(decomposition_check(p, std::vector<double>{0.7, 0.6, -0.3}, 1), std::invalid_argument);
}

TEST_CASE("limit theory values") {
  const std::vector<double> top = {2.5};
  CHECK(limit_theory(DeformationSpec::from({2.0}), top, {}) == doctest::Approx(2.4887056388801).epsilon(1e-10));
  CHECK(limit_theory(DeformationSpec::from({0.5}), {}, {}) == doctest::Approx(0.125));
}
