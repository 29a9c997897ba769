#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "sphint/asymptotics.hpp"
#include "sphint/variational.hpp"

using namespace sphint;

TEST_CASE("feasible_from_coupling conserves the trace") {
  const std::vector<double> th = {2.0, 1.0};
  const Matrix l = Matrix::from_rows({{0.5, 0.2}, {0.2, 0.3}});
  const auto p = feasible_from_coupling(th, l);
  double s = 0.0;
  for (double x : p.phi) s += x;
  for (double x : p.psi) s += x;
  CHECK(s == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(p.phi[0] >= p.phi[1]);
  CHECK_THROWS_AS(feasible_from_coupling(th, Matrix::from_rows({{2.0, 0.0}, {0.0, 0.5}})), std::domain_error);
}

TEST_CASE("rank one: candidate point attains the pairing bound") {
  VariationalProblem p{Measure::semicircle(), {2.5}, {2.0}};
  const auto c = candidate_point(p);
  CHECK(f_value(p, c) == doctest::Approx(pairing_bound(p)).epsilon(1e-10));
  CHECK(pairing_bound(p) == doctest::Approx(j_value(2.0, 2.5, Measure::semicircle())));
}

TEST_CASE("maximize_m never beats the bound and finds it on feasible problems") {
  VariationalProblem p{Measure::semicircle(), {3.0, 2.5}, {2.0, 1.5}};
  const auto r = maximize_m(p, 4, 1e-10, 3);
  CHECK(r.best.value <= r.bound + 1e-6);
  CHECK(r.gap == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
}

TEST_CASE("problem validation") {
  VariationalProblem bad{Measure::semicircle(), {2.5, 3.0}, {2.0, 1.0}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  VariationalProblem sizes{Measure::semicircle(), {2.5}, {2.0, 1.0}};
  CHECK_THROWS_AS(sizes.validate(), std::invalid_argument);
}

TEST_CASE("Crisanti-Sommers minimization") {
  for (double t : {0.3, 0.8, 1.0, 1.5, 2.0, 4.0}) {
    const auto r = cs_minimize(t);
    const double q_expected = std::max(0.0, 1.0 - 1.0 / t);
    CHECK(r.q_star == doctest::Approx(q_expected).scale(1.0).epsilon(1e-4));
    // The objective evaluated directly at the predicted minimizer.
    const double q = q_expected;
    const double direct = 0.5 * (t * t * (1 - q * q) / 2 + q / (1 - q) + std::log(1 - q));
    CHECK(r.value == doctest::Approx(direct).epsilon(1e-8));
  }
}

TEST_CASE("growing-rank variational problem with a deterministic prior") {
  // For eta = delta_theta the supremum sits at nu = eta, where it equals
  // -gamma theta^2/4 + J(sqrt(gamma) theta, bbp_map(theta, gamma), sigma)/2.
  const double gamma = 2.0, theta = 1.0;
  const auto r = mi_variational(Measure::dirac(theta), gamma, RateDescriptor::deterministic(), 32);
  const double expected =
      -gamma * theta * theta / 4.0 + 0.5 * j_value(std::sqrt(gamma) * theta, bbp_map(theta, gamma), Measure::semicircle());
  CHECK(r.value == doctest::Approx(expected).epsilon(1e-8));
  CHECK(r.converged);
}
