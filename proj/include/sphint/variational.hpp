// Finite-dimensional variational problems: the sup over admissible spectra
// pairs (phi, psi) bounding the rank-k spherical integral, the replica
// symmetric Crisanti-Sommers minimization, and the growing-rank mutual
// information problem over quantile functions.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sphint/linalg.hpp"
#include "sphint/measures.hpp"

namespace sphint {

struct VariationalPoint {
  Matrix coupling;           // L, symmetric with 0 <= L <= I
  std::vector<double> phi;   // spectrum of sqrt(I-L) D sqrt(I-L), non-increasing
  std::vector<double> psi;   // spectrum of sqrt(L) D sqrt(L), non-increasing
  double value = 0.0;        // objective F, filled by f_value callers
};

struct VariationalProblem {
  Measure mu;
  std::vector<double> lambdas;  // non-increasing, lambda_k >= r(mu)
  std::vector<double> thetas;   // non-increasing, non-negative

  std::size_t k() const { return thetas.size(); }
  // Throws std::invalid_argument when the orderings or sizes are violated.
  void validate() const;
};

// Builds (phi, psi) from a coupling L. Throws std::domain_error when an
// eigenvalue of L lies outside [-1e-10, 1 + 1e-10].
VariationalPoint feasible_from_coupling(std::span<const double> thetas, const Matrix& coupling);

// F = sum_i [ lambda_i psi_i + J(phi_i, lambda_k, mu) + ln phi_i - ln theta_i ].
// Coordinates with theta_i = 0 contribute no log terms; -infinity when
// phi_i = 0 < theta_i.
double f_value(const VariationalProblem& problem, const VariationalPoint& point);

// The diagonal coupling m_i = clip(1 - G(lambda_i)/theta_i, 0, 1).
VariationalPoint candidate_point(const VariationalProblem& problem);

// sum_i J(theta_i, lambda_i, mu).
double pairing_bound(const VariationalProblem& problem);

struct MaximizeResult {
  VariationalPoint best;
  double bound = 0.0;  // sum_i J(theta_i, lambda_i, mu)
  double gap = 0.0;    // bound - best.value
  int evaluations = 0;
};

// Multi-start Nelder-Mead over couplings L = R diag(m) R^T (m clipped to
// [1e-9, 1 - 1e-9], R a product of Givens rotations). Starts: the candidate
// point, L = 0, L = I, the diagonal subfamily, and `restarts` random draws.
// Needs k <= 8.
MaximizeResult maximize_m(const VariationalProblem& problem, int restarts = 16, double tol = 1e-10,
                          std::uint64_t seed = 1);

struct CsResult {
  double q_star = 0.0;
  double value = 0.0;
};

// inf over q in [0, 1) of (1/2)(theta^2 (1 - q^2)/2 + q/(1-q) + ln(1-q)).
CsResult cs_minimize(double theta, double tol = 1e-12);

// Rate descriptor for the growing-rank prior.
struct RateDescriptor {
  enum class Kind { Deterministic, QuadraticPenalty };
  Kind kind = Kind::Deterministic;
  double kappa = 0.0;  // penalty weight: kappa * mean((q_j - Q_eta(t_j))^2)

  static RateDescriptor deterministic() { return {}; }
  static RateDescriptor quadratic(double kappa) { return {Kind::QuadraticPenalty, kappa}; }
};

struct MiVariationalResult {
  double value = 0.0;              // the supremum
  std::vector<double> quantiles;   // optimizing quantile vector of nu
  bool converged = true;
  int sweeps = 0;
};

// sup over nu of  -gamma/4 int x^2 dnu + 1/2 int_0^1 J(sqrt(gamma) Q_nu(t),
// bbp_map(Q_eta(t), gamma), sigma) dt - Gamma(nu), with nu represented by a
// non-decreasing quantile vector on `grid` midpoints.
MiVariationalResult mi_variational(const Measure& eta, double gamma, const RateDescriptor& rate,
                                   std::size_t grid = 128, double tol = 1e-10);

}  // namespace sphint
