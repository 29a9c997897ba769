// Closed-form consequences of the spherical-integral asymptotics: spherical
// SK free energy, its vector-spin extension, and mutual information / MMSE
// for low-rank spiked Wigner denoising.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sphint/linalg.hpp"
#include "sphint/measures.hpp"
#include "sphint/variational.hpp"

namespace sphint {

// theta^2/4 for theta < 1, theta - ln(theta)/2 - 3/4 for theta >= 1.
double sk_free_energy(double theta);

struct VectorSpinProblem {
  Matrix q;                    // positive definite with unit diagonal
  std::vector<double> thetas;  // positive

  // Throws std::invalid_argument unless Q is symmetric with unit diagonal
  // and theta is positive, and std::domain_error unless Q is positive
  // definite.
  void validate() const;
  // Largest eigenvalue of Q^{-1}, the quantity bounded by the
  // positive-definiteness assumption.
  double inverse_norm() const;
};

// (1/k) sum f(theta~_i) + (1/(2k)) ln det Q with theta~ the eigenvalues of
// D^{1/2} Q D^{1/2} and f = sk_free_energy.
double vector_spin_free_energy(const VectorSpinProblem& problem);

// Mutual-information density for a deterministic rank-k prior:
// average over i of gamma theta_i^2/4 when gamma theta_i^2 <= 1 and
// ln(gamma theta_i^2)/2 + 1/(4 gamma theta_i^2) otherwise.
double mi_finite_rank(double gamma, std::span<const double> thetas);

// MMSE averaged over i, normalized so that it equals 4 d(mi)/d(gamma):
// theta_i^2 below the transition, 2/gamma - 1/(gamma^2 theta_i^2) above.
double mmse(double gamma, std::span<const double> thetas);

// The alternative closed form with prefactors a quarter of the above
// (theta_i^2/4 and 1/(2 gamma) - 1/(4 gamma^2 theta_i^2)).
double mmse_quarter_form(double gamma, std::span<const double> thetas);

struct MmseDerivative {
  double value = 0.0;
  // Set when gamma lies within 2h of a transition point 1/theta_i^2.
  bool near_transition = false;
};

// 4 (mi(gamma + h) - mi(gamma - h)) / (2h).
MmseDerivative mmse_from_derivative(double gamma, std::span<const double> thetas, double h = 1e-4);

struct MmseArbitration {
  double derivative = 0.0;
  double full_form = 0.0;     // mmse()
  double quarter_form = 0.0;  // mmse_quarter_form()
  bool full_form_matches = false;
  bool quarter_form_matches = false;
};

// Compares both closed forms against the derivative of mi_finite_rank.
MmseArbitration arbitrate_mmse(double gamma, std::span<const double> thetas, double h = 1e-4, double tol = 1e-4);

// gamma/4 int x^2 deta - sup of the growing-rank variational problem.
double mi_growing_rank(const Measure& eta, double gamma, const RateDescriptor& rate, std::size_t grid = 128);

struct VectorSpinMcRow {
  double estimate = 0.0;  // (1/(kN)) ln I_N(A_N, D) with A_N deterministic semicircle
  double stderr_estimate = 0.0;
  double theory = 0.0;    // (1/k) sum sk_free_energy(theta_i)
  double deviation = 0.0;
};

// Check of the unconstrained case Q = I (k <= 2, n <= 64): Monte-Carlo
// spherical integral against the deterministic semicircle matrix (rank-one
// importance sampling for k = 1, plain sampling for k = 2), compared with
// the averaged SK free energy.
VectorSpinMcRow vector_spin_mc_check(const VectorSpinProblem& problem, std::size_t n, std::size_t samples,
                                     std::uint64_t seed);

}  // namespace sphint
