#include "sphint/applications.hpp"

#include <cmath>
#include <stdexcept>

#include "sphint/montecarlo.hpp"
#include "sphint/numeric.hpp"
#include "sphint/randmat.hpp"

namespace sphint {

double sk_free_energy(double theta) {
  if (theta < 0.0) throw std::domain_error("sk_free_energy: theta must be non-negative");
  if (theta < 1.0) return theta * theta / 4.0;
  return theta - std::log(theta) / 2.0 - 0.75;
}

void VectorSpinProblem::validate() const {
  const std::size_t k = thetas.size();
  if (k == 0) throw std::invalid_argument("VectorSpinProblem: empty theta vector");
  if (q.rows() != k || q.cols() != k) throw std::invalid_argument("VectorSpinProblem: Q must be k x k");
  for (double t : thetas)
    if (!(t > 0.0)) throw std::invalid_argument("VectorSpinProblem: temperatures must be positive");
  for (std::size_t i = 0; i < k; ++i)
    if (std::abs(q(i, i) - 1.0) > 1e-12) throw std::invalid_argument("VectorSpinProblem: Q must have unit diagonal");
  if (asymmetry(q) > 1e-12) throw std::invalid_argument("VectorSpinProblem: Q must be symmetric");
  // Relative threshold: a singular Q often comes back with a tiny positive
  // smallest eigenvalue.
  const auto ev = eig_sym(q).values;
  if (!(ev.back() > 1e-12 * ev.front())) throw std::domain_error("VectorSpinProblem: Q is not positive definite");
}

double VectorSpinProblem::inverse_norm() const { return 1.0 / eig_sym(q).values.back(); }

double vector_spin_free_energy(const VectorSpinProblem& problem) {
  problem.validate();
  const std::size_t k = problem.thetas.size();
  Matrix m(k, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) m(i, j) = std::sqrt(problem.thetas[i] * problem.thetas[j]) * problem.q(i, j);
  const auto tilde = eig_sym(m).values;
  NeumaierSum s, logdet;
  for (double t : tilde) s.add(sk_free_energy(std::max(0.0, t)));
  for (double x : eig_sym(problem.q).values) logdet.add(std::log(x));
  const double kd = static_cast<double>(k);
  return s.value() / kd + logdet.value() / (2.0 * kd);
}

double mi_finite_rank(double gamma, std::span<const double> thetas) {
  if (gamma < 0.0) throw std::domain_error("mi_finite_rank: gamma must be non-negative");
  if (thetas.empty()) throw std::invalid_argument("mi_finite_rank: empty theta vector");
  NeumaierSum s;
  for (double t : thetas) {
    const double x = gamma * t * t;
    s.add(x <= 1.0 ? x / 4.0 : std::log(x) / 2.0 + 1.0 / (4.0 * x));
  }
  return s.value() / static_cast<double>(thetas.size());
}

double mmse(double gamma, std::span<const double> thetas) {
  if (!(gamma > 0.0)) throw std::domain_error("mmse: gamma must be positive");
  if (thetas.empty()) throw std::invalid_argument("mmse: empty theta vector");
  NeumaierSum s;
  for (double t : thetas) {
    const double t2 = t * t;
    s.add(gamma * t2 <= 1.0 ? t2 : 2.0 / gamma - 1.0 / (gamma * gamma * t2));
  }
  return s.value() / static_cast<double>(thetas.size());
}

double mmse_quarter_form(double gamma, std::span<const double> thetas) { return mmse(gamma, thetas) / 4.0; }

MmseDerivative mmse_from_derivative(double gamma, std::span<const double> thetas, double h) {
  if (!(h > 0.0) || gamma - h < 0.0) throw std::domain_error("mmse_from_derivative: need 0 < h <= gamma");
  MmseDerivative out;
  for (double t : thetas)
    if (t != 0.0 && std::abs(gamma - 1.0 / (t * t)) < 2.0 * h) out.near_transition = true;
  out.value = 4.0 * (mi_finite_rank(gamma + h, thetas) - mi_finite_rank(gamma - h, thetas)) / (2.0 * h);
  return out;
}

MmseArbitration arbitrate_mmse(double gamma, std::span<const double> thetas, double h, double tol) {
  MmseArbitration a;
  a.derivative = mmse_from_derivative(gamma, thetas, h).value;
  a.full_form = mmse(gamma, thetas);
  a.quarter_form = mmse_quarter_form(gamma, thetas);
  a.full_form_matches = std::abs(a.full_form - a.derivative) <= tol;
  a.quarter_form_matches = std::abs(a.quarter_form - a.derivative) <= tol;
  return a;
}

double mi_growing_rank(const Measure& eta, double gamma, const RateDescriptor& rate, std::size_t grid) {
  if (gamma == 0.0) return 0.0;
  const auto sup = mi_variational(eta, gamma, rate, grid);
  // The prior's second moment on the same quantile grid keeps the
  // deterministic case an exact reduction.
  const auto q = quantile_grid(eta, grid);
  NeumaierSum m2;
  for (double x : q) m2.add(x * x);
  return gamma / 4.0 * m2.value() / static_cast<double>(grid) - sup.value;
}

VectorSpinMcRow vector_spin_mc_check(const VectorSpinProblem& problem, std::size_t n, std::size_t samples,
                                     std::uint64_t seed) {
  const std::size_t k = problem.thetas.size();
  if (k == 0 || k > 2) throw std::invalid_argument("vector_spin_mc_check: need k <= 2");
  if (n == 0 || n > 64) throw std::invalid_argument("vector_spin_mc_check: need n <= 64");
  if (problem.q.rows() != k || problem.q.cols() != k)
    throw std::invalid_argument("vector_spin_mc_check: Q must be k x k");
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i)
      if (problem.q(i, j) != (i == j ? 1.0 : 0.0)) throw std::invalid_argument("vector_spin_mc_check: needs Q = I");

  const auto a = semicircle_spectrum(n);
  const DeformationSpec d = DeformationSpec::from(problem.thetas);
  const LogEstimate est = k == 1 ? spherical_rank1_is(a, d.thetas[0], 1, samples, -1.0, seed)
                                 : spherical_mc_spectrum(a, d, 1, samples, seed);
  const double scale = 1.0 / (static_cast<double>(k) * static_cast<double>(n));
  VectorSpinMcRow row;
  row.estimate = scale * est.log_value;
  row.stderr_estimate = scale * est.stderr_log;
  NeumaierSum th;
  for (double t : problem.thetas) th.add(sk_free_energy(std::max(0.0, t)));
  row.theory = th.value() / static_cast<double>(k);
  row.deviation = std::abs(row.estimate - row.theory);
  return row;
}

}  // namespace sphint
