// Finite-N spherical integrals
//   I_N(A, B) = int exp( (beta N / 2) tr(A U B U^*) ) dU
// over Haar U, estimated by Monte Carlo in the log domain, together with the
// exact small-N and annealed values used to check the estimators.
//
// Only the spectrum of A matters (conjugation invariance), and for B of rank
// k only the first k columns of U enter the trace, so every estimator works
// from A's eigenvalues and k Haar columns.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sphint/linalg.hpp"
#include "sphint/randmat.hpp"

namespace sphint {

enum class EstimateMethod { Plain, AngularIS, ExactN2, AnnealedExact, AnnealedConditional, AnnealedJoint };

std::string method_name(EstimateMethod m);

struct LogEstimate {
  double log_value = 0.0;   // estimate of ln I_N (un-normalized)
  double stderr_log = 0.0;  // delete-1 jackknife standard error
  std::size_t samples = 0;
  EstimateMethod method = EstimateMethod::Plain;
  double tilt = 0.0;        // AngularIS proposal tilt actually used
};

// Multiplier 2/(beta k N) that turns ln I_N into the normalized exponent.
double normalization(int beta, std::size_t k, std::size_t n);

// Monte-Carlo samples are processed in fixed-size batches with seeds derived
// from (seed, batch index), so results are identical for any worker count.
inline constexpr std::size_t kBatchSize = 4096;

// Plain Monte Carlo over Haar U. A must be symmetric (beta = 1); for
// beta = 2 pass its eigenvalues to spherical_mc_spectrum.
LogEstimate spherical_mc(const Matrix& a, const DeformationSpec& deform, int beta, std::size_t samples,
                         std::uint64_t seed);
LogEstimate spherical_mc_spectrum(std::span<const double> a_eigs, const DeformationSpec& deform, int beta,
                                  std::size_t samples, std::uint64_t seed);

// ln I_0(x) from the power series; throws std::domain_error for |x| > 30.
double log_bessel_i0(double x);

// ln I_2 for A = diag(lam1, lam2), B = diag(theta, 0), beta = 1:
// theta (lam1 + lam2)/2 + ln I_0(theta (lam1 - lam2)/2).
double spherical_exact_n2(double lam1, double lam2, double theta, int beta = 1);

// Rank-one importance sampling with an angular central Gaussian proposal.
// After shifting A so that its smallest eigenvalue is 0, the proposal
// precision is p_i = v - s c a_i with c = beta N theta / 2 and v the
// saddle point sum_i 1/(2(v - c a_i)) = 1; s = 0 is plain Monte Carlo.
// A negative tilt runs a pilot over s in {0.5, 0.7, 0.9, 1} and keeps the
// one with the smallest standard error. Throws std::domain_error for s > 1.
LogEstimate spherical_rank1_is(std::span<const double> a_eigs, double theta, int beta, std::size_t samples,
                               double tilt, std::uint64_t seed);

// Normalized annealed exponent for Gaussian entries: (1/k) sum theta_i^2 / 2.
double annealed_exact(const DeformationSpec& deform, int beta, std::size_t n);

enum class AnnealedMode {
  // Integrates X out exactly given U (product of entry moment generating
  // functions), then averages over U. Zero variance for Gaussian entries.
  Conditional,
  // Samples X and U jointly. High variance; meant for small N only.
  Joint,
};

// Estimate of ln E_X[I_N(X, D)] (un-normalized).
LogEstimate annealed_mc(const EnsembleSpec& ensemble, const DeformationSpec& deform, std::size_t samples,
                        std::uint64_t seed, AnnealedMode mode = AnnealedMode::Conditional);

// ln I_n(diag a, diag b) for n <= 3 and beta = 1: closed forms for n <= 2,
// Euler-angle quadrature on SO(3) for n = 3.
double spherical_exact_small(std::span<const double> a, std::span<const double> b);

struct DecompositionReport {
  double lower = 0.0;   // ln of I_N(Q1, P) I_{N-k}(Q2, N/(N-k) P^(k-))
  double middle = 0.0;  // ln I_N(Q, P)
  double upper = 0.0;   // ln of I_N(Q1, P) I_{N-k}(Q2, N/(N-k) P^(k+))
  bool reversed = false;  // Q2 <= 0: the inequalities flip
  bool holds = false;
};

// Sandwich bounds for splitting Q = diag(Q1, Q2) after the first k entries.
// p must be non-increasing; Q2 must be all >= 0 or all <= 0. n <= 3.
DecompositionReport decomposition_check(std::span<const double> p, std::span<const double> q, std::size_t k,
                                        int beta = 1);

struct LimitRow {
  std::size_t n = 0;
  LogEstimate estimate;
  double normalized = 0.0;
  double normalized_stderr = 0.0;
  double theory = 0.0;
  double deviation = 0.0;
};

struct LimitReport {
  std::vector<LimitRow> rows;
  bool non_increasing = false;
  double final_deviation = 0.0;
};

// Limit value (1/k)[sum_{i<=l} J(theta_i, top_i, sigma) + sum over the
// negative temperatures of J(theta, bottom, sigma)], with missing planted
// values replaced by the bulk edges +-2.
double limit_theory(const DeformationSpec& deform, std::span<const double> top, std::span<const double> bottom);

// For each N builds semicircle_spectrum(N, top, bottom), estimates the
// normalized log-integral (AngularIS for k = 1 with pilot-tuned tilt, plain
// otherwise) and reports the deviation from limit_theory.
LimitReport limit_check(std::span<const std::size_t> n_list, const DeformationSpec& deform,
                        std::span<const double> top, std::span<const double> bottom, int beta, std::size_t samples,
                        std::uint64_t seed);

}  // namespace sphint
