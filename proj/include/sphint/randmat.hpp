// Wigner matrices (Gaussian and sharp sub-Gaussian entry laws), Haar
// orthogonal and unitary matrices, spiked deformations and their spectra.
//
// Normalization: off-diagonal entries have E|X_ij|^2 = 1/N; the diagonal
// has variance 2/N for beta = 1 and 1/N for beta = 2. The spectrum then
// fills [-2, 2].
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sphint/linalg.hpp"
#include "sphint/measures.hpp"
#include "sphint/rng.hpp"

namespace sphint {

enum class EntryLaw { Gaussian, Rademacher, UniformSym };

struct EnsembleSpec {
  std::size_t n = 0;
  int beta = 1;
  EntryLaw law = EntryLaw::Gaussian;
  std::uint64_t seed = 0;
};

// Temperatures sorted non-increasing:
// theta_1 >= ... >= theta_l >= 0 > theta_{l+1} >= ... >= theta_k.
struct DeformationSpec {
  std::vector<double> thetas;

  // Sorts into non-increasing order.
  static DeformationSpec from(std::vector<double> thetas);
  std::size_t k() const { return thetas.size(); }
  // Number of non-negative temperatures.
  std::size_t l() const;
};

struct SpectrumSample {
  std::vector<double> eigenvalues;  // non-increasing
  Measure empirical;                // N equal atoms
  Measure extremal;                 // 2k equal atoms: k largest and k smallest
};

// Unit-variance draw from the entry law (mean zero).
double draw_entry(EntryLaw law, Rng& rng);

// ln E exp(t xi) for a unit-variance draw xi of the law. Sharp
// sub-Gaussianity means this never exceeds t^2/2.
double entry_log_mgf(EntryLaw law, double t);

// Real symmetric Wigner matrix (beta = 1) with the given entry law.
Matrix sample_wigner_real(const EnsembleSpec& spec);
// Complex Hermitian Wigner matrix (beta = 2).
CMatrix sample_wigner_complex(const EnsembleSpec& spec);

// GOE (beta = 1) sample; spec.law must be Gaussian.
Matrix sample_gaussian_invariant(const EnsembleSpec& spec);
// GUE (beta = 2) sample; spec.law must be Gaussian.
CMatrix sample_gaussian_invariant_complex(const EnsembleSpec& spec);
// Wigner sample with a sharp sub-Gaussian law (Rademacher or UniformSym).
Matrix sample_wigner(const EnsembleSpec& spec);

// Eigenvalues (non-increasing) of a Wigner sample of either symmetry class.
std::vector<double> wigner_spectrum(const EnsembleSpec& spec);

// The first k columns of a Haar orthogonal matrix, as an n x k matrix.
// Gram-Schmidt on Gaussian columns: the triangular factor has a positive
// diagonal, which makes the factorization unique and the law exactly Haar.
// sample_haar(n, seed) uses the same stream, so its first k columns are
// identical to haar_columns(n, k, rng) for a fresh Rng(seed).
Matrix haar_columns(std::size_t n, std::size_t k, Rng& rng);
CMatrix haar_columns_complex(std::size_t n, std::size_t k, Rng& rng);

Matrix sample_haar(std::size_t n, std::uint64_t seed);
CMatrix sample_haar_unitary(std::size_t n, std::uint64_t seed);

// Extremal empirical measure of a non-increasing spectrum.
Measure extremal_measure(std::span<const double> eigenvalues, std::size_t k);

// Spectrum of X + U^T D U with X drawn from `ensemble` and U an independent
// Haar matrix. D's eigenvalues are deform.thetas padded with zeros.
SpectrumSample spiked_sample(const EnsembleSpec& ensemble, const DeformationSpec& deform);

struct CovarianceRow {
  double overlap = 0.0;     // e1 . e2
  double empirical = 0.0;   // sample covariance of H(e1), H(e2)
  double predicted = 0.0;   // (N/2) (e1 . e2)^2
  double stderr_cov = 0.0;  // standard error of the sample covariance
  bool within_3sigma = false;
};

// Checks Cov(H(e1), H(e2)) = (N/2)(e1.e2)^2 for H(e) = (N/2) e^T G e with G
// a GOE matrix, at overlaps 1, 0 and 1/2.
std::vector<CovarianceRow> quadratic_form_cov_check(std::size_t n, std::size_t replicates, std::uint64_t seed);

// Diagonal of the deterministic matrix: bulk entries are the semicircle
// quantiles Q_sigma((i - 1/2)/N), sorted non-increasing; the largest entries
// are replaced by `top` and the smallest by `bottom`. Top values must be
// >= 2 and bottom values <= -2.
std::vector<double> semicircle_spectrum(std::size_t n, std::span<const double> top = {},
                                        std::span<const double> bottom = {});
Matrix deterministic_semicircle_matrix(std::size_t n, std::span<const double> top = {},
                                       std::span<const double> bottom = {});

}  // namespace sphint
