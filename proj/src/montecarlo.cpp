#include "sphint/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sphint/asymptotics.hpp"
#include "sphint/numeric.hpp"
#include "sphint/parallel.hpp"
#include "sphint/rng.hpp"

namespace sphint {

namespace {

// Runs `samples` draws in fixed batches. make_draw() is called once per
// batch and must return a callable double(Rng&) owning its scratch space.
template <class MakeDraw>
std::vector<double> run_batches(std::size_t samples, std::uint64_t seed, MakeDraw make_draw) {
  std::vector<double> terms(samples);
  const std::size_t batches = (samples + kBatchSize - 1) / kBatchSize;
  parallel_for(batches, [&](std::size_t b) {
    Rng rng(Rng::derive(seed, b));
    auto draw = make_draw();
    const std::size_t hi = std::min(samples, (b + 1) * kBatchSize);
    for (std::size_t i = b * kBatchSize; i < hi; ++i) terms[i] = draw(rng);
  });
  return terms;
}

LogEstimate summarize(const std::vector<double>& terms, EstimateMethod method) {
  LogEstimate est;
  est.method = method;
  est.samples = terms.size();
  if (terms.size() < 2) throw std::invalid_argument("Monte-Carlo estimate needs at least two samples");
  const auto jk = jackknife_log_mean_exp(terms);
  est.log_value = jk.log_mean;
  est.stderr_log = jk.stderr_log;
  return est;
}

void require_beta(int beta) {
  if (beta != 1 && beta != 2) throw std::invalid_argument("beta must be 1 or 2");
}

// (beta N / 2) sum_j theta_j sum_i a_i |u_ij|^2 for one Haar draw.
double haar_exponent(std::span<const double> a, std::span<const double> thetas, int beta, Rng& rng) {
  const std::size_t n = a.size();
  const std::size_t k = thetas.size();
  double s = 0.0;
  if (beta == 1) {
    const Matrix u = haar_columns(n, k, rng);
    for (std::size_t j = 0; j < k; ++j) {
      auto c = u.col(j);
      double q = 0.0;
      for (std::size_t i = 0; i < n; ++i) q += a[i] * c[i] * c[i];
      s += thetas[j] * q;
    }
  } else {
    const CMatrix u = haar_columns_complex(n, k, rng);
    for (std::size_t j = 0; j < k; ++j) {
      auto c = u.col(j);
      double q = 0.0;
      for (std::size_t i = 0; i < n; ++i) q += a[i] * std::norm(c[i]);
      s += thetas[j] * q;
    }
  }
  return 0.5 * beta * static_cast<double>(n) * s;
}

// Saddle point v > c*max(a) of sum_i 1/(2(v - c a_i)) = 1 (a >= 0).
double saddle_point(std::span<const double> a, double c) {
  const double top = c * *std::max_element(a.begin(), a.end());
  auto f = [&](double v) {
    double s = 0.0;
    for (double x : a) s += 0.5 / (v - c * x);
    return s - 1.0;
  };
  const double hi = top + 0.5 * static_cast<double>(a.size()) + 1.0;
  double lo = top;
  // Step off the pole so f(lo) is finite and positive.
  double gap = 1e-300;
  while (!(f(lo + gap) > 0.0) && gap < 1.0) gap *= 16.0;
  lo += gap;
  if (!(f(lo) > 0.0)) return lo;
  return bisect_root(f, lo, hi, 1e-15 * std::max(1.0, hi));
}

struct AcgSetup {
  std::vector<double> a;       // shifted eigenvalues, min 0
  std::vector<double> inv_sd;  // 1/sqrt(p_hat_i)
  std::vector<double> p_hat;
  double c = 0.0;
  double offset = 0.0;         // c * min(a), restored at the end
  double log_det_term = 0.0;   // -1/2 sum ln p_hat_i
};

AcgSetup acg_setup(std::span<const double> a_eigs, double theta, int beta, double tilt) {
  if (tilt > 1.0) throw std::domain_error("spherical_rank1_is: tilt above 1 gives a non-positive proposal");
  if (tilt < 0.0) throw std::domain_error("spherical_rank1_is: negative tilt");
  const std::size_t n = a_eigs.size();
  AcgSetup s;
  // Real embedding for beta = 2: each eigenvalue appears for the real and
  // imaginary coordinates, the sphere lives in dimension 2N.
  for (double x : a_eigs) {
    s.a.push_back(x);
    if (beta == 2) s.a.push_back(x);
  }
  s.c = 0.5 * beta * static_cast<double>(n) * theta;
  const double amin = *std::min_element(s.a.begin(), s.a.end());
  for (auto& x : s.a) x -= amin;
  s.offset = s.c * amin;
  const double v = saddle_point(s.a, s.c);
  NeumaierSum ld;
  for (double x : s.a) {
    const double p = (v - tilt * s.c * x) / v;
    if (!(p > 0.0)) throw std::domain_error("spherical_rank1_is: proposal precision is not positive definite");
    s.p_hat.push_back(p);
    s.inv_sd.push_back(1.0 / std::sqrt(p));
    ld.add(std::log(p));
  }
  s.log_det_term = -0.5 * ld.value();
  return s;
}

LogEstimate run_acg(const AcgSetup& s, std::size_t samples, std::uint64_t seed, double tilt) {
  const std::size_t d = s.a.size();
  const double half_d = 0.5 * static_cast<double>(d);
  auto terms = run_batches(samples, seed, [&] {
    return [&, g = std::vector<double>(d)](Rng& rng) mutable {
      double norm2 = 0.0, z2 = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double z = rng.gaussian();
        g[i] = z * s.inv_sd[i];
        z2 += z * z;
        norm2 += g[i] * g[i];
      }
      double quad = 0.0;
      for (std::size_t i = 0; i < d; ++i) quad += s.a[i] * g[i] * g[i];
      // u = g/|g|; u^T P_hat u = |z|^2 / |g|^2.
      return s.c * quad / norm2 + s.log_det_term + half_d * std::log(z2 / norm2);
    };
  });
  LogEstimate est = summarize(terms, EstimateMethod::AngularIS);
  est.log_value += s.offset;
  est.tilt = tilt;
  return est;
}

// Euler-angle (Z-Y-Z) rotation entries squared, for the n = 3 quadrature.
struct So3Rule {
  std::vector<double> log_w;                // log quadrature weight
  std::vector<std::array<double, 9>> sq;    // R_ij^2, row-major
};

const So3Rule& so3_rule() {
  static const So3Rule rule = [] {
    constexpr std::size_t na = 64, nb = 64;
    const QuadratureRule gl = gauss_legendre(nb);
    So3Rule r;
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t ia = 0; ia < na; ++ia) {
      const double al = two_pi * static_cast<double>(ia) / na;
      const double ca = std::cos(al), sa = std::sin(al);
      for (std::size_t ib = 0; ib < nb; ++ib) {
        const double cb = gl.nodes[ib];
        const double sb = std::sqrt(std::max(0.0, 1.0 - cb * cb));
        for (std::size_t ig = 0; ig < na; ++ig) {
          const double ga = two_pi * static_cast<double>(ig) / na;
          const double cg = std::cos(ga), sg = std::sin(ga);
          const std::array<double, 9> m = {ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb,
                                           sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb,
                                           -sb * cg, sb * sg, cb};
          std::array<double, 9> sq;
          for (int t = 0; t < 9; ++t) sq[t] = m[t] * m[t];
          r.sq.push_back(sq);
          // Haar density sin(beta)/(8 pi^2) becomes 1/(8 pi^2) in cos(beta).
          const double w = (two_pi / na) * (two_pi / na) * gl.weights[ib] / (8.0 * std::numbers::pi * std::numbers::pi);
          r.log_w.push_back(std::log(w));
        }
      }
    }
    return r;
  }();
  return rule;
}

}  // namespace

std::string method_name(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::Plain:
      return "plain";
    case EstimateMethod::AngularIS:
      return "angular_is";
    case EstimateMethod::ExactN2:
      return "exact_n2";
    case EstimateMethod::AnnealedExact:
      return "annealed_exact";
    case EstimateMethod::AnnealedConditional:
      return "annealed_conditional";
    case EstimateMethod::AnnealedJoint:
      return "annealed_joint";
  }
  return "unknown";
}

double normalization(int beta, std::size_t k, std::size_t n) {
  return 2.0 / (static_cast<double>(beta) * static_cast<double>(k) * static_cast<double>(n));
}

LogEstimate spherical_mc(const Matrix& a, const DeformationSpec& deform, int beta, std::size_t samples,
                         std::uint64_t seed) {
  if (beta != 1) throw std::invalid_argument("spherical_mc: real symmetric input needs beta = 1");
  const auto eig = eig_sym(a).values;
  return spherical_mc_spectrum(eig, deform, beta, samples, seed);
}

LogEstimate spherical_mc_spectrum(std::span<const double> a_eigs, const DeformationSpec& deform, int beta,
                                  std::size_t samples, std::uint64_t seed) {
  require_beta(beta);
  if (deform.k() > a_eigs.size()) throw std::invalid_argument("spherical_mc: rank exceeds dimension");
  auto terms = run_batches(samples, seed, [&] {
    return [&](Rng& rng) { return haar_exponent(a_eigs, deform.thetas, beta, rng); };
  });
  return summarize(terms, EstimateMethod::Plain);
}

double log_bessel_i0(double x) {
  const double ax = std::abs(x);
  if (ax > 30.0) throw std::domain_error("log_bessel_i0: argument beyond series range");
  const double q = 0.25 * ax * ax;
  double term = 1.0, sum = 1.0;
  for (int m = 1; m < 500; ++m) {
    term *= q / (static_cast<double>(m) * static_cast<double>(m));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return std::log(sum);
}

double spherical_exact_n2(double lam1, double lam2, double theta, int beta) {
  if (beta != 1) throw std::invalid_argument("spherical_exact_n2: only beta = 1 has this closed form");
  return theta * (lam1 + lam2) / 2.0 + log_bessel_i0(theta * (lam1 - lam2) / 2.0);
}

LogEstimate spherical_rank1_is(std::span<const double> a_eigs, double theta, int beta, std::size_t samples,
                               double tilt, std::uint64_t seed) {
  require_beta(beta);
  if (a_eigs.empty()) throw std::invalid_argument("spherical_rank1_is: empty spectrum");
  if (theta == 0.0) {
    LogEstimate e;
    e.method = EstimateMethod::AngularIS;
    e.samples = samples;
    e.tilt = tilt < 0.0 ? 0.0 : tilt;
    return e;
  }
  std::vector<double> a(a_eigs.begin(), a_eigs.end());
  if (theta < 0.0) {
    // I_N(A, theta) = I_N(-A, -theta).
    for (auto& x : a) x = -x;
    theta = -theta;
  }
  if (tilt < 0.0) {
    static constexpr double kTilts[] = {0.5, 0.7, 0.9, 1.0};
    const std::size_t pilot = std::max<std::size_t>(2000, samples / 100);
    double best_err = std::numeric_limits<double>::infinity();
    double best = kTilts[0];
    for (std::size_t t = 0; t < std::size(kTilts); ++t) {
      const auto s = acg_setup(a, theta, beta, kTilts[t]);
      const auto est = run_acg(s, pilot, Rng::derive(seed ^ 0x9ea7c0de, t), kTilts[t]);
      if (est.stderr_log < best_err) best_err = est.stderr_log, best = kTilts[t];
    }
    tilt = best;
  }
  return run_acg(acg_setup(a, theta, beta, tilt), samples, seed, tilt);
}

double annealed_exact(const DeformationSpec& deform, int beta, std::size_t n) {
  require_beta(beta);
  if (n == 0 || deform.k() == 0) throw std::invalid_argument("annealed_exact: empty problem");
  NeumaierSum s;
  for (double t : deform.thetas) s.add(t * t / 2.0);
  return s.value() / static_cast<double>(deform.k());
}

LogEstimate annealed_mc(const EnsembleSpec& ensemble, const DeformationSpec& deform, std::size_t samples,
                        std::uint64_t seed, AnnealedMode mode) {
  require_beta(ensemble.beta);
  const std::size_t n = ensemble.n;
  const std::size_t k = deform.k();
  if (k == 0 || k > n) throw std::invalid_argument("annealed_mc: need 1 <= k <= N");
  const int beta = ensemble.beta;
  const double nd = static_cast<double>(n);
  const auto& th = deform.thetas;

  if (mode == AnnealedMode::Joint) {
    auto terms = run_batches(samples, seed, [&] {
      return [&](Rng& rng) {
        EnsembleSpec spec = ensemble;
        spec.seed = rng.next();
        double s = 0.0;
        if (beta == 1) {
          const Matrix x = sample_wigner_real(spec);
          const Matrix u = haar_columns(n, k, rng);
          for (std::size_t l = 0; l < k; ++l) {
            auto c = u.col(l);
            double q = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
              double xc = 0.0;
              for (std::size_t i = 0; i < n; ++i) xc += x(i, j) * c[i];
              q += xc * c[j];
            }
            s += th[l] * q;
          }
        } else {
          const CMatrix x = sample_wigner_complex(spec);
          const CMatrix u = haar_columns_complex(n, k, rng);
          for (std::size_t l = 0; l < k; ++l) {
            auto c = u.col(l);
            Complex q{};
            for (std::size_t j = 0; j < n; ++j) {
              Complex xc{};
              for (std::size_t i = 0; i < n; ++i) xc += std::conj(c[i]) * x(i, j);
              q += xc * c[j];
            }
            s += th[l] * q.real();
          }
        }
        return 0.5 * beta * nd * s;
      };
    });
    return summarize(terms, EstimateMethod::AnnealedJoint);
  }

  // Conditional on U, the exponent is linear in the independent entries,
  // so E_X factorizes into entry moment generating functions.
  const EntryLaw law = ensemble.law;
  auto terms = run_batches(samples, seed, [&] {
    return [&](Rng& rng) {
      NeumaierSum s;
      if (beta == 1) {
        const Matrix u = haar_columns(n, k, rng);
        const double diag_scale = std::sqrt(nd / 2.0);
        const double off_scale = std::sqrt(nd);
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t i = 0; i <= j; ++i) {
            double b = 0.0;
            for (std::size_t l = 0; l < k; ++l) b += th[l] * u(i, l) * u(j, l);
            s.add(entry_log_mgf(law, (i == j ? diag_scale : off_scale) * b));
          }
      } else {
        const CMatrix u = haar_columns_complex(n, k, rng);
        const double diag_scale = std::sqrt(nd);
        const double off_scale = std::sqrt(2.0 * nd);
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t i = 0; i <= j; ++i) {
            Complex b{};
            for (std::size_t l = 0; l < k; ++l) b += th[l] * u(i, l) * std::conj(u(j, l));
            if (i == j) {
              s.add(entry_log_mgf(law, diag_scale * b.real()));
            } else {
              s.add(entry_log_mgf(law, off_scale * b.real()));
              s.add(entry_log_mgf(law, off_scale * b.imag()));
            }
          }
      }
      return s.value();
    };
  });
  return summarize(terms, EstimateMethod::AnnealedConditional);
}

double spherical_exact_small(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw std::invalid_argument("spherical_exact_small: size mismatch");
  if (n == 0) return 0.0;
  if (n == 1) return 0.5 * a[0] * b[0];
  if (n == 2) return (a[0] + a[1]) * (b[0] + b[1]) / 2.0 + log_bessel_i0((a[0] - a[1]) * (b[0] - b[1]) / 2.0);
  if (n != 3) throw std::invalid_argument("spherical_exact_small: n must be at most 3");

  const So3Rule& rule = so3_rule();
  std::vector<double> e(rule.sq.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < e.size(); ++p) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += a[i] * b[j] * rule.sq[p][3 * i + j];
    e[p] = 1.5 * s + rule.log_w[p];
    mx = std::max(mx, e[p]);
  }
  NeumaierSum acc;
  for (double x : e) acc.add(std::exp(x - mx));
  return mx + std::log(acc.value());
}

DecompositionReport decomposition_check(std::span<const double> p, std::span<const double> q, std::size_t k,
                                        int beta) {
  if (beta != 1) throw std::invalid_argument("decomposition_check: exact evaluation is available for beta = 1");
  const std::size_t n = p.size();
  if (q.size() != n) throw std::invalid_argument("decomposition_check: size mismatch");
  if (n == 0 || n > 3) throw std::invalid_argument("decomposition_check: need 1 <= N <= 3");
  if (k < 1 || k > n) throw std::invalid_argument("decomposition_check: need 1 <= k <= N");
  for (std::size_t i = 1; i < n; ++i)
    if (p[i] > p[i - 1]) throw std::invalid_argument("decomposition_check: p must be non-increasing");

  const bool nonneg = std::all_of(q.begin() + static_cast<long>(k), q.end(), [](double x) { return x >= 0.0; });
  const bool nonpos = std::all_of(q.begin() + static_cast<long>(k), q.end(), [](double x) { return x <= 0.0; });
  if (!nonneg && !nonpos) throw std::invalid_argument("decomposition_check: Q2 entries must share a sign");

  std::vector<double> q1(n, 0.0);
  std::copy(q.begin(), q.begin() + static_cast<long>(k), q1.begin());
  const std::vector<double> q2(q.begin() + static_cast<long>(k), q.end());
  const std::size_t m = n - k;
  const double scale = m > 0 ? static_cast<double>(n) / static_cast<double>(m) : 0.0;
  std::vector<double> p_plus(m), p_minus(m);
  for (std::size_t i = 0; i < m; ++i) {
    p_plus[i] = scale * p[i];
    p_minus[i] = scale * p[k + i];
  }

  DecompositionReport r;
  const double first = spherical_exact_small(q1, p);
  r.middle = spherical_exact_small(q, p);
  r.lower = first + spherical_exact_small(q2, p_minus);
  r.upper = first + spherical_exact_small(q2, p_plus);
  r.reversed = !nonneg;
  if (r.reversed) std::swap(r.lower, r.upper);
  // Quadrature is accurate to ~1e-13 in the log; allow for it.
  constexpr double kSlack = 1e-11;
  r.holds = r.lower <= r.middle + kSlack && r.middle <= r.upper + kSlack;
  return r;
}

double limit_theory(const DeformationSpec& deform, std::span<const double> top, std::span<const double> bottom) {
  const std::size_t k = deform.k();
  if (k == 0) return 0.0;
  const std::size_t l = deform.l();
  std::vector<double> t(top.begin(), top.end());
  std::vector<double> b(bottom.begin(), bottom.end());
  std::sort(t.begin(), t.end(), std::greater<>());
  std::sort(b.begin(), b.end());  // ascending: b[0] is the smallest eigenvalue
  const Measure sigma = Measure::semicircle();
  NeumaierSum s;
  for (std::size_t i = 0; i < l; ++i) s.add(j_value(deform.thetas[i], i < t.size() ? t[i] : 2.0, sigma));
  // Negative temperatures, least negative first, pair with the eigenvalues
  // counted upward from the bottom so the most negative meets the smallest.
  const std::size_t neg = k - l;
  for (std::size_t j = 0; j < neg; ++j) {
    const std::size_t r = neg - 1 - j;  // rank from the bottom, 0 = smallest
    s.add(j_value(deform.thetas[l + j], r < b.size() ? b[r] : -2.0, sigma));
  }
  return s.value() / static_cast<double>(k);
}

LimitReport limit_check(std::span<const std::size_t> n_list, const DeformationSpec& deform,
                        std::span<const double> top, std::span<const double> bottom, int beta, std::size_t samples,
                        std::uint64_t seed) {
  require_beta(beta);
  if (deform.k() == 0) throw std::invalid_argument("limit_check: empty deformation");
  LimitReport rep;
  const double theory = limit_theory(deform, top, bottom);
  for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
    const std::size_t n = n_list[idx];
    const auto a = semicircle_spectrum(n, top, bottom);
    const std::uint64_t s = Rng::derive(seed, n);
    LimitRow row;
    row.n = n;
    row.estimate = deform.k() == 1 ? spherical_rank1_is(a, deform.thetas[0], beta, samples, -1.0, s)
                                   : spherical_mc_spectrum(a, deform, beta, samples, s);
    const double norm = normalization(beta, deform.k(), n);
    row.normalized = norm * row.estimate.log_value;
    row.normalized_stderr = norm * row.estimate.stderr_log;
    row.theory = theory;
    row.deviation = std::abs(row.normalized - theory);
    rep.rows.push_back(row);
  }
  rep.non_increasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (rep.rows[i].deviation > rep.rows[i - 1].deviation) rep.non_increasing = false;
  rep.final_deviation = rep.rows.empty() ? 0.0 : rep.rows.back().deviation;
  return rep;
}

}  // namespace sphint
