#include "sphint/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sphint/asymptotics.hpp"
#include "sphint/numeric.hpp"
#include "sphint/rng.hpp"

namespace sphint {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kClip = 1e-9;

std::vector<double> sorted_spectrum(const Matrix& h) {
  auto values = eig_sym(h).values;
  for (auto& x : values)
    if (x < 0.0 && x > -1e-12) x = 0.0;
  return values;
}

// R = G_1 G_2 ... over all index pairs (i < j), each a Givens rotation.
Matrix givens_product(std::size_t k, std::span<const double> angles) {
  Matrix r = Matrix::identity(k);
  std::size_t a = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const double c = std::cos(angles[a]);
      const double s = std::sin(angles[a]);
      ++a;
      // Right-multiply by the rotation in the (i, j) plane.
      for (std::size_t row = 0; row < k; ++row) {
        const double ri = r(row, i), rj = r(row, j);
        r(row, i) = c * ri - s * rj;
        r(row, j) = s * ri + c * rj;
      }
    }
  return r;
}

Matrix coupling_from_params(std::size_t k, std::span<const double> x) {
  const Matrix r = givens_product(k, x.subspan(k));
  Matrix l(k, k);
  for (std::size_t t = 0; t < k; ++t) {
    const double m = std::clamp(x[t], kClip, 1.0 - kClip);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < k; ++i) l(i, j) += r(i, t) * m * r(j, t);
  }
  // Exact symmetry for the eigensolver's check.
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = j + 1; i < k; ++i) l(j, i) = l(i, j);
  return l;
}

}  // namespace

void VariationalProblem::validate() const {
  const std::size_t n = thetas.size();
  if (n == 0) throw std::invalid_argument("VariationalProblem: empty theta vector");
  if (lambdas.size() != n) throw std::invalid_argument("VariationalProblem: lambda/theta size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (thetas[i] < 0.0) throw std::invalid_argument("VariationalProblem: negative theta");
    if (i > 0 && (thetas[i] > thetas[i - 1] || lambdas[i] > lambdas[i - 1]))
      throw std::invalid_argument("VariationalProblem: thetas and lambdas must be non-increasing");
  }
  if (lambdas.back() < mu.right()) throw std::invalid_argument("VariationalProblem: lambda_k below r(mu)");
}

VariationalPoint feasible_from_coupling(std::span<const double> thetas, const Matrix& coupling) {
  const std::size_t k = thetas.size();
  if (coupling.rows() != k || coupling.cols() != k)
    throw std::invalid_argument("feasible_from_coupling: dimension mismatch");
  const SymEigen el = eig_sym(coupling, true);
  for (double x : el.values)
    if (x < -1e-10 || x > 1.0 + 1e-10) throw std::domain_error("feasible_from_coupling: coupling outside [0, I]");

  const Matrix sqrt_l = spectral_apply(el, [](double x) { return std::sqrt(std::clamp(x, 0.0, 1.0)); });
  const Matrix sqrt_c = spectral_apply(el, [](double x) { return std::sqrt(std::clamp(1.0 - x, 0.0, 1.0)); });
  const Matrix d = Matrix::diagonal(thetas);

  VariationalPoint p;
  p.coupling = coupling;
  auto conj = [&](const Matrix& s) {
    Matrix h = multiply(multiply(s, d), s);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = j + 1; i < k; ++i) h(j, i) = h(i, j) = 0.5 * (h(i, j) + h(j, i));
    return h;
  };
  p.phi = sorted_spectrum(conj(sqrt_c));
  p.psi = sorted_spectrum(conj(sqrt_l));
  return p;
}

double f_value(const VariationalProblem& problem, const VariationalPoint& point) {
  const std::size_t k = problem.k();
  if (point.phi.size() != k || point.psi.size() != k || problem.lambdas.size() != k)
    throw std::invalid_argument("f_value: dimension mismatch");
  const double lambda_k = problem.lambdas.back();
  NeumaierSum s;
  for (std::size_t i = 0; i < k; ++i) {
    const double theta = problem.thetas[i];
    const double phi = point.phi[i];
    s.add(problem.lambdas[i] * point.psi[i]);
    if (theta > 0.0) {
      if (phi <= 0.0) return -kInf;
      s.add(std::log(phi) - std::log(theta));
    }
    if (phi > 0.0) s.add(j_value(phi, lambda_k, problem.mu));
  }
  return s.value();
}

VariationalPoint candidate_point(const VariationalProblem& problem) {
  const std::size_t k = problem.k();
  Matrix l(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    const double theta = problem.thetas[i];
    if (theta <= 0.0) continue;
    const double g = stieltjes(problem.mu, problem.lambdas[i]);
    l(i, i) = std::clamp(1.0 - g / theta, 0.0, 1.0);
  }
  VariationalPoint p = feasible_from_coupling(problem.thetas, l);
  p.value = f_value(problem, p);
  return p;
}

double pairing_bound(const VariationalProblem& problem) {
  NeumaierSum s;
  for (std::size_t i = 0; i < problem.k(); ++i) s.add(j_value(problem.thetas[i], problem.lambdas[i], problem.mu));
  return s.value();
}

MaximizeResult maximize_m(const VariationalProblem& problem, int restarts, double tol, std::uint64_t seed) {
  problem.validate();
  const std::size_t k = problem.k();
  if (k > 8) throw std::invalid_argument("maximize_m: k must be at most 8");
  const std::size_t n_angles = k * (k - 1) / 2;

  MaximizeResult res;
  res.bound = pairing_bound(problem);
  res.best = candidate_point(problem);

  auto consider = [&](const VariationalPoint& p) {
    if (p.value > res.best.value) res.best = p;
  };
  auto evaluate = [&](std::span<const double> x) {
    VariationalPoint p = feasible_from_coupling(problem.thetas, coupling_from_params(k, x));
    p.value = f_value(problem, p);
    return p;
  };

  // Fixed extremes L = 0 and L = I.
  for (double m : {0.0, 1.0}) {
    Matrix l(k, k);
    for (std::size_t i = 0; i < k; ++i) l(i, i) = m;
    VariationalPoint p = feasible_from_coupling(problem.thetas, l);
    p.value = f_value(problem, p);
    consider(p);
  }

  NelderMeadOptions opts;
  opts.ftol = tol;
  opts.max_evaluations = 1500;

  std::vector<double> cand_m(k);
  for (std::size_t i = 0; i < k; ++i) cand_m[i] = std::clamp(res.best.coupling(i, i), kClip, 1.0 - kClip);

  // Diagonal-only subfamily from the candidate point.
  {
    auto f = [&](std::span<const double> m) {
      std::vector<double> x(m.begin(), m.end());
      x.resize(k + n_angles, 0.0);
      return evaluate(x).value;
    };
    const auto r = nelder_mead_maximize(f, cand_m, opts);
    res.evaluations += r.evaluations;
    std::vector<double> x = r.x;
    x.resize(k + n_angles, 0.0);
    consider(evaluate(x));
  }

  std::vector<std::vector<double>> starts;
  {
    std::vector<double> x = cand_m;
    x.resize(k + n_angles, 0.0);
    starts.push_back(x);
    starts.push_back(std::vector<double>(k + n_angles, kClip));
    std::vector<double> top(k + n_angles, 0.0);
    std::fill(top.begin(), top.begin() + static_cast<long>(k), 1.0 - kClip);
    starts.push_back(top);
  }
  Rng rng(seed);
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> x(k + n_angles);
    for (std::size_t i = 0; i < k; ++i) x[i] = rng.uniform01();
    for (std::size_t a = 0; a < n_angles; ++a) x[k + a] = std::numbers::pi * (2.0 * rng.uniform01() - 1.0);
    starts.push_back(std::move(x));
  }

  auto f = [&](std::span<const double> x) { return evaluate(x).value; };
  for (const auto& s : starts) {
    const auto r = nelder_mead_maximize(f, s, opts);
    res.evaluations += r.evaluations;
    consider(evaluate(r.x));
  }
  res.gap = res.bound - res.best.value;
  return res;
}

CsResult cs_minimize(double theta, double tol) {
  if (theta < 0.0) throw std::domain_error("cs_minimize: theta must be non-negative");
  auto f = [theta](double q) {
    return 0.5 * (theta * theta / 2.0 * (1.0 - q * q) + q / (1.0 - q) + std::log1p(-q));
  };
  const Minimum1D m = golden_section_minimize(f, 0.0, 1.0 - 1e-9, tol);
  return {m.x, m.value};
}

MiVariationalResult mi_variational(const Measure& eta, double gamma, const RateDescriptor& rate, std::size_t grid,
                                   double tol) {
  if (gamma < 0.0) throw std::domain_error("mi_variational: gamma must be non-negative");
  if (eta.left() < 0.0) throw std::domain_error("mi_variational: prior must be supported on [0, inf)");
  if (grid == 0) throw std::invalid_argument("mi_variational: empty grid");
  const Measure sigma = Measure::semicircle();
  const std::vector<double> e = quantile_grid(eta, grid);
  const double sg = std::sqrt(gamma);

  std::vector<double> target(grid);
  for (std::size_t j = 0; j < grid; ++j) target[j] = gamma > 0.0 ? bbp_map(e[j], gamma) : 2.0;

  auto coord = [&](std::size_t j, double q) {
    double v = -gamma / 4.0 * q * q + 0.5 * j_value(sg * q, target[j], sigma);
    if (rate.kind == RateDescriptor::Kind::QuadraticPenalty) v -= rate.kappa * (q - e[j]) * (q - e[j]);
    return v;
  };
  auto total = [&](const std::vector<double>& q) {
    NeumaierSum s;
    for (std::size_t j = 0; j < grid; ++j) s.add(coord(j, q[j]));
    return s.value() / static_cast<double>(grid);
  };

  MiVariationalResult res;
  if (rate.kind == RateDescriptor::Kind::Deterministic || gamma == 0.0) {
    res.quantiles = e;
    res.value = total(e);
    return res;
  }

  // Coordinate-wise maximization on [lo, hi]: coarse scan, then golden
  // section around the best scan point.
  auto argmax = [&](std::size_t j, double lo, double hi) {
    if (hi - lo <= 1e-15) return lo;
    auto neg = [&](double q) { return -coord(j, q); };
    constexpr int kScan = 64;
    double bq = lo, bv = neg(lo);
    for (int i = 1; i <= kScan; ++i) {
      const double q = lo + (hi - lo) * i / kScan;
      const double v = neg(q);
      if (v < bv) bq = q, bv = v;
    }
    const double step = (hi - lo) / kScan;
    const Minimum1D m = golden_section_minimize(neg, std::max(lo, bq - step), std::min(hi, bq + step), 1e-13);
    return m.value <= bv ? m.x : bq;
  };

  const double upper = 2.0 * e.back() + 4.0;
  std::vector<double> q(grid);
  for (std::size_t j = 0; j < grid; ++j) q[j] = argmax(j, 0.0, upper);
  q = isotonic_projection(q);
  for (auto& x : q) x = std::clamp(x, 0.0, upper);

  res.converged = false;
  double prev = total(q);
  for (int sweep = 1; sweep <= 200; ++sweep) {
    double change = 0.0;
    for (std::size_t j = 0; j < grid; ++j) {
      const double lo = j == 0 ? 0.0 : q[j - 1];
      const double hi = j + 1 == grid ? upper : q[j + 1];
      const double nq = argmax(j, lo, hi);
      if (coord(j, nq) > coord(j, q[j])) {
        change = std::max(change, std::abs(nq - q[j]));
        q[j] = nq;
      }
    }
    const double cur = total(q);
    res.sweeps = sweep;
    if (change <= 1e-9 || std::abs(cur - prev) <= tol) {
      res.converged = true;
      prev = cur;
      break;
    }
    prev = cur;
  }
  res.quantiles = std::move(q);
  res.value = prev;
  return res;
}

}  // namespace sphint
