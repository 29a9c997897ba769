#include "sphint/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sphint {

Minimum1D golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo <= hi)) throw std::invalid_argument("golden_section_minimize: empty bracket");
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 500 && (b - a) > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  Minimum1D best{c, fc};
  if (fd < best.value) best = {d, fd};
  const double flo = f(lo);
  if (flo <= best.value) best = {lo, flo};
  const double fhi = f(hi);
  if (fhi < best.value) best = {hi, fhi};
  return best;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol, int max_iter) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  double fhi = f(hi);
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw std::invalid_argument("bisect_root: root not bracketed");
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= tol) return mid;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: zero nodes");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pi = std::acos(-1.0);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
      p0 = p1;
      p1 = p2;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
  }
  return rule;
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

void NeumaierSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

double log_mean_exp(std::span<const double> log_terms) {
  if (log_terms.empty()) throw std::invalid_argument("log_mean_exp: no terms");
  const double m = *std::max_element(log_terms.begin(), log_terms.end());
  if (!std::isfinite(m)) return m;
  NeumaierSum s;
  for (double x : log_terms) s.add(std::exp(x - m));
  return m + std::log(s.value() / static_cast<double>(log_terms.size()));
}

JackknifeLogMean jackknife_log_mean_exp(std::span<const double> log_terms) {
  const std::size_t n = log_terms.size();
  if (n < 2) throw std::invalid_argument("jackknife_log_mean_exp: need at least two terms");
  const double m = *std::max_element(log_terms.begin(), log_terms.end());
  JackknifeLogMean out;
  if (!std::isfinite(m)) {
    out.log_mean = m;
    return out;
  }
  NeumaierSum s;
  for (double x : log_terms) s.add(std::exp(x - m));
  const double total = s.value();
  out.log_mean = m + std::log(total / static_cast<double>(n));

  const double nm1 = static_cast<double>(n - 1);
  NeumaierSum mean_loo;
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rest = total - std::exp(log_terms[i] - m);
    if (rest <= total * 1e-300 || rest <= 0.0) {
      out.stderr_log = std::numeric_limits<double>::infinity();
      return out;
    }
    loo[i] = std::log(rest / nm1);
    mean_loo.add(loo[i]);
  }
  const double mbar = mean_loo.value() / static_cast<double>(n);
  NeumaierSum ss;
  for (double v : loo) ss.add((v - mbar) * (v - mbar));
  out.stderr_log = std::sqrt(nm1 / static_cast<double>(n) * ss.value());
  return out;
}

std::vector<double> isotonic_projection(std::span<const double> y, std::span<const double> weights) {
  const std::size_t n = y.size();
  if (!weights.empty() && weights.size() != n) throw std::invalid_argument("isotonic_projection: weight size");
  struct Block {
    double value;
    double weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Block b{y[i], weights.empty() ? 1.0 : weights[i], 1};
    while (!blocks.empty() && blocks.back().value > b.value) {
      const Block& top = blocks.back();
      const double w = top.weight + b.weight;
      b = {(top.value * top.weight + b.value * b.weight) / w, w, top.count + b.count};
      blocks.pop_back();
    }
    blocks.push_back(b);
  }
  std::vector<double> out;
  out.reserve(n);
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.value);
  return out;
}

NelderMeadResult nelder_mead_maximize(const std::function<double(std::span<const double>)>& f,
                                      std::vector<double> start, const NelderMeadOptions& opts) {
  const std::size_t dim = start.size();
  NelderMeadResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    const double v = f(x);
    // Maximize f <=> minimize -f; non-finite values count as very poor.
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : -v;
  };
  if (dim == 0) {
    res.value = f(start);
    res.evaluations = 1;
    return res;
  }

  std::vector<std::vector<double>> simplex(dim + 1, start);
  std::vector<double> fv(dim + 1);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += opts.initial_step;
  for (std::size_t i = 0; i <= dim; ++i) fv[i] = eval(simplex[i]);

  std::vector<std::size_t> idx(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  while (res.evaluations < opts.max_evaluations) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = idx.front(), worst = idx.back(), second = idx[dim - 1];

    double spread = 0.0;
    for (std::size_t i = 0; i <= dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) spread = std::max(spread, std::abs(simplex[i][j] - simplex[best][j]));
    const double fspread = std::abs(fv[worst] - fv[best]);
    if (std::isfinite(fv[best]) && std::isfinite(fv[worst]) && fspread <= opts.ftol && spread <= opts.xtol) break;
    if (spread <= 1e-14) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= dim; ++i)
      if (i != worst)
        for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j] / static_cast<double>(dim);

    for (std::size_t j = 0; j < dim; ++j) trial[j] = centroid[j] + (centroid[j] - simplex[worst][j]);
    const double fr = eval(trial);
    if (fr < fv[best]) {
      for (std::size_t j = 0; j < dim; ++j) trial2[j] = centroid[j] + 2.0 * (centroid[j] - simplex[worst][j]);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        fv[worst] = fe;
      } else {
        simplex[worst] = trial;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = trial;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    for (std::size_t j = 0; j < dim; ++j)
      trial2[j] = outside ? centroid[j] + 0.5 * (trial[j] - centroid[j])
                          : centroid[j] + 0.5 * (simplex[worst][j] - centroid[j]);
    const double fc = eval(trial2);
    if (fc < std::min(fr, fv[worst])) {
      simplex[worst] = trial2;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < dim; ++j) simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
      fv[i] = eval(simplex[i]);
    }
  }
  const std::size_t best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = simplex[best];
  res.value = -fv[best];
  return res;
}

}  // namespace sphint
