#include "sphint/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "sphint/numeric.hpp"

namespace sphint {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfMassTol = 1e-9;

double objective(double theta, double y) { return rate_i(y) - j_value(theta, y, Measure::semicircle()); }

// I_theta(x) on the right half-line for any sign of theta.
double right_side_rate(double theta, double x, double offset) {
  if (x < 2.0) return kInf;
  return std::max(0.0, objective(theta, x) - offset);
}

bool half_mass(const Measure& nu) {
  return std::abs(mass_at_or_below(nu, -2.0) - 0.5) <= kHalfMassTol &&
         std::abs(mass_at_or_above(nu, 2.0) - 0.5) <= kHalfMassTol;
}

}  // namespace

double j_value(double theta, double lambda, const Measure& mu) {
  if (std::isnan(theta) || std::isnan(lambda)) throw std::domain_error("j_value: NaN input");
  if (theta == 0.0) return 0.0;
  if (theta < 0.0) return j_value(-theta, -lambda, mu.reflected());

  const double lp = std::max(lambda, mu.right());
  const double g_edge = stieltjes(mu, lp);
  const double v = g_edge <= theta ? lp : inverse_stieltjes(mu, theta);
  const double gv = v == lp ? g_edge : theta;
  // (v - lambda') G(v) vanishes on the first branch even if G(lambda') is
  // infinite at an atom edge.
  const double cross = v == lp ? 0.0 : (v - lp) * gv;
  return theta * lp + cross - std::log(theta) - log_potential(mu, v) - 1.0;
}

double rate_i(double x) {
  const double a = std::abs(x);
  if (a <= 2.0) return 0.0;
  const double r = std::sqrt(a * a - 4.0);
  return a * r / 2.0 - 2.0 * std::log((a + r) / 2.0);
}

double rate_i_theta_offset(double theta) {
  const double at = std::abs(theta);
  const double hi = std::max(2.0, at > 0.0 ? at + 1.0 / at : 2.0) + 5.0;
  auto f = [theta](double y) { return objective(theta, y); };

  const Minimum1D whole = golden_section_minimize(f, 2.0, hi, 1e-12);
  const double mid = 0.5 * (2.0 + hi);
  const Minimum1D left = golden_section_minimize(f, 2.0, mid, 1e-12);
  const Minimum1D right = golden_section_minimize(f, mid, hi, 1e-12);
  double best = std::min({whole.value, left.value, right.value});

  if (std::abs(whole.value - best) > 1e-9) {
    // Bracketings disagree: the objective is not unimodal here. Scan
    // densely and polish around the best grid point.
    constexpr int kScan = 4000;
    double by = 2.0, bv = f(2.0);
    for (int i = 1; i <= kScan; ++i) {
      const double y = 2.0 + (hi - 2.0) * i / kScan;
      const double v = f(y);
      if (v < bv) by = y, bv = v;
    }
    const double step = (hi - 2.0) / kScan;
    const Minimum1D polish = golden_section_minimize(f, std::max(2.0, by - step), std::min(hi, by + step), 1e-12);
    best = std::min({best, bv, polish.value});
  }
  // The stationary point of the semicircle objective is explicit for
  // theta > 0; including it only tightens the infimum.
  if (theta > 0.0) {
    const double t = std::max(theta, 1.0);
    best = std::min(best, f(t + 1.0 / t));
  }
  return best;
}

double rate_i_theta(double theta, double x) {
  if (std::isnan(theta) || std::isnan(x)) throw std::domain_error("rate_i_theta: NaN input");
  if (theta < 0.0) return rate_i_theta(-theta, -x);
  if (x < 2.0) return kInf;
  if (theta == 0.0) return rate_i(x);
  return right_side_rate(theta, x, rate_i_theta_offset(theta));
}

double rate_extremal(const Measure& nu) {
  if (!half_mass(nu)) return kInf;
  return integrate(nu, rate_i);
}

double rate_deformed(const Measure& xi, const Measure& nu) {
  if (!half_mass(nu)) return kInf;
  const auto qx = quantile_grid(xi);
  const auto qn = quantile_grid(nu);
  const std::size_t m = qx.size();
  std::map<double, double> offsets;
  auto offset = [&](double theta) {
    auto it = offsets.find(theta);
    if (it != offsets.end()) return it->second;
    const double v = theta == 0.0 ? 0.0 : rate_i_theta_offset(theta);
    offsets.emplace(theta, v);
    return v;
  };

  NeumaierSum s;
  for (std::size_t j = 0; j < m; ++j) {
    const bool bottom = 2 * j < m;
    const double theta = bottom ? -qx[j] : qx[j];
    const double x = bottom ? -qn[j] : qn[j];
    const double r = theta == 0.0 ? (x < 2.0 ? kInf : rate_i(x)) : right_side_rate(theta, x, offset(theta));
    if (!std::isfinite(r)) return kInf;
    s.add(r);
  }
  return s.value() / static_cast<double>(m);
}

double bbp_map(double theta, double gamma) {
  if (theta < 0.0 || !(gamma > 0.0)) throw std::domain_error("bbp_map: need theta >= 0 and gamma > 0");
  const double t = std::sqrt(gamma) * theta;
  return t <= 1.0 ? 2.0 : t + 1.0 / t;
}

double j_functional(const Measure& xi, const Measure& nu) {
  const auto qx = quantile_grid(xi);
  const auto qn = quantile_grid(nu);
  const Measure sigma = Measure::semicircle();
  NeumaierSum s;
  for (std::size_t j = 0; j < qx.size(); ++j) s.add(j_value(qx[j], qn[j], sigma));
  return s.value() / static_cast<double>(qx.size());
}

}  // namespace sphint
