#include "sphint/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "json.hpp"
#include "sphint/numeric.hpp"

namespace sphint {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Semicircle CDF in the angle variable x = -2 cos t: F = (t - sin t cos t)/pi.
double semicircle_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  const double t = std::acos(-x / 2.0);
  return (t - std::sin(t) * std::cos(t)) / std::numbers::pi;
}

double semicircle_quantile(double p) {
  if (p <= 0.0) return -2.0;
  if (p >= 1.0) return 2.0;
  // Solve t - sin t cos t = pi p; the left side is increasing with
  // derivative 2 sin^2 t. Newton steps, kept inside a shrinking bracket.
  const double target = std::numbers::pi * p;
  double lo = 0.0, hi = std::numbers::pi;
  double t = std::numbers::pi * p;
  for (int it = 0; it < 100; ++it) {
    const double g = t - std::sin(t) * std::cos(t) - target;
    if (g > 0) hi = t; else lo = t;
    const double dg = 2.0 * std::sin(t) * std::sin(t);
    double next = dg > 0 ? t - g / dg : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) < 1e-16) {
      t = next;
      break;
    }
    t = next;
  }
  return -2.0 * std::cos(t);
}

// h(z) for z >= 2.
double semicircle_log_potential(double z) {
  const double r = std::sqrt(std::max(0.0, z * z - 4.0));
  return z * z / 4.0 - z * r / 4.0 + std::log((z + r) / 2.0) - 0.5;
}

std::vector<Atom> table_atoms(const std::vector<double>& q) {
  std::vector<Atom> out;
  out.reserve(q.size());
  const double w = 1.0 / static_cast<double>(q.size());
  for (double x : q) out.push_back({x, w});
  return out;
}

const std::vector<double>& cached_semicircle_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g(kQuantileGrid);
    for (std::size_t j = 0; j < kQuantileGrid; ++j)
      g[j] = semicircle_quantile((static_cast<double>(j) + 0.5) / static_cast<double>(kQuantileGrid));
    return g;
  }();
  return grid;
}

void check_outside_support(const Measure& mu, double z, const char* who) {
  if (std::isnan(z)) throw std::domain_error(std::string(who) + ": NaN argument");
  if (z > mu.left() && z < mu.right())
    throw std::domain_error(std::string(who) + ": argument lies inside the support");
}

// Atom view used by bl_distance: the semicircle is represented by its
// default quantile grid.
std::vector<Atom> atoms_for_testing(const Measure& mu) {
  if (mu.kind() == MeasureKind::Semicircle) return table_atoms(cached_semicircle_grid());
  return mu.atom_list();
}

}  // namespace

Measure::Measure() = default;

Measure Measure::semicircle() { return Measure(); }

Measure Measure::dirac(double x) { return atoms({{x, 1.0}}); }

Measure Measure::atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("Measure::atoms: no atoms");
  NeumaierSum total;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.x)) throw std::invalid_argument("Measure::atoms: non-finite position");
    if (!(a.w >= 0.0)) throw std::invalid_argument("Measure::atoms: negative weight");
    total.add(a.w);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) throw std::invalid_argument("Measure::atoms: weights do not sum to 1");
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
  std::vector<Atom> merged;
  for (const auto& a : atoms) {
    if (a.w == 0.0) continue;
    if (!merged.empty() && merged.back().x == a.x)
      merged.back().w += a.w;
    else
      merged.push_back(a);
  }
  Measure m;
  m.kind_ = MeasureKind::DiscreteAtoms;
  m.atoms_ = std::move(merged);
  return m;
}

Measure Measure::empirical(std::span<const double> points) {
  if (points.empty()) throw std::invalid_argument("Measure::empirical: no points");
  std::vector<Atom> a;
  a.reserve(points.size());
  const double w = 1.0 / static_cast<double>(points.size());
  for (double x : points) a.push_back({x, w});
  // Equal weights can miss 1 by a few ulps for large counts; renormalize
  // the last atom rather than reject.
  NeumaierSum s;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) s.add(a[i].w);
  a.back().w = 1.0 - s.value();
  return atoms(std::move(a));
}

Measure Measure::quantile_table(std::vector<double> quantiles) {
  if (quantiles.empty()) throw std::invalid_argument("Measure::quantile_table: empty table");
  for (std::size_t i = 0; i < quantiles.size(); ++i) {
    if (!std::isfinite(quantiles[i])) throw std::invalid_argument("Measure::quantile_table: non-finite value");
    if (i > 0 && quantiles[i] < quantiles[i - 1])
      throw std::invalid_argument("Measure::quantile_table: values must be non-decreasing");
  }
  Measure m;
  m.kind_ = MeasureKind::QuantileTable;
  m.atoms_ = table_atoms(quantiles);
  m.quantiles_ = std::move(quantiles);
  return m;
}

double Measure::left() const {
  switch (kind_) {
    case MeasureKind::Semicircle:
      return -2.0;
    case MeasureKind::DiscreteAtoms:
      return atoms_.front().x;
    case MeasureKind::QuantileTable:
      return quantiles_.front();
  }
  return 0.0;
}

double Measure::right() const {
  switch (kind_) {
    case MeasureKind::Semicircle:
      return 2.0;
    case MeasureKind::DiscreteAtoms:
      return atoms_.back().x;
    case MeasureKind::QuantileTable:
      return quantiles_.back();
  }
  return 0.0;
}

Measure Measure::reflected() const {
  switch (kind_) {
    case MeasureKind::Semicircle:
      return *this;
    case MeasureKind::DiscreteAtoms: {
      Measure m = *this;
      std::reverse(m.atoms_.begin(), m.atoms_.end());
      for (auto& a : m.atoms_) a.x = -a.x;
      return m;
    }
    case MeasureKind::QuantileTable: {
      std::vector<double> q(quantiles_.rbegin(), quantiles_.rend());
      for (auto& x : q) x = -x;
      return quantile_table(std::move(q));
    }
  }
  return *this;
}

double stieltjes(const Measure& mu, double z) {
  check_outside_support(mu, z, "stieltjes");
  if (mu.kind() == MeasureKind::Semicircle) {
    if (z >= 2.0) return (z - std::sqrt(z * z - 4.0)) / 2.0;
    return -(-z - std::sqrt(z * z - 4.0)) / 2.0;
  }
  NeumaierSum s;
  for (const auto& a : mu.atom_list()) {
    if (a.x == z) return z >= mu.right() ? kInf : -kInf;
    s.add(a.w / (z - a.x));
  }
  return s.value();
}

double inverse_stieltjes(const Measure& mu, double theta, double tol) {
  if (theta == 0.0 || std::isnan(theta)) throw std::domain_error("inverse_stieltjes: theta must be non-zero");
  if (theta < 0.0) return -inverse_stieltjes(mu.reflected(), -theta, tol);
  const double r = mu.right();
  const double edge = stieltjes(mu, r);
  if (theta > edge) throw std::out_of_range("inverse_stieltjes: theta exceeds G_mu(r(mu))");
  if (theta == edge) return r;
  if (mu.kind() == MeasureKind::Semicircle) return theta + 1.0 / theta;
  const double hi = r + 1.0 / theta + (r - mu.left());
  return bisect_root([&](double v) { return stieltjes(mu, v) - theta; }, r, hi, tol);
}

double log_potential(const Measure& mu, double z) {
  check_outside_support(mu, z, "log_potential");
  if (mu.kind() == MeasureKind::Semicircle) return semicircle_log_potential(std::abs(z));
  NeumaierSum s;
  for (const auto& a : mu.atom_list()) {
    if (a.x == z) return -kInf;
    s.add(a.w * std::log(std::abs(z - a.x)));
  }
  return s.value();
}

double quantile(const Measure& mu, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile: p must lie in (0,1)");
  if (mu.kind() == MeasureKind::Semicircle) return semicircle_quantile(p);
  if (mu.kind() == MeasureKind::QuantileTable) {
    // Atom j carries the mass ((j)/M, (j+1)/M].
    const auto& q = mu.quantile_values();
    const double m = static_cast<double>(q.size());
    auto j = static_cast<std::size_t>(std::ceil(p * m - 1e-12));
    j = std::clamp<std::size_t>(j, 1, q.size());
    return q[j - 1];
  }
  double cum = 0.0;
  for (const auto& a : mu.atom_list()) {
    cum += a.w;
    if (cum >= p - 1e-12) return a.x;
  }
  return mu.right();
}

std::vector<double> quantile_grid(const Measure& mu, std::size_t m) {
  if (m == 0) throw std::invalid_argument("quantile_grid: empty grid");
  if (mu.kind() == MeasureKind::Semicircle && m == kQuantileGrid) return cached_semicircle_grid();
  std::vector<double> g(m);
  for (std::size_t j = 0; j < m; ++j) g[j] = quantile(mu, (static_cast<double>(j) + 0.5) / static_cast<double>(m));
  return g;
}

Measure pushforward(const Measure& mu, const std::function<double(double)>& f) {
  if (mu.kind() == MeasureKind::DiscreteAtoms) {
    std::vector<Atom> a = mu.atom_list();
    for (auto& at : a) at.x = f(at.x);
    return Measure::atoms(std::move(a));
  }
  std::vector<double> q = mu.kind() == MeasureKind::Semicircle ? cached_semicircle_grid() : mu.quantile_values();
  for (auto& x : q) x = f(x);
  if (q.size() > 1 && q.front() > q.back()) std::reverse(q.begin(), q.end());
  return Measure::quantile_table(std::move(q));
}

double integrate(const Measure& mu, const std::function<double(double)>& f) {
  NeumaierSum s;
  if (mu.kind() == MeasureKind::Semicircle) {
    // d sigma = (2/pi) sqrt(1 - y^2) dy with x = 2y.
    constexpr std::size_t n = 4095;
    const double h = std::numbers::pi / static_cast<double>(n + 1);
    for (std::size_t j = 1; j <= n; ++j) {
      const double s1 = std::sin(h * static_cast<double>(j));
      s.add(2.0 / static_cast<double>(n + 1) * s1 * s1 * f(2.0 * std::cos(h * static_cast<double>(j))));
    }
    return s.value();
  }
  for (const auto& a : mu.atom_list()) s.add(a.w * f(a.x));
  return s.value();
}

double second_moment(const Measure& mu) {
  if (mu.kind() == MeasureKind::Semicircle) return 1.0;
  return integrate(mu, [](double x) { return x * x; });
}

double mass_at_or_below(const Measure& mu, double x) {
  if (mu.kind() == MeasureKind::Semicircle) return semicircle_cdf(x);
  NeumaierSum s;
  for (const auto& a : mu.atom_list())
    if (a.x <= x) s.add(a.w);
  return s.value();
}

double mass_at_or_above(const Measure& mu, double x) {
  if (mu.kind() == MeasureKind::Semicircle) return 1.0 - semicircle_cdf(x);
  NeumaierSum s;
  for (const auto& a : mu.atom_list())
    if (a.x >= x) s.add(a.w);
  return s.value();
}

double bl_distance(const Measure& mu, const Measure& nu) {
  const auto a = atoms_for_testing(mu);
  const auto b = atoms_for_testing(nu);
  const double lo = std::min(mu.left(), nu.left()) - 1.0;
  const double hi = std::max(mu.right(), nu.right()) + 1.0;
  constexpr int kGrid = 256;
  static constexpr double kHalfWidths[] = {0.5, 1.0, 2.0, 4.0};
  static constexpr double kRampWidths[] = {1.0, 2.0, 4.0};

  auto expect = [](const std::vector<Atom>& at, auto&& f) {
    NeumaierSum s;
    for (const auto& x : at) s.add(x.w * f(x.x));
    return s.value();
  };
  double best = 0.0;
  for (int j = 0; j < kGrid; ++j) {
    const double c = lo + (hi - lo) * j / (kGrid - 1);
    for (double h : kHalfWidths) {
      auto hat = [c, h](double x) { return 0.5 * std::max(0.0, 1.0 - std::abs(x - c) / h); };
      best = std::max(best, std::abs(expect(a, hat) - expect(b, hat)));
    }
    for (double w : kRampWidths) {
      auto ramp = [c, w](double x) { return std::clamp((x - c) / w, 0.0, 1.0); };
      best = std::max(best, std::abs(expect(a, ramp) - expect(b, ramp)));
    }
  }
  return best;
}

std::string measure_to_json(const Measure& mu) {
  nlohmann::json j;
  switch (mu.kind()) {
    case MeasureKind::Semicircle:
      j["kind"] = "semicircle";
      break;
    case MeasureKind::DiscreteAtoms: {
      j["kind"] = "atoms";
      auto arr = nlohmann::json::array();
      for (const auto& a : mu.atom_list()) arr.push_back({a.x, a.w});
      j["atoms"] = arr;
      break;
    }
    case MeasureKind::QuantileTable:
      j["kind"] = "quantiles";
      j["quantiles"] = mu.quantile_values();
      break;
  }
  return j.dump();
}

Measure measure_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("measure_from_json: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("measure_from_json: expected an object");
  std::string kind = j.value("kind", "");
  if (kind.empty()) kind = j.contains("atoms") ? "atoms" : j.contains("quantiles") ? "quantiles" : "";
  try {
    if (kind == "semicircle") return Measure::semicircle();
    if (kind == "atoms") {
      std::vector<Atom> atoms;
      for (const auto& pair : j.at("atoms")) {
        if (!pair.is_array() || pair.size() != 2) throw std::invalid_argument("measure_from_json: atom must be [x, w]");
        atoms.push_back({pair[0].get<double>(), pair[1].get<double>()});
      }
      return Measure::atoms(std::move(atoms));
    }
    if (kind == "quantiles") return Measure::quantile_table(j.at("quantiles").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("measure_from_json: ") + e.what());
  }
  throw std::invalid_argument("measure_from_json: unknown kind '" + kind + "'");
}

}  // namespace sphint
