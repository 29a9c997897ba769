// Acceptance suite: runs every criterion, prints one PASS/FAIL line each and
// exits nonzero if any fails. Reference values are computed here from
// closed forms or independent quadrature, never from the library routine
// under test.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "sphint/applications.hpp"
#include "sphint/asymptotics.hpp"
#include "sphint/montecarlo.hpp"
#include "sphint/parallel.hpp"
#include "sphint/randmat.hpp"
#include "sphint/variational.hpp"

using namespace sphint;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Verdict()> body;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Records the worst violation of |got - want| <= tol.
struct Worst {
  double excess = -1.0;  // max of |got - want| - tol
  double err = 0.0;
  void check(double got, double want, double tol) {
    const double e = std::abs(got - want);
    if (!(e - tol <= excess)) {
      excess = e - tol;
      err = e;
    }
    if (std::isnan(got)) excess = 1.0;
  }
  bool ok() const { return excess <= 0.0; }
};

const Measure kSigma = Measure::semicircle();

// I(x) via t = 2 cosh(u): int_0^{acosh(x/2)} 4 sinh^2(u) du, composite Simpson.
double rate_quadrature(double x) {
  const double top = std::acosh(std::abs(x) / 2.0);
  const int m = 4000;
  const double h = top / m;
  double s = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * 4.0 * std::sinh(i * h) * std::sinh(i * h);
  }
  return s * h / 3.0;
}

Verdict c1_j_closed_form() {
  Worst w;
  for (int i = 1; i <= 9; ++i) {
    const double t = 0.1 * i;
    w.check(j_value(t, 2.0, kSigma), t * t / 2.0, 1e-9);
  }
  for (double t = 1.0; t <= 3.0 + 1e-12; t += 0.25) w.check(j_value(t, 2.0, kSigma), 2.0 * t - std::log(t) - 1.5, 1e-9);
  // Jump across theta = 1 from linearly extrapolated one-sided limits.
  const double e = 1e-4;
  const double left = 2.0 * j_value(1.0 - e, 2.0, kSigma) - j_value(1.0 - 2.0 * e, 2.0, kSigma);
  const double right = 2.0 * j_value(1.0 + e, 2.0, kSigma) - j_value(1.0 + 2.0 * e, 2.0, kSigma);
  const double jump = std::abs(left - right);
  return {w.ok() && jump < 1e-6, fmt("max err %.2e, branch jump %.2e", w.err, jump)};
}

Verdict c2_spiked_identity() {
  Worst w;
  for (double x : {1.5, 2.0, 4.0, 9.0}) {
    const double r = std::sqrt(x);
    w.check(j_value(r, r + 1.0 / r, kSigma), x - std::log(x) - 1.0 / (2.0 * x), 1e-9);
  }
  return {w.ok(), fmt("max err %.2e", w.err)};
}

Verdict c3_rate_functions() {
  Worst edge, quad, zero;
  edge.check(rate_i(2.0), 0.0, 0.0);
  edge.check(rate_i(-2.0), 0.0, 0.0);
  for (double x : {2.1, 2.5, 3.0, 4.0, 6.0}) quad.check(rate_i(x), rate_quadrature(x), 1e-8);
  for (double t : {1.0, 1.5, 2.0, 3.0}) zero.check(rate_i_theta(t, t + 1.0 / t), 0.0, 1e-8);
  int violations = 0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const double t = 2.0 * i / 19.0;
      const double x = 2.0 + 4.0 * j / 19.0;
      const double tt = std::max(t, 1.0);
      const double d = x - (tt + 1.0 / tt);
      const double v = rate_i_theta(t, x);
      if (v < 0.5 * d * d - 1e-9 || v > (x * x + t * t) / 2.0 + 1e-12) ++violations;
    }
  return {edge.ok() && quad.ok() && zero.ok() && violations == 0,
          fmt("quadrature err %.2e, zero err %.2e, envelope violations %.0f", quad.err, zero.err, violations)};
}

Verdict c4_crisanti_sommers() {
  Worst v, q;
  for (double t : {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0}) {
    const auto r = cs_minimize(t);
    const double sk = t < 1.0 ? t * t / 4.0 : t - std::log(t) / 2.0 - 0.75;
    v.check(r.value, sk, 1e-6);
    q.check(r.q_star, std::max(0.0, 1.0 - 1.0 / t), 1e-4);
  }
  return {v.ok() && q.ok(), fmt("value err %.2e, q* err %.2e", v.err, q.err)};
}

Verdict c5_variational_bound() {
  Rng rng(20240605);
  int above = 0, attained_checked = 0, attained_failed = 0;
  double worst_excess = -1e300, worst_attain = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + rng.next() % 4;
    VariationalProblem p{kSigma, {}, {}};
    for (std::size_t i = 0; i < k; ++i) {
      p.lambdas.push_back(2.0 + 2.0 * rng.uniform01());
      p.thetas.push_back(0.2 + 2.8 * rng.uniform01());
    }
    std::sort(p.lambdas.rbegin(), p.lambdas.rend());
    std::sort(p.thetas.rbegin(), p.thetas.rend());
    // Oracle for the bound: sum of closed-form J values on the semicircle.
    double bound = 0.0;
    bool all_above = true;
    for (std::size_t i = 0; i < k; ++i) {
      const double l = p.lambdas[i], t = p.thetas[i];
      const double g = (l - std::sqrt(l * l - 4.0)) / 2.0;
      if (t < g) {
        all_above = false;
        bound += t * t / 2.0;
      } else {
        // Writing lambda = u + 1/u with u >= 1, the log potential is ln u + 1/(2u^2).
        const double u = (l + std::sqrt(l * l - 4.0)) / 2.0;
        bound += t * l - std::log(t) - 1.0 - (std::log(u) + 1.0 / (2.0 * u * u));
      }
    }
    const auto r = maximize_m(p, 8, 1e-10, 1000 + trial);
    worst_excess = std::max(worst_excess, r.best.value - bound);
    if (r.best.value > bound + 1e-6) ++above;
    if (all_above) {
      ++attained_checked;
      const double gap = std::abs(f_value(p, candidate_point(p)) - bound);
      worst_attain = std::max(worst_attain, gap);
      if (gap > 1e-6) ++attained_failed;
    }
  }
  return {above == 0 && attained_failed == 0,
          fmt("max(value - bound) %.2e; candidate attains bound on %.0f cases, worst gap %.2e", worst_excess,
              attained_checked, worst_attain)};
}

Verdict c6_exact_n2() {
  // ln I_2 by 64-point trapezoid over the circle of first columns.
  const auto angle_quadrature = [](double l1, double l2, double theta) {
    const int m = 64;
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
      const double a = 2.0 * std::numbers::pi * j / m;
      s += std::exp(theta * (l1 * std::cos(a) * std::cos(a) + l2 * std::sin(a) * std::sin(a)));
    }
    return std::log(s / m);
  };
  Worst w;
  for (double l1 : {0.5, 1.0, 2.0, 3.0, 4.0})
    for (double t : {0.25, 0.5, 1.0, 2.0, 3.0}) w.check(spherical_exact_n2(l1, -1.0, t), angle_quadrature(l1, -1.0, t), 1e-10);
  const double exact = spherical_exact_n2(1.0, -1.0, 1.0);
  const auto mc = spherical_mc(Matrix::diagonal(std::vector<double>{1.0, -1.0}), DeformationSpec::from({1.0}), 1,
                               1000000, 6);
  const double dev = mc.log_value - exact;
  const bool mc_ok = std::abs(dev) <= 3.0 * mc.stderr_log;
  return {w.ok() && mc_ok, fmt("quadrature err %.2e; MC dev %.2e (3 se = %.2e)", w.err, dev, 3.0 * mc.stderr_log)};
}

Verdict c7_annealed() {
  const std::size_t n = 50;
  const auto d = DeformationSpec::from({1.0, 0.5});
  const double theory = (1.0 * 1.0 / 2.0 + 0.5 * 0.5 / 2.0) / 2.0;
  const double norm = 2.0 / (1.0 * 2.0 * n);
  const auto g = annealed_mc({n, 1, EntryLaw::Gaussian, 7}, d, 100000, 7);
  const auto r = annealed_mc({n, 1, EntryLaw::Rademacher, 7}, d, 100000, 7);
  const double dg = norm * g.log_value - theory, sg = norm * g.stderr_log;
  const double dr = norm * r.log_value - theory, sr = norm * r.stderr_log;
  // The Gaussian estimator has zero variance, so allow for rounding.
  const bool ok = std::abs(dg) <= 3.0 * sg + 1e-10 && dr <= 3.0 * sr;
  return {ok, fmt("gaussian dev %.2e (se %.1e); rademacher dev %.3e", dg, sg, dr) + fmt(" (se %.1e)", sr)};
}

Verdict c8_limit() {
  const std::vector<std::size_t> ns = {50, 100, 200};
  const std::vector<double> top = {2.5};
  // J(2, 2.5, sigma): 2.5 = u + 1/u with u = 2, log potential ln 2 + 1/8.
  const double target = 2.0 * 2.5 - std::log(2.0) - 1.0 - (std::log(2.0) + 0.125);
  const auto sup = limit_check(ns, DeformationSpec::from({2.0}), top, {}, 1, 100000, 11);
  const auto sub = limit_check(ns, DeformationSpec::from({0.5}), {}, {}, 1, 100000, 12);
  const double final_sup = std::abs(sup.rows.back().normalized - target);
  bool monotone = true;
  for (std::size_t i = 1; i < sup.rows.size(); ++i)
    if (std::abs(sup.rows[i].normalized - target) > std::abs(sup.rows[i - 1].normalized - target)) monotone = false;
  const double final_sub = std::abs(sub.rows.back().normalized - 0.125);
  std::string detail = fmt("theta=2 devs %.4f %.4f %.4f", std::abs(sup.rows[0].normalized - target),
                           std::abs(sup.rows[1].normalized - target), final_sup);
  detail += fmt("; theta=0.5 dev at N=200 %.4f", final_sub);
  return {final_sup < 0.1 && monotone && final_sub < 0.05, detail};
}

Verdict c9_sandwich() {
  Rng rng(99);
  int failed = 0, reversed = 0;
  for (int c = 0; c < 20; ++c) {
    const std::size_t n = 2 + c % 2;
    const std::size_t k = 1 + rng.next() % (n - 1);
    std::vector<double> p(n), q(n);
    for (auto& x : p) x = -1.5 + 3.0 * rng.uniform01();
    std::sort(p.rbegin(), p.rend());
    const double sign = c < 10 ? 1.0 : -1.0;  // sign of the Q2 block
    for (std::size_t i = 0; i < n; ++i) q[i] = i < k ? -1.5 + 3.0 * rng.uniform01() : sign * 1.5 * rng.uniform01();
    const auto r = decomposition_check(p, q, k);
    if (!r.holds) ++failed;
    if (r.reversed) ++reversed;
  }
  return {failed == 0 && reversed == 10, fmt("%.0f of 20 violated; %.0f reversed-direction cases", failed, reversed)};
}

Verdict c10_bbp() {
  const std::size_t n = 400, reps = 50;
  std::string detail;
  bool ok = true;
  const std::vector<double> thetas = {0.5, 1.5, 2.0};
  for (std::size_t ti = 0; ti < thetas.size(); ++ti) {
    const double t = thetas[ti];
    std::vector<double> top(reps);
    parallel_for(reps, [&](std::size_t r) {
      top[r] = spiked_sample({n, 1, EntryLaw::Gaussian, Rng::derive(400 + ti, r)}, DeformationSpec::from({t}))
                   .eigenvalues.front();
    });
    double mean = 0.0;
    for (double x : top) mean += x / reps;
    const double predicted = t <= 1.0 ? 2.0 : t + 1.0 / t;
    const double dev = std::abs(mean - predicted);
    if (dev > 0.05) ok = false;
    detail += (detail.empty() ? "|mean - predicted| at theta " : ", ") + fmt("%.1f: %.4f", t, dev);
  }
  return {ok, detail};
}

Verdict c11_denoising() {
  const std::vector<double> one = {1.0};
  Worst mi, fd, paper;
  std::vector<double> grid, vals;
  for (int i = 1; i <= 40; ++i) {
    const double g = 0.1 * i;
    const double closed = g <= 1.0 ? g / 4.0 : std::log(g) / 2.0 + 1.0 / (4.0 * g);
    const double v = mi_finite_rank(g, one);
    mi.check(v, closed, 1e-10);
    grid.push_back(g);
    vals.push_back(v);
    const auto d = mmse_from_derivative(g, one, 1e-4);
    const double m = g <= 1.0 ? 1.0 : (2.0 - 1.0 / g) / g;
    if (!d.near_transition) {
      fd.check(d.value, mmse(g, one), 1e-4);
      paper.check(mmse(g, one), m, 1e-12);
    }
  }
  bool shape = true;
  for (std::size_t i = 1; i < vals.size(); ++i)
    if (vals[i] < vals[i - 1]) shape = false;
  for (std::size_t i = 1; i + 1 < vals.size(); ++i)
    if (vals[i + 1] - 2.0 * vals[i] + vals[i - 1] > 1e-12) shape = false;
  return {mi.ok() && fd.ok() && paper.ok() && shape,
          fmt("MI err %.2e, derivative vs MMSE err %.2e, MMSE vs closed form err %.2e", mi.err, fd.err, paper.err) +
              (shape ? ", concave nondecreasing" : ", shape violated")};
}

Verdict c12_vector_spin() {
  const auto f = [](double t) { return t < 1.0 ? t * t / 4.0 : t - std::log(t) / 2.0 - 0.75; };
  VectorSpinProblem id{Matrix::identity(3), {0.4, 1.2, 2.5}};
  const double reduction = std::abs(vector_spin_free_energy(id) - (f(0.4) + f(1.2) + f(2.5)) / 3.0);
  VectorSpinProblem two{Matrix::from_rows({{1.0, 0.5}, {0.5, 1.0}}), {1.0, 1.0}};
  const double hand = std::abs(vector_spin_free_energy(two) - 0.2330);
  double worst = 0.0;
  for (double t : {0.5, 2.0}) {
    const auto row = vector_spin_mc_check(VectorSpinProblem{Matrix::identity(1), {t}}, 64, 100000, 31);
    worst = std::max(worst, std::abs(row.estimate - f(t)));
  }
  return {reduction < 1e-12 && hand < 1e-4 && worst < 0.15,
          fmt("Q=I err %.1e, k=2 err %.1e, MC worst dev %.4f", reduction, hand, worst)};
}

Verdict c13_rate_deformed() {
  const Measure xi = Measure::atoms({{-3.0, 0.25}, {-0.5, 0.25}, {0.8, 0.25}, {2.0, 0.25}});
  // Minimizer: x -> sign(x) (|x| v 1 + 1/(|x| v 1)) applied atom by atom.
  const Measure star = Measure::atoms({{-(3.0 + 1.0 / 3.0), 0.25}, {-2.0, 0.25}, {2.0, 0.25}, {2.5, 0.25}});
  const double at_min = rate_deformed(xi, star);
  const std::vector<Measure> perturbed = {
      Measure::atoms({{-(3.0 + 1.0 / 3.0), 0.25}, {-2.0, 0.25}, {2.0, 0.25}, {2.8, 0.25}}),
      Measure::atoms({{-(3.0 + 1.0 / 3.0), 0.25}, {-2.2, 0.25}, {2.0, 0.25}, {2.5, 0.25}}),
      Measure::atoms({{-3.0, 0.25}, {-2.0, 0.25}, {2.3, 0.25}, {2.5, 0.25}}),
  };
  double smallest = 1e300;
  for (const auto& nu : perturbed) smallest = std::min(smallest, rate_deformed(xi, nu));
  return {std::abs(at_min) < 1e-6 && smallest > 0.0, fmt("value at minimizer %.2e, smallest perturbed %.4f", at_min, smallest)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "J closed forms on the semicircle", 1, c1_j_closed_form},
      {2, "spiked-identity J values", 1, c2_spiked_identity},
      {3, "rate-function suite", 5, c3_rate_functions},
      {4, "Crisanti-Sommers equivalence", 1, c4_crisanti_sommers},
      {5, "variational bound", 120, c5_variational_bound},
      {6, "exact N=2 oracle", 60, c6_exact_n2},
      {7, "annealed integral", 120, c7_annealed},
      {8, "limit check", 300, c8_limit},
      {9, "decomposition sandwich", 60, c9_sandwich},
      {10, "BBP top eigenvalue", 180, c10_bbp},
      {11, "denoising MI and MMSE", 5, c11_denoising},
      {12, "vector spin", 180, c12_vector_spin},
      {13, "deformed rate function", 5, c13_rate_deformed},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = v.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %2d: %s [%.2f s of %.0f s] %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                c.budget_seconds, v.detail.c_str(), in_time ? "" : " (over time budget)");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
