// One-dimensional optimization, quadrature rules, and log-domain reductions
// shared by the formula modules and the Monte-Carlo estimators.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sphint {

struct Minimum1D {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section search for a minimum of f on [lo, hi]. Stops when the
// bracket is narrower than tol. The endpoints are also evaluated so a
// minimum sitting on the boundary is returned exactly.
Minimum1D golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                  double tol = 1e-12);

// Root of a monotone function on [lo, hi] by bisection; f(lo) and f(hi)
// must have opposite signs (or one of them be zero).
double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-15,
                   int max_iter = 400);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(std::size_t n);

// Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                        int max_depth = 50);

// Compensated (Neumaier) summation.
class NeumaierSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// ln( (1/n) sum exp(x_i) ) for the given log-terms.
double log_mean_exp(std::span<const double> log_terms);

struct JackknifeLogMean {
  double log_mean = 0.0;
  double stderr_log = 0.0;
};

// log-mean-exp together with the delete-1 jackknife standard error of the
// log-scale estimate. Needs at least two terms.
JackknifeLogMean jackknife_log_mean_exp(std::span<const double> log_terms);

// Least-squares projection of y onto non-decreasing sequences with the given
// positive weights (pool-adjacent-violators).
std::vector<double> isotonic_projection(std::span<const double> y, std::span<const double> weights = {});

struct NelderMeadOptions {
  double initial_step = 0.2;
  double ftol = 1e-12;
  double xtol = 1e-10;
  int max_evaluations = 4000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

// Nelder-Mead maximization of f from start.
NelderMeadResult nelder_mead_maximize(const std::function<double(std::span<const double>)>& f,
                                      std::vector<double> start, const NelderMeadOptions& opts = {});

}  // namespace sphint
