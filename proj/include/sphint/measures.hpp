// Compactly supported probability measures on the real line and the
// transforms built on them: Stieltjes transform, logarithmic potential,
// quantile function.
//
// Three representations are supported. The semicircle law has closed forms
// for everything. Discrete measures are finite atom lists. A quantile table
// is M values of Q_mu on the midpoint grid (j + 1/2)/M; it is treated as the
// discrete measure with M atoms of mass 1/M at those values, which makes
// quantile-grid quadrature exact for it.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sphint {

enum class MeasureKind { Semicircle, DiscreteAtoms, QuantileTable };

struct Atom {
  double x = 0.0;
  double w = 0.0;
};

// Default size of quantile grids used for quantile-coupled integrals.
inline constexpr std::size_t kQuantileGrid = 4096;

class Measure {
 public:
  Measure();  // the semicircle law

  static Measure semicircle();
  static Measure dirac(double x);
  // Weights must be non-negative and sum to 1 within 1e-12. Atoms are
  // sorted by position and coincident positions merged.
  static Measure atoms(std::vector<Atom> atoms);
  // Equal-mass atoms at the given positions (an empirical measure).
  static Measure empirical(std::span<const double> points);
  // Quantile values on the midpoint grid; must be non-decreasing.
  static Measure quantile_table(std::vector<double> quantiles);

  MeasureKind kind() const { return kind_; }
  // Atoms of a DiscreteAtoms measure (sorted), or the equal-mass atoms
  // represented by a QuantileTable. Empty for the semicircle.
  const std::vector<Atom>& atom_list() const { return atoms_; }
  const std::vector<double>& quantile_values() const { return quantiles_; }

  double left() const;   // l(mu)
  double right() const;  // r(mu)

  // Image under x -> -x.
  Measure reflected() const;

 private:
  MeasureKind kind_ = MeasureKind::Semicircle;
  std::vector<Atom> atoms_;
  std::vector<double> quantiles_;
};

// G_mu(z) = int 1/(z - x) dmu(x) for z outside the open convex hull of the
// support. At an edge carrying an atom the value is +-infinity. Throws
// std::domain_error for l(mu) < z < r(mu).
double stieltjes(const Measure& mu, double z);

// v with G_mu(v) = theta. Right branch for theta > 0, reflected branch for
// theta < 0. Throws std::out_of_range if |theta| exceeds the edge value of
// G_mu and std::domain_error for theta = 0.
double inverse_stieltjes(const Measure& mu, double theta, double tol = 1e-14);

// int ln|z - x| dmu(x) outside the open support hull.
double log_potential(const Measure& mu, double z);

// Left-continuous generalized inverse of the CDF, 0 < p < 1.
double quantile(const Measure& mu, double p);

// Q_mu((j + 1/2)/m) for j = 0..m-1. The semicircle grid at the default size
// is computed once and cached.
std::vector<double> quantile_grid(const Measure& mu, std::size_t m = kQuantileGrid);

// f_# mu for a monotone map f. Atoms and quantiles are mapped; the
// semicircle becomes a quantile table of default size.
Measure pushforward(const Measure& mu, const std::function<double(double)>& f);

// int f dmu. Exact for atoms; Gauss-Chebyshev of the second kind (in the
// variable x = 2 cos phi) for the semicircle.
double integrate(const Measure& mu, const std::function<double(double)>& f);

double second_moment(const Measure& mu);

// mu(]-inf, x]) and mu([x, +inf[).
double mass_at_or_below(const Measure& mu, double x);
double mass_at_or_above(const Measure& mu, double x);

// Bounded-Lipschitz distance estimated as the largest discrepancy over a
// fixed dictionary of 1-Lipschitz test functions with total variation at
// most 1: hats of height 1/2 and ramps from 0 to 1, placed on a 256-point
// grid spanning both supports.
double bl_distance(const Measure& mu, const Measure& nu);

// JSON form: {"kind":"semicircle"}, {"kind":"atoms","atoms":[[x,w],...]} or
// {"kind":"quantiles","quantiles":[...]}. Parsing throws
// std::invalid_argument on malformed input.
std::string measure_to_json(const Measure& mu);
Measure measure_from_json(const std::string& text);

}  // namespace sphint
