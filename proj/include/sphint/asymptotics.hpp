// The rank-one spherical-integral exponent J(theta, lambda, mu) and the
// large-deviation rate functions for extreme eigenvalues of Wigner matrices
// (plain and deformed).
#pragma once

#include "sphint/measures.hpp"

namespace sphint {

// J(theta, lambda, mu) = theta*lambda' + (v - lambda')G(v) - ln|theta|
//                        - int ln|v - x| dmu(x) - 1,
// with lambda' = max(lambda, r(mu)); v = lambda' when G(lambda') <= theta
// and v = G^{-1}(theta) otherwise. J(0, ., .) = 0 (the removable limit).
// Negative theta uses J(theta, lambda, mu) = J(-theta, -lambda, reflected mu).
double j_value(double theta, double lambda, const Measure& mu);

// I(x) = int_2^|x| sqrt(t^2 - 4) dt for |x| >= 2, and 0 on (-2, 2).
double rate_i(double x);

// Rate function of the largest eigenvalue of a rank-one deformed GOE,
//   I_theta(x) = I(x) - J(theta, x, sigma) - inf_{y >= 2} (I(y) - J(theta, y, sigma)),
// +infinity for x < 2. Negative theta: I_theta(x) = I_{-theta}(-x).
double rate_i_theta(double theta, double x);

// inf_{y >= 2} I(y) - J(theta, y, sigma), by golden section with a dense
// scan fallback when two bracketings disagree.
double rate_i_theta_offset(double theta);

// int I dnu when nu puts mass 1/2 on each of ]-inf,-2] and [2,+inf[ (to
// within 1e-9), +infinity otherwise.
double rate_extremal(const Measure& nu);

// int_0^1 I_{Q_xi(t)}(Q_nu(t)) dt on the midpoint quantile grid. The lower
// half t < 1/2 pairs bottom eigenvalues with the reflected problem, so
// there the integrand is I_{-Q_xi(t)}(-Q_nu(t)). Same half-mass condition
// as rate_extremal.
double rate_deformed(const Measure& xi, const Measure& nu);

// Limiting position of the top eigenvalue of a Wigner matrix plus a
// rank-one spike sqrt(gamma)*theta: 2 below the transition, t + 1/t above
// it with t = sqrt(gamma)*theta.
double bbp_map(double theta, double gamma);

// int_0^1 J(Q_xi(t), Q_nu(t), sigma) dt on the midpoint quantile grid.
double j_functional(const Measure& xi, const Measure& nu);

}  // namespace sphint
