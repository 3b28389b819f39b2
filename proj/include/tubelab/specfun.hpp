#pragma once

#include <cstddef>

namespace tubelab::specfun {

struct SpecFunResult {
  double value = 0.0;
  double est_abs_error = 0.0;
};

/// ln Gamma(x) for x > 0. Throws DomainError for x <= 0.
double ln_gamma(double x);

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
///
/// Continued fraction (modified Lentz) on whichever side of the symmetry
/// point (a+1)/(a+b+2) converges fastest.
double reg_inc_beta(double a, double b, double x);

/// Gauss hypergeometric 2F1(a, b; c; z) by direct power series, |z| < 1.
///
/// The returned error is an estimate: a geometric bound on the series tail
/// plus a rounding term proportional to the sum of |terms|. Summation stops
/// once the tail bound is below `tol` or below the rounding floor.
/// Throws DomainError if c is a nonpositive integer or |z| >= 1, and
/// ConvergenceError if `max_terms` is exhausted.
SpecFunResult gauss_2f1(double a, double b, double c, double z,
                        double tol = 1e-14, std::size_t max_terms = 200000);

/// Volume of the q-dimensional Euclidean ball of radius eps.
double disc_volume(int q, double eps);

/// Surface volume of the round n-sphere of the given radius, Vol(S^n_R).
double sphere_volume(int n, double radius = 1.0);

}  // namespace tubelab::specfun
