#pragma once

#include <functional>

namespace tubelab::quadrature {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive 15-point Gauss-Kronrod on [a, b]. `rel_tol` is relative to the
/// L1 norm of the integrand; `abs_tol` is checked against the reported error
/// and a ConvergenceError is thrown if both are missed.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-13, double abs_tol = 1e-10);

}  // namespace tubelab::quadrature
