#include "tubelab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "tubelab/errors.hpp"

namespace tubelab::quadrature {

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("integrate: limits must be finite");
  }
  if (a == b) return {0.0, 0.0};
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 20, rel_tol, &error, &l1);
  if (!std::isfinite(value)) throw ConvergenceError("integrate: non-finite result");
  if (error > abs_tol && error > rel_tol * l1 * 10.0) {
    throw ConvergenceError("integrate: requested tolerance not reached");
  }
  return {value, error};
}

}  // namespace tubelab::quadrature
