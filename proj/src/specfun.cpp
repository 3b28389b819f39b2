#include "tubelab/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tubelab/errors.hpp"
#include "specfun_internal.hpp"

namespace tubelab::specfun {

namespace detail {

long double ln_gamma_ld(long double x) {
  // Shift into the asymptotic range, then Stirling with 7 Bernoulli terms.
  long double shift = 0.0L;
  long double prod = 1.0L;
  while (x < 15.0L) {
    prod *= x;
    x += 1.0L;
    if (prod > 1e300L) {
      shift -= std::log(prod);
      prod = 1.0L;
    }
  }
  shift -= std::log(prod);

  const long double inv = 1.0L / x;
  const long double inv2 = inv * inv;
  // B_{2k} / (2k (2k-1)) for k = 1..7
  const long double series =
      inv * (1.0L / 12.0L +
             inv2 * (-1.0L / 360.0L +
                     inv2 * (1.0L / 1260.0L +
                             inv2 * (-1.0L / 1680.0L +
                                     inv2 * (1.0L / 1188.0L +
                                             inv2 * (-691.0L / 360360.0L +
                                                     inv2 * (1.0L / 156.0L)))))));
  constexpr long double half_ln_two_pi = 0.918938533204672741780329736406L;
  return (x - 0.5L) * std::log(x) - x + half_ln_two_pi + series + shift;
}

}  // namespace detail

double ln_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("ln_gamma: argument must be finite and > 0, got " + std::to_string(x));
  }
  return static_cast<double>(detail::ln_gamma_ld(x));
}

namespace {

// Continued fraction for I_x(a,b), evaluated where it converges quickly.
long double beta_cf(long double a, long double b, long double x) {
  constexpr long double tiny = 1e-300L;
  constexpr long double eps = 1e-18L;
  constexpr int max_iter = 200000;

  const long double qab = a + b;
  const long double qap = a + 1.0L;
  const long double qam = a - 1.0L;
  long double c = 1.0L;
  long double d = 1.0L - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0L / d;
  long double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const long double m2 = 2.0L * m;
    long double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0L + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0L + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0L / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0L + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0L + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0L / d;
    const long double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0L) < eps) return h;
  }
  throw ConvergenceError("reg_inc_beta: continued fraction did not converge");
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("reg_inc_beta: a and b must be finite and > 0");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("reg_inc_beta: x must lie in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const long double la = a;
  const long double lb = b;
  const long double lx = x;
  const long double ly = 1.0L - lx;
  const long double log_front = detail::ln_gamma_ld(la + lb) - detail::ln_gamma_ld(la) -
                                detail::ln_gamma_ld(lb) + la * std::log(lx) +
                                lb * std::log1p(-lx);
  const long double front = std::exp(log_front);

  long double result;
  if (lx < (la + 1.0L) / (la + lb + 2.0L)) {
    result = front * beta_cf(la, lb, lx) / la;
  } else {
    result = 1.0L - front * beta_cf(lb, la, ly) / lb;
  }
  if (result < 0.0L) result = 0.0L;
  if (result > 1.0L) result = 1.0L;
  return static_cast<double>(result);
}

SpecFunResult gauss_2f1(double a, double b, double c, double z, double tol,
                        std::size_t max_terms) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(z)) {
    throw DomainError("gauss_2f1: non-finite argument");
  }
  if (c <= 0.0 && c == std::floor(c)) {
    throw DomainError("gauss_2f1: c must not be a nonpositive integer");
  }
  if (!(std::fabs(z) < 1.0)) {
    throw DomainError("gauss_2f1: |z| must be < 1");
  }
  if (!(tol > 0.0)) throw DomainError("gauss_2f1: tol must be > 0");

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double az = std::fabs(z);
  double sum = 1.0;
  double term = 1.0;
  double abs_sum = 1.0;
  for (std::size_t k = 0; k < max_terms; ++k) {
    const double kk = static_cast<double>(k);
    term *= (a + kk) * (b + kk) / ((c + kk) * (kk + 1.0)) * z;
    sum += term;
    abs_sum += std::fabs(term);
    if (term == 0.0) {
      // Series terminated (a or b a nonpositive integer) or z == 0.
      return {sum, 4.0 * eps * abs_sum};
    }
    // For j > k+1 the ratio |t_{j}/t_{j-1}| is bounded by
    // |z| (1 + |a-c|/(j-1+c)) (1 + |b-1|/j), decreasing once j-1+c > 0.
    const double next = kk + 1.0;
    if (next + c > 0.0) {
      const double r = az * (1.0 + std::fabs(a - c) / (next + c)) *
                       (1.0 + std::fabs(b - 1.0) / (next + 1.0));
      if (r < 1.0) {
        const double tail = std::fabs(term) * r / (1.0 - r);
        const double rounding = 4.0 * eps * abs_sum;
        if (tail <= tol || tail <= eps * std::fabs(sum)) {
          return {sum, tail + rounding};
        }
      }
    }
  }
  throw ConvergenceError("gauss_2f1: series did not converge within term cap");
}

double disc_volume(int q, double eps) {
  if (q < 1) throw DomainError("disc_volume: q must be a positive integer");
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw DomainError("disc_volume: eps must be finite and >= 0");
  }
  // V_q = V_{q-2} * 2 pi / q with V_0 = 1, V_1 = 2.
  double unit = (q % 2 == 0) ? 1.0 : 2.0;
  for (int k = (q % 2 == 0) ? 2 : 3; k <= q; k += 2) {
    unit *= 2.0 * std::numbers::pi / k;
  }
  return unit * std::pow(eps, q);
}

double sphere_volume(int n, double radius) {
  if (n < 0) throw DomainError("sphere_volume: dimension must be >= 0");
  if (!(radius > 0.0)) throw DomainError("sphere_volume: radius must be > 0");
  return (n + 1) * disc_volume(n + 1, 1.0) * std::pow(radius, n);
}

}  // namespace tubelab::specfun
