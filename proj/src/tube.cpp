#include "tubelab/tube.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "tubelab/errors.hpp"
#include "tubelab/quadrature.hpp"
#include "tubelab/specfun.hpp"

namespace tubelab::tube {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Relative slack when checking the nonnegative-cosine window d t <= pi/2.
constexpr double kWindowSlack = 1e-12;

// (q+2)(q+4)...(q+2j)
double shifted_double_factorial(int q, int j) {
  double p = 1.0;
  for (int i = 1; i <= j; ++i) p *= q + 2 * i;
  return p;
}

double flat_formula(const TubeSpec& spec) {
  double bracket = 1.0;
  for (int j = 1; j <= spec.n / 2; ++j) {
    bracket += spec.kappas[j - 1] * std::pow(spec.eps, 2 * j) /
               shifted_double_factorial(spec.q, j);
  }
  return spec.vol_m * specfun::disc_volume(spec.q, spec.eps) * bracket;
}

double sinc_t(double d, double t) { return d == 0.0 ? t : std::sin(d * t) / d; }

}  // namespace

SpectralData::SpectralData(std::vector<double> d) : d_(std::move(d)) {
  for (double v : d_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError("SpectralData: eigenvalues must be finite and >= 0");
    }
  }
}

SpectralData SpectralData::isotropic(std::size_t n, double value) {
  return SpectralData(std::vector<double>(n, value));
}

double SpectralData::max() const {
  return d_.empty() ? 0.0 : *std::max_element(d_.begin(), d_.end());
}

double SpectralData::sum_squares() const {
  return std::accumulate(d_.begin(), d_.end(), 0.0,
                         [](double acc, double v) { return acc + v * v; });
}

void TubeSpec::validate() const {
  if (n < 1) throw DomainError("TubeSpec: n must be >= 1");
  if (q < 1) throw DomainError("TubeSpec: q must be >= 1");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("TubeSpec: eps must be > 0");
  if (!(vol_m > 0.0) || !std::isfinite(vol_m)) throw DomainError("TubeSpec: vol_m must be > 0");
  if (kappas.size() != static_cast<std::size_t>(n / 2)) {
    throw DimensionError("TubeSpec: expected " + std::to_string(n / 2) +
                         " mean curvatures, got " + std::to_string(kappas.size()));
  }
  for (double k : kappas) {
    if (!std::isfinite(k)) throw DomainError("TubeSpec: non-finite curvature");
  }
  if (const auto* sphere = std::get_if<SphereAmbient>(&ambient)) {
    if (!(sphere->radius > 0.0)) throw DomainError("TubeSpec: sphere radius must be > 0");
    if (!(eps < kHalfPi * sphere->radius)) {
      throw DomainError("TubeSpec: eps must be < pi R / 2 for a sphere ambient");
    }
  } else if (const auto* sym = std::get_if<SymmetricCodim1Ambient>(&ambient)) {
    if (q != 1) throw DomainError("TubeSpec: symmetric ambient requires q = 1");
    if (sym->spectrum.size() != static_cast<std::size_t>(n)) {
      throw DimensionError("TubeSpec: spectrum length must equal n");
    }
    const double window = sym->spectrum.max() > 0.0 ? kHalfPi / sym->spectrum.max()
                                                    : std::numeric_limits<double>::infinity();
    if (!(sym->t_max > 0.0) || sym->t_max > window * (1.0 + kWindowSlack)) {
      throw DomainError("TubeSpec: t_max must lie in (0, pi / (2 max d)]");
    }
    if (eps > sym->t_max) throw DomainError("TubeSpec: eps must be <= t_max");
  }
}

double weyl_flat_volume(const TubeSpec& spec) {
  spec.validate();
  if (!std::holds_alternative<FlatAmbient>(spec.ambient)) {
    throw DomainError("weyl_flat_volume: spec ambient must be flat");
  }
  return flat_formula(spec);
}

double constant_curvature_kappa(int n, int j, double r) {
  if (n < 1 || j < 1 || 2 * j > n) {
    throw DomainError("constant_curvature_kappa: need 1 <= j and 2j <= n");
  }
  if (!(r > 0.0)) throw DomainError("constant_curvature_kappa: r must be > 0");
  // n! / (2^j j! (n-2j)!) = prod_{i=n-2j+1}^{n} i / (2^j j!)
  double value = 1.0;
  for (int i = n - 2 * j + 1; i <= n; ++i) value *= i;
  for (int i = 1; i <= j; ++i) value /= 2.0 * i;
  return value * std::pow(r, -2.0 * j);
}

double stirling_kappa_estimate(int n, int j, double eps_over_r) {
  if (j < 1 || n < 2 * j) throw DomainError("stirling_kappa_estimate: need n >= 2j >= 2");
  double denom = 1.0;
  for (int i = 1; i <= j; ++i) denom *= 2.0 * i;
  return std::pow(n * eps_over_r, 2 * j) / denom;
}

double weyl_sphere_volume(const TubeSpec& spec) {
  spec.validate();
  const auto* sphere = std::get_if<SphereAmbient>(&spec.ambient);
  if (sphere == nullptr) throw DomainError("weyl_sphere_volume: spec ambient must be a sphere");

  const double radius = sphere->radius;
  const double s = std::sin(spec.eps / radius);
  const double z = s * s;
  const double q = spec.q;
  // 2 pi^{q/2} / Gamma(q/2) = Vol(S^{q-1}) = q * Vol(D^q)
  const double prefactor = q * specfun::disc_volume(spec.q, 1.0);

  double total = 0.0;
  double denom = q;  // q (q+2) ... (q+2j)
  for (int j = 0; j <= spec.n / 2; ++j) {
    if (j > 0) denom *= q + 2.0 * j;
    const double big_k = j == 0 ? spec.vol_m : spec.kappas[j - 1] * spec.vol_m;
    if (big_k == 0.0) continue;
    // int_0^{eps/R} sin^{q+2j-1} cos^{n-2j} = s^{q+2j}/(q+2j) 2F1(a, b; a+1; s^2)
    const double a = j + q / 2.0;
    const double b = j - (spec.n - 1) / 2.0;
    const auto hyp = specfun::gauss_2f1(a, b, a + 1.0, z, 1e-16);
    total += big_k * std::pow(radius, 2 * j + q) * std::pow(s, q + 2 * j) / denom * hyp.value;
  }
  return prefactor * total;
}

double flat_vs_sphere_relative_error(const TubeSpec& spec) {
  const double sphere = weyl_sphere_volume(spec);
  TubeSpec flat = spec;
  flat.ambient = FlatAmbient{};
  return std::fabs(sphere / flat_formula(flat) - 1.0);
}

double totally_geodesic_tube_volume(const TubeSpec& spec) {
  spec.validate();
  const auto* sym = std::get_if<SymmetricCodim1Ambient>(&spec.ambient);
  if (sym == nullptr) {
    throw DomainError("totally_geodesic_tube_volume: spec ambient must be symmetric");
  }
  const auto& spectrum = sym->spectrum;
  const auto integral = quadrature::integrate(
      [&](double t) { return totally_geodesic_density(spectrum, t); }, 0.0, spec.eps);
  return spec.vol_m * 2.0 * integral.value;
}

double tube_volume(const TubeSpec& spec) {
  return std::visit(
      [&](const auto& ambient) -> double {
        using T = std::decay_t<decltype(ambient)>;
        if constexpr (std::is_same_v<T, FlatAmbient>) {
          return weyl_flat_volume(spec);
        } else if constexpr (std::is_same_v<T, SphereAmbient>) {
          return weyl_sphere_volume(spec);
        } else {
          return totally_geodesic_tube_volume(spec);
        }
      },
      spec.ambient);
}

SecondFundamentalForm SecondFundamentalForm::zero(int n, int q) {
  SecondFundamentalForm sff;
  sff.K.assign(q, Eigen::MatrixXd::Zero(n, n));
  sff.omega.assign(q, 0.0);
  if (q > 0) sff.omega[0] = 1.0;
  return sff;
}

void SecondFundamentalForm::validate(int n, double tol) const {
  if (K.empty() || K.size() != omega.size()) {
    throw DimensionError("SecondFundamentalForm: need one director cosine per matrix");
  }
  double norm2 = 0.0;
  for (std::size_t s = 0; s < K.size(); ++s) {
    if (K[s].rows() != n || K[s].cols() != n) {
      throw DimensionError("SecondFundamentalForm: K^s must be n x n");
    }
    if (n > 0 && (K[s] - K[s].transpose()).cwiseAbs().maxCoeff() > tol) {
      throw DomainError("SecondFundamentalForm: K^s must be symmetric");
    }
    norm2 += omega[s] * omega[s];
  }
  if (std::fabs(norm2 - 1.0) > tol) {
    throw DomainError("SecondFundamentalForm: director cosines must have unit norm");
  }
}

Eigen::MatrixXd SecondFundamentalForm::weighted() const {
  if (K.empty()) return {};
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(K.front().rows(), K.front().cols());
  for (std::size_t s = 0; s < K.size(); ++s) sum += omega[s] * K[s];
  return sum;
}

double totally_geodesic_density(const SpectralData& spectrum, double t) {
  // runs of equal values are summed in log space: log cos x = log1p(-2 sin^2(x/2))
  const auto& d = spectrum.values();
  double log_sum = 0.0;
  bool negative = false;
  for (std::size_t i = 0; i < d.size();) {
    std::size_t j = i + 1;
    while (j < d.size() && d[j] == d[i]) ++j;
    const double run = static_cast<double>(j - i);
    const double x = d[i] * t;
    const double c = std::cos(x);
    if (c == 0.0) return 0.0;
    if (c > 0.0) {
      const double s = std::sin(0.5 * x);
      log_sum += run * std::log1p(-2.0 * s * s);
    } else {
      log_sum += run * std::log(-c);
      if ((j - i) % 2 == 1) negative = !negative;
    }
    i = j;
  }
  const double p = std::exp(log_sum);
  return negative ? -p : p;
}

double symmetric_tube_density(const SpectralData& spectrum, const SecondFundamentalForm& sff,
                              double t) {
  const int n = static_cast<int>(spectrum.size());
  sff.validate(n);
  const Eigen::MatrixXd k = sff.weighted();
  if (k.isZero(0.0)) return totally_geodesic_density(spectrum, t);

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    const double d = spectrum.values()[a];
    m.row(a) = sinc_t(d, t) * k.row(a);
    m(a, a) += std::cos(d * t);
  }
  return m.determinant();
}

double gaussian_bound(const SpectralData& spectrum, double t) {
  if (!(t >= 0.0)) throw DomainError("gaussian_bound: t must be >= 0");
  if (spectrum.max() * t > kHalfPi * (1.0 + kWindowSlack)) {
    throw DomainError("gaussian_bound: d_a t must not exceed pi/2");
  }
  return std::exp(-0.5 * t * t * spectrum.sum_squares());
}

JacobiSeriesState::JacobiSeriesState(const Eigen::MatrixXd& A, int order)
    : A_(A), order_(order) {
  if (order < 1) throw DomainError("JacobiSeriesState: order must be >= 1");
  if (A.rows() != A.cols() || A.rows() == 0) {
    throw DimensionError("JacobiSeriesState: curvature matrix must be square");
  }
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff())) {
    throw DomainError("JacobiSeriesState: curvature matrix must be symmetric");
  }
  const auto n = A.rows();
  a_coeffs_.assign(order + 1, Eigen::MatrixXd::Zero(n, n));
  b_coeffs_.assign(order + 1, Eigen::MatrixXd::Zero(n, n));
  b_coeffs_[1] = Eigen::MatrixXd::Identity(n, n);
  for (int j = 1; j < order; ++j) {
    a_coeffs_[j + 1] = -b_coeffs_[j] * A_;
    b_coeffs_[j + 1] = a_coeffs_[j];
  }
}

Eigen::MatrixXd jacobi_series_eval(const JacobiSeriesState& state,
                                   const Eigen::MatrixXd& k_weighted, double t) {
  const auto n = state.curvature().rows();
  if (k_weighted.rows() != n || k_weighted.cols() != n) {
    throw DimensionError("jacobi_series_eval: K must match the curvature dimension");
  }
  Eigen::MatrixXd j_mat = Eigen::MatrixXd::Identity(n, n);
  double scale = 1.0;
  for (int j = 1; j <= state.order(); ++j) {
    scale *= t / j;
    j_mat += (state.a_coeff(j) + state.b_coeff(j) * k_weighted) * scale;
  }
  return j_mat;
}

}  // namespace tubelab::tube
