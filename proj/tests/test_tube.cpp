#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "tubelab/errors.hpp"
#include "tubelab/specfun.hpp"
#include "tubelab/tube.hpp"

using namespace tubelab;
using namespace tubelab::tube;

namespace {

constexpr double kPi = std::numbers::pi;

TubeSpec equator_spec(int n, double eps, double radius = 1.0) {
  // S^{n-1} in S^n_R
  TubeSpec s;
  s.ambient = SphereAmbient{radius};
  s.n = n - 1;
  s.q = 1;
  s.eps = eps;
  s.vol_m = specfun::sphere_volume(n - 1, radius);
  s.kappas.assign((n - 1) / 2, 0.0);
  return s;
}

double equator_quadrature(int n, double eps) {
  return 2.0 * specfun::sphere_volume(n - 1) *
         oracle::integrate([n](double t) { return std::pow(std::cos(t), n - 1); }, 0.0, eps);
}

// R_abcd = h_ac h_bd - h_ad h_bc
CurvatureTensor gauss_tensor(const Eigen::MatrixXd& h) {
  const int n = static_cast<int>(h.rows());
  CurvatureTensor r(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) r(a, b, c, d) = h(a, c) * h(b, d) - h(a, d) * h(b, c);
  return r;
}

double elementary_symmetric(const Eigen::VectorXd& x, int k) {
  std::vector<double> e(k + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < x.size(); ++i)
    for (int m = k; m >= 1; --m) e[m] += x(i) * e[m - 1];
  return e[k];
}

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  return 0.5 * (m + m.transpose());
}

}  // namespace

TEST_CASE("flat formula examples") {
  TubeSpec circle;
  circle.n = 1;
  circle.q = 1;
  circle.vol_m = 2.0 * kPi * 1.7;
  circle.eps = 0.3;
  CHECK(weyl_flat_volume(circle) == doctest::Approx(4.0 * kPi * 1.7 * 0.3).epsilon(1e-15));

  TubeSpec shell;
  shell.n = 2;
  shell.q = 1;
  shell.vol_m = 4.0 * kPi;
  shell.kappas = {1.0};
  for (double eps : {0.01, 0.1, 0.3, 0.9}) {
    shell.eps = eps;
    const double ref = 4.0 * kPi / 3.0 * (std::pow(1.0 + eps, 3) - std::pow(1.0 - eps, 3));
    CHECK(oracle::rel_diff(weyl_flat_volume(shell), ref) <= 1e-13);
  }

  TubeSpec plain;
  plain.n = 5;
  plain.q = 3;
  plain.eps = 0.2;
  plain.vol_m = 2.5;
  plain.kappas = {0.0, 0.0};
  CHECK(weyl_flat_volume(plain) == doctest::Approx(2.5 * specfun::disc_volume(3, 0.2)).epsilon(1e-15));
}

TEST_CASE("tube spec validation") {
  TubeSpec s;
  s.n = 4;
  s.eps = 0.1;
  s.kappas = {1.0};
  CHECK_THROWS_AS(weyl_flat_volume(s), DimensionError);
  s.kappas = {1.0, 2.0};
  s.eps = 0.0;
  CHECK_THROWS_AS(weyl_flat_volume(s), DomainError);
  s.eps = 0.1;
  s.ambient = SphereAmbient{1.0};
  CHECK_THROWS_AS(weyl_flat_volume(s), DomainError);
  s.eps = 2.0;
  CHECK_THROWS_AS(weyl_sphere_volume(s), DomainError);
  s.ambient = FlatAmbient{};
  s.eps = 0.1;
  CHECK_THROWS_AS(weyl_sphere_volume(s), DomainError);
}

TEST_CASE("constant curvature kappa") {
  CHECK(constant_curvature_kappa(2, 1, 1.0) == doctest::Approx(1.0));
  CHECK(constant_curvature_kappa(3, 1, 1.0) == doctest::Approx(3.0));
  CHECK(constant_curvature_kappa(4, 2, 2.0) == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK_THROWS_AS(constant_curvature_kappa(3, 2, 1.0), DomainError);
  CHECK_THROWS_AS(constant_curvature_kappa(4, 1, 0.0), DomainError);
}

TEST_CASE("stirling estimate") {
  CHECK(stirling_kappa_estimate(100, 1, 0.01) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(stirling_kappa_estimate(37, 1, 0.2) == doctest::Approx(37.0 * 37.0 * 0.04 / 2.0).epsilon(1e-14));
  CHECK(stirling_kappa_estimate(10, 1, 0.0) == 0.0);
  // relative deviation from the exact value shrinks with n
  double prev = 1e300;
  for (int n : {10, 100, 1000, 10000}) {
    const double x = 1.0 / n;
    const double exact = constant_curvature_kappa(n, 2, 1.0) * std::pow(x, 4);
    const double dev = std::fabs(stirling_kappa_estimate(n, 2, x) / exact - 1.0);
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("sphere formula: circle in S^2") {
  for (double eps : {0.05, 0.4, 1.2}) {
    CHECK(oracle::rel_diff(weyl_sphere_volume(equator_spec(2, eps)), 4.0 * kPi * std::sin(eps)) <= 1e-14);
  }
  const double rel = flat_vs_sphere_relative_error(equator_spec(2, 0.1));
  CHECK(rel == doctest::Approx(std::fabs(std::sin(0.1) / 0.1 - 1.0)).epsilon(1e-10));
  CHECK(rel == doctest::Approx(1.666e-3).epsilon(1e-3));
}

TEST_CASE("sphere formula against quadrature for equators") {
  for (int n = 2; n <= 20; ++n) {
    for (double eps : {0.05, 0.2, 0.5, 1.0}) {
      CHECK(oracle::rel_diff(weyl_sphere_volume(equator_spec(n, eps)), equator_quadrature(n, eps)) <= 1e-12);
    }
  }
}

TEST_CASE("sphere formula scales with the radius") {
  // Vol_R(eps) = R^n Vol_1(eps / R)
  for (int n : {3, 6}) {
    const double r = 2.5;
    const double scaled = weyl_sphere_volume(equator_spec(n, 0.3, r));
    CHECK(oracle::rel_diff(scaled, std::pow(r, n) * weyl_sphere_volume(equator_spec(n, 0.3 / r))) <= 1e-13);
  }
}

TEST_CASE("sphere formula with curvature terms matches a direct integral") {
  // Small sphere of radius rho at polar angle alpha in S^3: M = S^2_rho, q = 1,
  // kappas from Weyl's sphere invariants. The tube is a spherical shell
  // alpha - eps <= theta <= alpha + eps, volume 4 pi int sin^2.
  const double alpha = 1.0;
  const double rho = std::sin(alpha);
  TubeSpec s;
  s.ambient = SphereAmbient{1.0};
  s.n = 2;
  s.q = 1;
  s.vol_m = 4.0 * kPi * rho * rho;
  // K_2 = int (1/2)(R_M - R_ambient restricted) = Gauss curvature minus 1, times area
  s.kappas = {1.0 / (rho * rho) - 1.0};
  for (double eps : {0.05, 0.2, 0.4}) {
    s.eps = eps;
    const double ref = 4.0 * kPi *
                       oracle::integrate([](double t) { return std::sin(t) * std::sin(t); },
                                         alpha - eps, alpha + eps);
    CHECK(oracle::rel_diff(weyl_sphere_volume(s), ref) <= 1e-12);
  }
}

TEST_CASE("flat approximation improves as eps shrinks") {
  for (int n : {2, 5, 12}) {
    double prev = 1e300;
    for (double eps = 0.4; eps > 0.004; eps /= 2.0) {
      const double err = flat_vs_sphere_relative_error(equator_spec(n, eps));
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 1e-3);
  }
}

TEST_CASE("totally geodesic tube volume") {
  TubeSpec s;
  s.n = 4;
  s.q = 1;
  s.eps = 0.3;
  s.vol_m = specfun::sphere_volume(4);
  s.kappas = {0.0, 0.0};
  s.ambient = SymmetricCodim1Ambient{SpectralData::isotropic(4, 1.0), kPi / 2.0};
  const double sym = totally_geodesic_tube_volume(s);
  CHECK(oracle::rel_diff(sym, equator_quadrature(5, 0.3)) <= 1e-12);
  CHECK(tube_volume(s) == sym);
  s.ambient = SphereAmbient{1.0};
  CHECK(oracle::rel_diff(tube_volume(s), sym) <= 1e-12);

  TubeSpec mixed = s;
  mixed.ambient = SymmetricCodim1Ambient{SpectralData({0.0, 0.5, 1.0, 2.0}), kPi / 4.0};
  const double ref = 2.0 * mixed.vol_m * oracle::integrate([](double t) {
    return std::cos(0.5 * t) * std::cos(t) * std::cos(2.0 * t);
  }, 0.0, 0.3);
  CHECK(oracle::rel_diff(totally_geodesic_tube_volume(mixed), ref) <= 1e-12);
  mixed.eps = 0.9;
  CHECK_THROWS_AS(totally_geodesic_tube_volume(mixed), DomainError);
}

TEST_CASE("densities") {
  const SpectralData zeros({0.0, 0.0, 0.0});
  CHECK(totally_geodesic_density(zeros, 3.0) == 1.0);
  const SpectralData ones = SpectralData::isotropic(5, 1.0);
  CHECK(totally_geodesic_density(ones, 0.7) == doctest::Approx(std::pow(std::cos(0.7), 5)).epsilon(1e-15));
  const SpectralData mixed({0.5, 2.0, 1.0});
  CHECK(std::fabs(totally_geodesic_density(mixed, kPi / 4.0)) < 1e-15);

  auto sff = SecondFundamentalForm::zero(3, 2);
  CHECK(symmetric_tube_density(mixed, sff, 0.0) == 1.0);
  for (double t : {0.1, 0.5, 0.7}) {
    CHECK(symmetric_tube_density(mixed, sff, t) == totally_geodesic_density(mixed, t));
  }

  // Flat ambient: det(I + t K)
  SecondFundamentalForm flat;
  Eigen::MatrixXd k(3, 3);
  k << 1.0, 0.2, 0.0, 0.2, -0.5, 0.1, 0.0, 0.1, 2.0;
  flat.K = {k};
  flat.omega = {1.0};
  const Eigen::VectorXd lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues();
  for (double t : {0.0, 0.3, 1.1}) {
    double ref = 1.0;
    for (int a = 0; a < 3; ++a) ref *= 1.0 + lam(a) * t;
    CHECK(symmetric_tube_density(zeros, flat, t) == doctest::Approx(ref).epsilon(1e-13));
  }

  SecondFundamentalForm bad = flat;
  bad.omega = {0.5};
  CHECK_THROWS_AS(symmetric_tube_density(zeros, bad, 0.1), DomainError);
  bad = flat;
  bad.K[0](0, 1) = 0.7;
  CHECK_THROWS_AS(symmetric_tube_density(zeros, bad, 0.1), DomainError);
  CHECK_THROWS_AS(symmetric_tube_density(SpectralData({1.0}), flat, 0.1), DimensionError);
}

TEST_CASE("gaussian bound dominates the density") {
  CHECK(gaussian_bound(SpectralData({1.0}), 0.0) == 1.0);
  CHECK(gaussian_bound(SpectralData({1.0}), 1.0) == doctest::Approx(std::exp(-0.5)));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + static_cast<int>(u(rng) * 12);
    std::vector<double> d(n);
    for (double& v : d) v = 3.0 * u(rng);
    const SpectralData s(d);
    const double t = u(rng) * kPi / (2.0 * s.max());
    const double dens = totally_geodesic_density(s, t);
    if (dens < 0.0 || dens > gaussian_bound(s, t)) ++violations;
  }
  CHECK(violations == 0);
  CHECK_THROWS_AS(gaussian_bound(SpectralData({2.0}), 1.0), DomainError);
  CHECK_THROWS_AS(gaussian_bound(SpectralData({2.0}), -0.1), DomainError);
}

TEST_CASE("jacobi series") {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
  JacobiSeriesState unit(eye, 12);
  CHECK((jacobi_series_eval(unit, Eigen::MatrixXd::Zero(3, 3), 0.0) - eye).cwiseAbs().maxCoeff() == 0.0);
  CHECK((jacobi_series_eval(unit, Eigen::MatrixXd::Zero(3, 3), 0.5) - std::cos(0.5) * eye)
            .cwiseAbs()
            .maxCoeff() <= 1e-9);

  Eigen::MatrixXd k(3, 3);
  k << 0.3, -1.0, 0.0, -1.0, 2.0, 0.5, 0.0, 0.5, -0.7;
  JacobiSeriesState flat(Eigen::MatrixXd::Zero(3, 3), 2);
  CHECK((jacobi_series_eval(flat, k, 0.8) - (eye + 0.8 * k)).cwiseAbs().maxCoeff() == 0.0);

  // Coefficient pattern: A_{2m+1} = 0, B_{2m} = 0, A_{2m} = (-A)^m, B_{2m+1} = (-A)^m.
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd g = random_symmetric(rng, 4);
  const Eigen::MatrixXd a = g * g.transpose();
  JacobiSeriesState st(a, 12);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(4, 4);
  for (int m = 0; 2 * m + 1 <= 12; ++m) {
    CHECK((st.b_coeff(2 * m + 1) - power).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + power.cwiseAbs().maxCoeff()));
    CHECK(st.a_coeff(2 * m + 1).cwiseAbs().maxCoeff() == 0.0);
    if (2 * m + 2 <= 12) {
      power = -power * a;
      CHECK((st.a_coeff(2 * m + 2) - power).cwiseAbs().maxCoeff() <=
            1e-9 * (1.0 + power.cwiseAbs().maxCoeff()));
      CHECK(st.b_coeff(2 * m + 2).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  CHECK_THROWS_AS(JacobiSeriesState(Eigen::MatrixXd::Zero(2, 3)), DimensionError);
  CHECK_THROWS_AS(JacobiSeriesState(eye, 0), DomainError);
  CHECK_THROWS_AS(jacobi_series_eval(unit, Eigen::MatrixXd::Zero(2, 2), 0.1), DimensionError);
}

TEST_CASE("jacobi series against the eigen-decomposed closed form") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 6;
    const Eigen::MatrixXd g = random_symmetric(rng, n);
    Eigen::MatrixXd a = g * g.transpose() + 1e-3 * Eigen::MatrixXd::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    a /= es.eigenvalues().maxCoeff();
    es.compute(a);
    const Eigen::MatrixXd k = random_symmetric(rng, n);
    const double t = u(rng);
    Eigen::VectorXd c(n), s(n);
    for (int i = 0; i < n; ++i) {
      const double d = std::sqrt(std::max(0.0, es.eigenvalues()(i)));
      c(i) = std::cos(d * t);
      s(i) = d > 0.0 ? std::sin(d * t) / d : t;
    }
    const Eigen::MatrixXd v = es.eigenvectors();
    const Eigen::MatrixXd ref = v * c.asDiagonal() * v.transpose() + v * s.asDiagonal() * v.transpose() * k;
    const Eigen::MatrixXd got = jacobi_series_eval(JacobiSeriesState(a, 12), k, t);
    CHECK((got - ref).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("curvature tensor") {
  const auto r = CurvatureTensor::constant_curvature(3, 2.0);
  CHECK(r(0, 1, 0, 1) == doctest::Approx(0.25));
  CHECK(r(0, 1, 1, 0) == doctest::Approx(-0.25));
  CHECK(r(0, 1, 0, 2) == 0.0);
  CHECK_NOTHROW(r.validate());
  CurvatureTensor bad(3);
  bad(0, 1, 0, 1) = 1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_THROWS_AS(CurvatureTensor(0), DimensionError);
}

TEST_CASE("lk_density examples") {
  const auto two = CurvatureTensor::constant_curvature(2, 1.0);
  CHECK(lk_density(two, 0) == 1.0);
  CHECK(lk_density(two, 1) == doctest::Approx(1.0).epsilon(1e-15));
  for (int n = 2; n <= 6; ++n) {
    for (double r : {1.0, 2.0, 0.7}) {
      const auto omega = CurvatureTensor::constant_curvature(n, r);
      for (int j = 1; 2 * j <= n; ++j) {
        CHECK(lk_density(omega, j) == doctest::Approx(constant_curvature_kappa(n, j, r)).epsilon(1e-12));
      }
    }
  }
  const auto eight = CurvatureTensor::constant_curvature(8, 1.0);
  CHECK(lk_density(eight, 4) == doctest::Approx(constant_curvature_kappa(8, 4, 1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(lk_density(two, 2), DimensionError);
  CHECK_THROWS_AS(lk_density(CurvatureTensor::constant_curvature(9, 1.0), 1), DimensionError);
}

TEST_CASE("lk_density of hypersurface curvature is (2j-1)!! sigma_2j") {
  std::mt19937_64 rng(5);
  for (int n = 2; n <= 6; ++n) {
    const Eigen::MatrixXd h = random_symmetric(rng, n);
    const auto omega = gauss_tensor(h);
    CHECK_NOTHROW(omega.validate(1e-12));
    const Eigen::VectorXd lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues();
    double scalar = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) scalar += omega(a, b, a, b);
    CHECK(lk_density(omega, 1) == doctest::Approx(0.5 * scalar).epsilon(1e-12));
    for (int j = 1; 2 * j <= n; ++j) {
      double dfact = 1.0;
      for (int i = 1; i < 2 * j; i += 2) dfact *= i;
      const double ref = dfact * elementary_symmetric(lam, 2 * j);
      CHECK(std::fabs(lk_density(omega, j) - ref) <= 1e-10 * std::max(1.0, std::fabs(ref)));
    }
  }
}
