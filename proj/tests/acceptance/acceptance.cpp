// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance <path-to-tubelab-binary>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tubelab/concentration.hpp"
#include "tubelab/format.hpp"
#include "tubelab/mmdist.hpp"
#include "tubelab/specfun.hpp"
#include "tubelab/sphere_lab.hpp"
#include "tubelab/tube.hpp"

using namespace tubelab;

namespace {

constexpr double kPi = std::numbers::pi;

// Tolerances and limits, one block per criterion.
constexpr double kC1Tol = 1e-11;
constexpr double kC1Seconds = 1.0;
constexpr double kC2RelTol = 1e-15;
constexpr double kC3RelTol = 1e-12;
constexpr double kC4RelTol = 1e-10;
constexpr double kC4Seconds = 5.0;
constexpr double kC6Tol = 1e-9;
constexpr double kC6Seconds = 2.0;
constexpr double kC8RateTol = 0.01;
constexpr double kC8ComplementTol = 0.005;
constexpr double kC8Seconds = 10.0;
constexpr double kC9Sigmas = 3.0;
constexpr double kC9Seconds = 5.0;
constexpr double kC10GapTol = 1e-7;
constexpr std::uint64_t kSeed = 20240917;

struct Report {
  int failures = 0;
  void line(int id, bool ok, const std::string& what, const std::string& detail) {
    std::cout << "criterion " << id << ": " << (ok ? "PASS" : "FAIL") << "  " << what << "  [" << detail << "]\n";
    if (!ok) ++failures;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

tube::TubeSpec equator_spec(int n, double eps) {
  tube::TubeSpec s;
  s.ambient = tube::SphereAmbient{1.0};
  s.n = n - 1;
  s.q = 1;
  s.eps = eps;
  s.vol_m = specfun::sphere_volume(n - 1);
  s.kappas.assign((n - 1) / 2, 0.0);
  return s;
}

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  return 0.5 * (m + m.transpose());
}

void criterion1(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int points = 0;
  for (double a : {-4.7, -2.3, 0.1, 2.5, 4.9})
    for (double b : {-5.0, -2.5, 0.0, 2.5, 5.0})
      for (double z : {0.0, 0.3, 0.6, 0.9}) {
        const double ref = std::pow(1.0 - z, -b);
        const double got = specfun::gauss_2f1(a, b, a, z, 1e-14).value;
        worst = std::max(worst, std::fabs(got - ref) / std::max(1.0, std::fabs(ref)));
        ++points;
      }
  const double secs = seconds_since(t0);
  r.line(1, points == 100 && worst <= kC1Tol && secs < kC1Seconds, "2F1(a,b;a;z) = (1-z)^-b on a 100-point grid",
         "max scaled err " + num(worst) + ", " + num(secs) + " s");
}

void criterion2(Report& r) {
  double worst = 0.0;
  for (double radius : {0.5, 1.0, 2.5, 10.0})
    for (double eps : {0.01, 0.1, 0.3}) {
      tube::TubeSpec s;
      s.n = 1;
      s.q = 1;
      s.vol_m = 2.0 * kPi * radius;
      s.eps = eps;
      const double ref = 4.0 * kPi * radius * eps;
      worst = std::max(worst, std::fabs(tube::weyl_flat_volume(s) - ref) / ref);
    }
  r.line(2, worst <= kC2RelTol, "circle tube equals 4 pi r eps", "max rel err " + num(worst));
}

void criterion3(Report& r) {
  double worst = 0.0;
  tube::TubeSpec s;
  s.n = 2;
  s.q = 1;
  s.vol_m = 4.0 * kPi;
  s.kappas = {1.0};
  for (double eps : {0.01, 0.1, 0.3}) {
    s.eps = eps;
    const double ref = 8.0 * kPi * eps * (1.0 + eps * eps / 3.0);
    worst = std::max(worst, std::fabs(tube::weyl_flat_volume(s) - ref) / ref);
  }
  r.line(3, worst <= kC3RelTol, "unit S^2 shell volume", "max rel err " + num(worst));
}

void criterion4(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int n = 2; n <= 20; ++n)
    for (double eps : {0.05, 0.2, 0.5}) {
      auto f = [n](double t) { return std::pow(std::cos(t), n - 1); };
      const double integral =
          boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, eps, 10, 1e-13);
      const double ref = 2.0 * specfun::sphere_volume(n - 1) * integral;
      worst = std::max(worst, std::fabs(tube::weyl_sphere_volume(equator_spec(n, eps)) - ref) / ref);
    }
  const double secs = seconds_since(t0);
  r.line(4, worst <= kC4RelTol && secs < kC4Seconds, "sphere formula vs adaptive quadrature, n = 2..20",
         "max rel err " + num(worst) + ", " + num(secs) + " s");
}

void criterion5(Report& r) {
  bool ok = true;
  std::string detail;
  for (int n : {2, 3, 5, 10, 20}) {
    double prev = 1e300;
    for (double eps : {0.4, 0.2, 0.1, 0.05}) {
      const double err = tube::flat_vs_sphere_relative_error(equator_spec(n, eps));
      ok = ok && err < prev;
      prev = err;
    }
    if (n == 20) detail = "n=20 err at eps/8 " + num(prev);
  }
  r.line(5, ok, "|Vol_sphere/Vol_flat - 1| decreases along eps/2^k", detail);
}

void criterion6(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 6;
    const Eigen::MatrixXd g = random_symmetric(rng, n);
    Eigen::MatrixXd a = g * g.transpose() + 1e-6 * Eigen::MatrixXd::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    a *= u(rng) / es.eigenvalues().maxCoeff();
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
    const Eigen::MatrixXd got = tube::jacobi_series_eval(tube::JacobiSeriesState(a, 12), k, t);
    worst = std::max(worst, (got - ref).cwiseAbs().maxCoeff());
  }
  const double secs = seconds_since(t0);
  r.line(6, worst <= kC6Tol && secs < kC6Seconds, "order-12 Jacobi series vs closed form on 50 SPD matrices",
         "max entry err " + num(worst) + ", " + num(secs) + " s");
}

void criterion7(Report& r) {
  std::mt19937_64 rng(kSeed + 7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(u(rng) * 20) % 20;
    std::vector<double> d(n);
    for (double& x : d) x = 4.0 * u(rng);
    const tube::SpectralData spectrum(d);
    const double t = u(rng) * kPi / (2.0 * spectrum.max());
    const double dens = tube::totally_geodesic_density(spectrum, t);
    if (dens < 0.0 || dens > tube::gaussian_bound(spectrum, t)) ++violations;
  }
  r.line(7, violations == 0, "0 <= prod cos(d t) <= exp(-t^2 sum d^2 / 2) on 10^4 draws",
         std::to_string(violations) + " violations");
}

void criterion8(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto family = concentration::equator_family();
  const auto locus = concentration::scan_concentration(family, concentration::parse_schedule("n^-0.25"),
                                                       concentration::parse_n_range("10:400:10"));
  bool monotone = true;
  for (std::size_t i = locus.rows.size() / 2 + 1; i < locus.rows.size(); ++i) {
    monotone = monotone && locus.rows[i].complement <= locus.rows[i - 1].complement;
  }
  const double k_hat = locus.rate ? locus.rate->k : -1.0;

  const auto flat = concentration::scan_concentration(family, concentration::parse_schedule("1.0*n^-0.5"),
                                                      concentration::parse_n_range("100:10000:100"));
  const double target = std::erfc(1.0 / std::sqrt(2.0));  // 2(1 - Phi(1))
  const int n = 10000;
  const double eps = 1.0 / std::sqrt(static_cast<double>(n));
  const double by_quadrature = concentration::symmetric_complement_measure(
      tube::SpectralData::isotropic(n - 1, 1.0), eps, kPi / 2.0);
  const double by_beta = concentration::equator_complement_measure(n, eps);
  const double secs = seconds_since(t0);
  const bool ok = locus.verdict == concentration::Verdict::locus && monotone &&
                  std::fabs(k_hat - 0.25) <= kC8RateTol && flat.verdict == concentration::Verdict::not_locus &&
                  std::fabs(by_quadrature - target) <= kC8ComplementTol &&
                  std::fabs(by_beta - target) <= kC8ComplementTol && secs < kC8Seconds;
  r.line(8, ok, "equator scan: n^-1/4 locus, n^-1/2 not_locus",
         "verdicts " + std::string(concentration::to_string(locus.verdict)) + "/" +
             std::string(concentration::to_string(flat.verdict)) + ", k " + num(k_hat) + ", complement(10^4) quad " +
             num(by_quadrature) + " beta " + num(by_beta) + ", " + num(secs) + " s");
}

void criterion9_10(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 50;
  const std::size_t count = 100000;
  const auto cloud = sphere_lab::sample_sphere(n, count, kSeed);
  const auto est = sphere_lab::empirical_complement(cloud, 0.2);
  const double p = concentration::equator_complement_measure(n, 0.2);
  const double band = kC9Sigmas * std::sqrt(p * (1.0 - p) / count);
  const double secs = seconds_since(t0);
  r.line(9, std::fabs(est.p_hat - p) <= band && secs < kC9Seconds, "Monte Carlo complement on S^50 at eps = 0.2",
         "p_hat " + num(est.p_hat) + " vs " + num(p) + ", band " + num(band) + ", " + num(secs) + " s");

  // order-2 cost against eps^2 * complement on a 20-point grid
  const double c2 = mmdist::projection_transport_cost(cloud, 2).cost;
  bool dominated = true;
  for (int k = 1; k <= 20; ++k) {
    const double eps = 0.05 * k;
    dominated = dominated && c2 >= eps * eps * sphere_lab::empirical_complement(cloud, eps).p_hat;
  }

  // ten points on a meridian of S^2 and their equator projections
  sphere_lab::SampleCloud meridian;
  meridian.n = 2;
  meridian.count = 10;
  for (int k = 0; k < 10; ++k) {
    const double theta = 2.0 * kPi * (k + 0.25) / 10.0;
    meridian.points.insert(meridian.points.end(), {std::cos(theta), 0.0, std::sin(theta)});
    meridian.colatitudes.push_back(std::atan2(std::sin(theta), std::fabs(std::cos(theta))));
  }
  const auto ground = mmdist::equator_projection_space(meridian);
  const auto nu = mmdist::pushforward(ground.space, ground.proj);
  const auto w1 = mmdist::w1_exact(ground.space, nu);
  const double proj_cost = mmdist::projection_transport_cost(ground.space, ground.proj, 1).cost;
  const bool ok = dominated && w1.plan.cost <= proj_cost + 1e-12 && std::fabs(w1.gap) <= kC10GapTol &&
                  w1.lipschitz_excess <= 1e-12;
  r.line(10, ok, "transport inequalities: W2^2 cost >= eps^2 m, W1 <= projection cost",
         "W1 " + num(w1.plan.cost) + " <= " + num(proj_cost) + ", gap " + num(w1.gap));
}

void criterion11(Report& r) {
  std::mt19937_64 rng(kSeed + 11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool self_zero = true;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + trial % 4;
    const int k = 1 + trial % 8;
    std::vector<double> w(m, 0.0);
    std::vector<int> counts(m, 0);
    counts[0] = 1;
    for (int i = 1; i < std::max<int>(k, static_cast<int>(m)); ++i) counts[static_cast<std::size_t>(i) % m]++;
    const int total = std::max<int>(k, static_cast<int>(m));
    if (total > 8) continue;
    for (std::size_t i = 0; i < m; ++i) w[i] = static_cast<double>(counts[i]) / total;
    std::vector<double> px(m), py(m), d(m * m);
    for (std::size_t i = 0; i < m; ++i) {
      px[i] = u(rng);
      py[i] = u(rng);
    }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) d[i * m + j] = std::hypot(px[i] - px[j], py[i] - py[j]);
    const mmdist::FiniteMMSpace x(m, d, w);
    self_zero = self_zero && mmdist::box_exact(x, x) == 0.0;
  }

  bool two_point = true;
  const mmdist::FiniteMMSpace one(1, {0.0}, {1.0});
  for (double dist : {0.1, 0.4, 0.9}) {
    const mmdist::FiniteMMSpace two(2, {0.0, dist, dist, 0.0}, {0.5, 0.5});
    two_point = two_point && std::fabs(mmdist::box_exact(one, two) - std::min(dist, 0.5)) <= 1e-15;
  }

  bool bounded = true;
  double slack = 1e300;
  for (int i = 0; i < 10; ++i) {
    const auto cloud = sphere_lab::sample_sphere(5, 8, kSeed + 100 + i);
    const auto ground = mmdist::equator_projection_space(cloud);
    const auto inst = mmdist::make_projection_instance("s5", ground.space, ground.proj, 0.1 + 0.05 * i, true);
    const double exact = mmdist::box_exact(inst.space.support(), inst.space.with_weights(inst.target).support());
    const double bound = mmdist::box_bound_via_tube(*inst.complement, *inst.eps);
    bounded = bounded && exact <= bound;
    slack = std::min(slack, bound - exact);
  }
  r.line(11, self_zero && two_point && bounded, "box distance brute force",
         std::string("self ") + (self_zero ? "0" : "nonzero") + ", min(D,1/2) " + (two_point ? "ok" : "off") +
             ", min bound slack " + num(slack));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion12(Report& r, const std::string& binary) {
  if (binary.empty()) {
    r.line(12, false, "CLI determinism", "no CLI binary supplied");
    return;
  }
  const std::string vol = format_double(specfun::sphere_volume(4));
  const std::vector<std::string> runs = {
      "tube --ambient sphere --R 1 --n 4 --q 1 --eps 0.1 --vol-m " + vol,
      "scan --family equator --schedule 'n^-0.25' --n 10:400:10",
      "scan --family equator --schedule '1.0*n^-0.5' --n 100:10000:100",
      "--format csv sample --n 50 --N 100000",
      "sample --n 50 --N 100000 --eps 0.2",
      "audit --family equator",
      "audit --family dirac",
  };
  const std::filesystem::path dir = std::filesystem::current_path() / "acceptance_runs";
  std::filesystem::create_directories(dir);
  int identical = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "1", "4"}) {
      const auto out = dir / ("run" + std::to_string(i) + "_" + std::to_string(outputs.size()));
      std::filesystem::remove(out);
      const std::string cmd = "TUBELAB_THREADS=" + std::string(threads) + " '" + binary + "' --seed " +
                              std::to_string(kSeed) + " --out '" + out.string() + "' " + runs[i];
      if (std::system(cmd.c_str()) != 0 || !std::filesystem::exists(out)) break;
      outputs.push_back(slurp(out));
    }
    if (outputs.size() == 3 && outputs[0] == outputs[1] && outputs[0] == outputs[2] && !outputs[0].empty()) {
      ++identical;
    }
  }
  r.line(12, identical == static_cast<int>(runs.size()), "CLI outputs byte-identical on repeat (and across threads)",
         std::to_string(identical) + "/" + std::to_string(runs.size()) + " runs identical");
}

}  // namespace

int main(int argc, char** argv) {
  std::cout << std::unitbuf;
  Report report;
  const std::vector<std::function<void()>> checks = {
      [&] { criterion1(report); },   [&] { criterion2(report); }, [&] { criterion3(report); },
      [&] { criterion4(report); },   [&] { criterion5(report); }, [&] { criterion6(report); },
      [&] { criterion7(report); },   [&] { criterion8(report); }, [&] { criterion9_10(report); },
      [&] { criterion11(report); },
  };
  for (const auto& check : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      std::cout << "criterion check threw: " << e.what() << "\n";
      ++report.failures;
    }
  }
  criterion12(report, argc > 1 ? argv[1] : "");
  std::cout << (report.failures == 0 ? "ALL PASS" : std::to_string(report.failures) + " FAILED") << "\n";
  return report.failures == 0 ? 0 : 1;
}
