#include "tubelab/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <regex>
#include <string>
#include <vector>

#include "tubelab/errors.hpp"
#include "tubelab/format.hpp"
#include "tubelab/parallel.hpp"
#include "tubelab/quadrature.hpp"
#include "tubelab/specfun.hpp"

namespace tubelab::concentration {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

double parse_number(const std::string& text, std::string_view what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(value)) {
    throw DomainError("invalid " + std::string(what) + ": '" + text + "'");
  }
  return value;
}

// Simple least squares y = alpha + beta x; returns (alpha, beta, r2).
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 1.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const auto m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss_res += r * r;
  }
  // A constant response fitted exactly counts as a perfect fit.
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

// The density decays like exp(-t^2 sum d^2 / 2), so the window is cut at
// geometrically spaced multiples of that width before integrating.
double density_integral(const tube::SpectralData& spectrum, double lo, double hi) {
  const double ss = spectrum.sum_squares();
  std::vector<double> cuts{lo};
  if (ss > 0.0) {
    const double width = 1.0 / std::sqrt(ss);
    for (double t = width; t < hi; t *= 2.0) {
      if (t - cuts.back() > 0.25 * t) cuts.push_back(t);
    }
  }
  // merge a trailing sliver into its neighbour
  if (cuts.size() > 1 && hi - cuts.back() < 0.25 * hi) cuts.pop_back();
  cuts.push_back(hi);
  // the density is nonincreasing on the window, so f(a) (b - a) bounds a piece
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double cap = tube::totally_geodesic_density(spectrum, cuts[i]) * (cuts[i + 1] - cuts[i]);
    if (cap <= 1e-17 * total) break;
    total += quadrature::integrate(
                 [&](double t) { return tube::totally_geodesic_density(spectrum, t); }, cuts[i],
                 cuts[i + 1], 1e-12, 1e-15)
                 .value;
  }
  return total;
}

double bound_from(double eps, double lambda, double t_max, double z) {
  const double g = std::sqrt(std::numbers::pi / (2.0 * lambda)) *
                   std::erf(t_max * std::sqrt(0.5 * lambda));
  return std::min(1.0, std::exp(-0.5 * eps * eps * lambda) * g / z);
}

void check_window(const tube::SpectralData& spectrum, double t_max) {
  const double dmax = spectrum.max();
  if (!(t_max > 0.0) || (dmax > 0.0 && dmax * t_max > kHalfPi * (1.0 + 1e-12))) {
    throw DomainError("t_max must lie in (0, pi / (2 max d)]");
  }
  if (dmax == 0.0 && !std::isfinite(t_max)) throw DomainError("t_max must be finite");
}

Verdict classify(std::span<const ScanRow> rows, const ScanOptions& options) {
  if (rows.empty()) return Verdict::inconclusive;
  const std::size_t start = rows.size() / 2;
  const auto tail = rows.subspan(start == rows.size() ? rows.size() - 1 : start);

  bool below = true;
  bool nonincreasing = true;
  bool enveloped = true;
  double tail_min = 1.0;
  for (std::size_t i = 0; i < tail.size(); ++i) {
    const double c = tail[i].complement;
    below = below && c < options.tol;
    enveloped = enveloped && c <= tail[i].bound * (1.0 + 1e-9) + 1e-15;
    if (i > 0) nonincreasing = nonincreasing && c <= tail[i - 1].complement + 1e-15;
    tail_min = std::min(tail_min, c);
  }
  if (below && nonincreasing && enveloped) return Verdict::locus;

  if (tail_min > options.tol && tail.size() >= 2) {
    std::vector<double> inv_n, log_n, comp, log_comp;
    for (const auto& row : tail) {
      inv_n.push_back(1.0 / row.n);
      log_n.push_back(std::log(static_cast<double>(row.n)));
      comp.push_back(row.complement);
      log_comp.push_back(std::log(row.complement));
    }
    // Extrapolated limit of c0 + c1/n and the log-log trend of the tail.
    const double limit = fit_line(inv_n, comp).intercept;
    const double slope = fit_line(log_n, log_comp).slope;
    if (limit > options.tol && std::fabs(slope) < options.flat_slope) return Verdict::not_locus;
  }
  return Verdict::inconclusive;
}

}  // namespace

ConcentrationFamily equator_family(double radius) {
  if (!(radius > 0.0)) throw DomainError("equator_family: radius must be > 0");
  ConcentrationFamily family;
  family.label = radius == 1.0 ? "equator" : "equator(R=" + format_double(radius) + ")";
  family.complement_measure = [radius](int n, double eps) {
    const double scaled = eps / radius;
    if (scaled >= kHalfPi) return 0.0;
    return equator_complement_measure(n, scaled);
  };
  family.ricci = RicciModel{1.0 / (radius * radius), -1.0 / (radius * radius)};
  family.diameter = std::numbers::pi * radius;
  return family;
}

EpsSchedule power_schedule(double c, double k) {
  if (!(c > 0.0) || !std::isfinite(c) || !std::isfinite(k)) {
    throw DomainError("power_schedule: need c > 0 and finite k");
  }
  EpsSchedule s;
  s.values = [c, k](int n) { return c * std::pow(static_cast<double>(n), -k); };
  s.claimed_rate = k;
  s.text = format_double(c) + "*n^-" + format_double(k);
  return s;
}

EpsSchedule constant_schedule(double eps0) {
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) {
    throw DomainError("constant_schedule: eps0 must be > 0");
  }
  EpsSchedule s;
  s.values = [eps0](int) { return eps0; };
  s.text = "const:" + format_double(eps0);
  return s;
}

EpsSchedule parse_schedule(std::string_view text) {
  static const std::regex power(R"(^\s*(?:([^*\s]+)\s*\*\s*)?n\s*\^\s*(\S+)\s*$)");
  static const std::regex constant(R"(^\s*const\s*:\s*(\S+)\s*$)");
  const std::string s(text);
  std::smatch m;
  if (std::regex_match(s, m, constant)) {
    return constant_schedule(parse_number(m[1].str(), "schedule constant"));
  }
  if (std::regex_match(s, m, power)) {
    const double c = m[1].matched ? parse_number(m[1].str(), "schedule coefficient") : 1.0;
    const double exponent = parse_number(m[2].str(), "schedule exponent");
    auto sched = power_schedule(c, -exponent);
    sched.text = s;
    return sched;
  }
  throw DomainError("unrecognised schedule '" + s + "' (expected c*n^-k or const:eps)");
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::locus:
      return "locus";
    case Verdict::not_locus:
      return "not_locus";
    case Verdict::inconclusive:
      break;
  }
  return "inconclusive";
}

double equator_complement_measure(int n, double eps) {
  if (n < 2) throw DomainError("equator_complement_measure: n must be >= 2");
  if (!(eps >= 0.0 && eps <= kHalfPi)) {
    throw DomainError("equator_complement_measure: eps must lie in [0, pi/2]");
  }
  if (eps == 0.0) return 1.0;
  if (eps == kHalfPi) return 0.0;
  const double c = std::cos(eps);
  return specfun::reg_inc_beta(0.5 * n, 0.5, c * c);
}

double symmetric_complement_measure(const tube::SpectralData& spectrum, double eps,
                                    double t_max) {
  check_window(spectrum, t_max);
  if (!(eps >= 0.0 && eps <= t_max)) {
    throw DomainError("symmetric_complement_measure: eps must lie in [0, t_max]");
  }
  if (eps == 0.0) return 1.0;
  if (eps == t_max) return 0.0;
  const double head = density_integral(spectrum, 0.0, eps);
  const double tail = density_integral(spectrum, eps, t_max);
  return tail / (head + tail);
}

double complement_upper_bound(int n, double eps, RicciModel ricci,
                              const tube::SpectralData& spectrum, double t_max) {
  const double lambda = ricci.at(n);
  if (!(lambda > 0.0)) throw DomainError("complement_upper_bound: a n + b must be > 0");
  if (!(eps >= 0.0)) throw DomainError("complement_upper_bound: eps must be >= 0");
  if (std::fabs(spectrum.sum_squares() - lambda) > 1e-9 * std::max(1.0, lambda)) {
    throw DomainError("complement_upper_bound: spectrum does not match the Ricci model");
  }
  check_window(spectrum, t_max);
  if (eps == 0.0) return 1.0;
  return bound_from(eps, lambda, t_max, density_integral(spectrum, 0.0, t_max));
}

double complement_upper_bound(int n, double eps, RicciModel ricci) {
  if (n < 2) throw DomainError("complement_upper_bound: n must be >= 2");
  const double lambda = ricci.at(n);
  if (!(lambda > 0.0)) throw DomainError("complement_upper_bound: a n + b must be > 0");
  if (!(eps >= 0.0)) throw DomainError("complement_upper_bound: eps must be >= 0");
  if (eps == 0.0) return 1.0;
  const double d = std::sqrt(lambda / (n - 1));
  // int_0^{pi/(2d)} cos^{n-1}(d t) dt = sqrt(pi) Gamma(n/2) / (2 d Gamma((n+1)/2))
  const double z = std::sqrt(std::numbers::pi) / (2.0 * d) *
                   std::exp(specfun::ln_gamma(0.5 * n) - specfun::ln_gamma(0.5 * (n + 1)));
  return bound_from(eps, lambda, kHalfPi / d, z);
}

RateEstimate fit_rate(std::span<const ScanRow> rows) {
  std::vector<double> x, y;
  for (const auto& row : rows) {
    if (row.eps > 0.0) {
      x.push_back(std::log(static_cast<double>(row.n)));
      y.push_back(std::log(row.eps));
    }
  }
  if (x.size() < 2) throw DomainError("fit_rate: need at least two rows with eps > 0");
  const auto fit = fit_line(x, y);
  return RateEstimate{-fit.slope, std::exp(fit.intercept), fit.r2};
}

ScanResult scan_concentration(const ConcentrationFamily& family, const EpsSchedule& schedule,
                              std::span<const int> n_range, const ScanOptions& options) {
  if (n_range.empty()) throw DomainError("scan_concentration: empty n range");
  for (std::size_t i = 1; i < n_range.size(); ++i) {
    if (n_range[i] <= n_range[i - 1]) {
      throw DomainError("scan_concentration: n range must be increasing");
    }
  }
  ScanResult result;
  result.label = family.label;
  result.rows.resize(n_range.size());
  parallel_for(n_range.size(), options.threads, [&](std::size_t i) {
    const int n = n_range[i];
    const double eps = schedule.values(n);
    if (!(eps > 0.0) || !std::isfinite(eps)) {
      throw DomainError("scan_concentration: schedule produced eps <= 0");
    }
    const double comp = std::clamp(family.complement_measure(n, eps), 0.0, 1.0);
    const double lambda = family.ricci.at(n);
    const double bound = lambda > 0.0 ? complement_upper_bound(n, eps, family.ricci) : 1.0;
    result.rows[i] = ScanRow{n, eps, comp, bound};
  });
  result.verdict = classify(result.rows, options);
  if (result.rows.size() >= 2) result.rate = fit_rate(result.rows);
  return result;
}

std::vector<int> parse_n_range(std::string_view text) {
  const std::string s(text);
  std::vector<int> out;
  auto to_int = [&](const std::string& part) {
    const double v = parse_number(part, "n range entry");
    if (v != std::floor(v) || v < 1 || v > 1e9) {
      throw DomainError("n range entries must be positive integers, got '" + part + "'");
    }
    return static_cast<int>(v);
  };
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
      const auto next = s.find(':', pos);
      parts.push_back(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    if (parts.size() < 2 || parts.size() > 3) throw DomainError("n range must be start:stop[:step]");
    const int start = to_int(parts[0]);
    const int stop = to_int(parts[1]);
    const int step = parts.size() == 3 ? to_int(parts[2]) : 1;
    if (stop < start) throw DomainError("n range stop must be >= start");
    if ((stop - start) / step > 1000000) throw ResourceError("n range too long");
    for (int n = start; n <= stop; n += step) out.push_back(n);
  } else {
    std::size_t pos = 0;
    while (pos <= s.size()) {
      const auto next = s.find(',', pos);
      out.push_back(to_int(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos)));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] <= out[i - 1]) throw DomainError("n range must be increasing");
  }
  return out;
}

nlohmann::json to_json(const ScanResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"n", r.n}, {"eps", r.eps}, {"complement", r.complement}, {"bound", r.bound}});
  }
  nlohmann::json doc;
  doc["label"] = result.label;
  doc["rows"] = std::move(rows);
  doc["verdict"] = std::string(to_string(result.verdict));
  if (result.rate) {
    doc["rate"] = {{"k", result.rate->k}, {"c", result.rate->c}, {"r2", result.rate->r2}};
  } else {
    doc["rate"] = nullptr;
  }
  return doc;
}

void write_csv(std::ostream& out, const ScanResult& result) {
  out << "n,eps,complement,bound\n";
  for (const auto& r : result.rows) {
    out << r.n << ',' << format_double(r.eps) << ',' << format_double(r.complement) << ','
        << format_double(r.bound) << '\n';
  }
}

}  // namespace tubelab::concentration
