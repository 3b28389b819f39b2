#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tubelab/tube.hpp"

namespace tubelab::concentration {

/// Ricci tensor Ric = (a s + b) g of the s-dimensional ambient, a > 0.
struct RicciModel {
  double a = 1.0;
  double b = 0.0;
  double at(int s) const { return a * s + b; }
};

/// A family n -> (X_n, mu_n, S_n). `complement_measure(n, eps)` returns the
/// mass outside the eps-tube of S_n; it must be nonincreasing in eps.
struct ConcentrationFamily {
  std::string label;
  std::function<double(int, double)> complement_measure;
  RicciModel ricci;
  double diameter = 0.0;
};

/// Equators S^{n-1} in the round S^n of the given radius (Ric = (n-1)/R^2).
ConcentrationFamily equator_family(double radius = 1.0);

struct EpsSchedule {
  std::function<double(int)> values;
  std::optional<double> claimed_rate;
  std::string text;
};

/// eps_n = c n^{-k}; claimed rate k.
EpsSchedule power_schedule(double c, double k);
/// eps_n = eps0 for all n.
EpsSchedule constant_schedule(double eps0);
/// Parses "c*n^-k", "n^-k" or "const:eps0". Throws DomainError otherwise.
EpsSchedule parse_schedule(std::string_view text);

enum class Verdict { locus, not_locus, inconclusive };

std::string_view to_string(Verdict v);

struct ScanRow {
  int n = 0;
  double eps = 0.0;
  double complement = 0.0;
  double bound = 0.0;
};

/// Least-squares fit log eps_n = -k log n + log c.
struct RateEstimate {
  double k = 0.0;
  double c = 0.0;
  double r2 = 0.0;
};

struct ScanResult {
  std::string label;
  std::vector<ScanRow> rows;
  Verdict verdict = Verdict::inconclusive;
  std::optional<RateEstimate> rate;
};

struct ScanOptions {
  /// Complement masses in the tail must fall below this to call a locus.
  double tol = 1e-3;
  /// A tail whose log-log slope is flatter than this is treated as bounded below.
  double flat_slope = 0.05;
  unsigned threads = 1;
};

/// mu(S^n \ U_eps(S^{n-1})) on the unit sphere:
/// int_eps^{pi/2} cos^{n-1} / int_0^{pi/2} cos^{n-1} = I_{cos^2 eps}(n/2, 1/2).
double equator_complement_measure(int n, double eps);

/// int_eps^{t_max} prod cos(d_a t) dt / int_0^{t_max} prod cos(d_a t) dt,
/// for 0 <= eps <= t_max <= pi / (2 max d).
double symmetric_complement_measure(const tube::SpectralData& spectrum, double eps, double t_max);

/// Upper bound on symmetric_complement_measure for an ambient of dimension n
/// whose codimension-1 locus has spectrum with sum d_a^2 = a n + b:
///   min(1, exp(-eps^2 (a n + b) / 2) * G / Z),
/// G = int_0^{t_max} exp(-(a n + b) t^2 / 2) dt and Z the density normaliser
/// on the same window.
double complement_upper_bound(int n, double eps, RicciModel ricci,
                              const tube::SpectralData& spectrum, double t_max);

/// Same bound for the isotropic spectrum d_a = sqrt((a n + b) / (n - 1)),
/// a = 1..n-1, on its full window t_max = pi / (2 d).
double complement_upper_bound(int n, double eps, RicciModel ricci);

/// Evaluates the family along the schedule and classifies it. Rows are
/// ordered by n; the verdict is relative to the supplied schedule only.
ScanResult scan_concentration(const ConcentrationFamily& family, const EpsSchedule& schedule,
                              std::span<const int> n_range, const ScanOptions& options = {});

RateEstimate fit_rate(std::span<const ScanRow> rows);

/// Parses "start:stop:step" (inclusive) or a comma separated list.
std::vector<int> parse_n_range(std::string_view text);

nlohmann::json to_json(const ScanResult& result);
void write_csv(std::ostream& out, const ScanResult& result);

}  // namespace tubelab::concentration
