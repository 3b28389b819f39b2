#include <cmath>
#include <ostream>
#include <string>

#include "tubelab/errors.hpp"
#include "tubelab/format.hpp"
#include "tubelab/mmdist.hpp"
#include "tubelab/parallel.hpp"

namespace tubelab::mmdist {

namespace {

bool vanishes(const std::vector<double>& series, double threshold) {
  if (series.empty()) return false;
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i] > series[i - 1] + 1e-12) return false;
  }
  return series.back() < threshold;
}

void put_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) out << format_double(*v);
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

ProjectedCloudSpace equator_projection_space(const sphere_lab::SampleCloud& cloud) {
  const std::size_t count = cloud.count;
  if (count == 0) throw DomainError("equator_projection_space: empty cloud");
  std::vector<std::vector<double>> points;
  points.reserve(2 * count);
  std::vector<int> proj(2 * count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto x = cloud.point(i);
    points.emplace_back(x.begin(), x.end());
  }
  for (std::size_t i = 0; i < count; ++i) {
    auto p = sphere_lab::project_to_equator(cloud.point(i));
    proj[i] = p.focal ? -1 : static_cast<int>(count + i);
    proj[count + i] = static_cast<int>(count + i);
    points.push_back(std::move(p.point));
  }
  const std::size_t m = 2 * count;
  std::vector<double> d(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      d[i * m + j] = sphere_lab::geodesic_distance(points[i], points[j]);
      d[j * m + i] = d[i * m + j];
    }
  std::vector<double> w(m, 0.0);
  for (std::size_t i = 0; i < count; ++i) w[i] = 1.0 / static_cast<double>(count);
  if (count > 1) {
    // Keep the total exactly 1 for awkward N.
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < count; ++i) head += w[i];
    w[count - 1] = 1.0 - head;
  }
  return {FiniteMMSpace(m, std::move(d), std::move(w)), std::move(proj)};
}

AuditInstance make_projection_instance(std::string label, const FiniteMMSpace& space,
                                       std::span<const int> proj, double eps,
                                       bool compute_box_exact) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError("audit: eps must be >= 0");
  auto target = pushforward(space, proj);
  double outside = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (proj[i] < 0 || space.distance(i, static_cast<std::size_t>(proj[i])) > eps) {
      outside += space.weights()[i];
    }
  }
  return AuditInstance{std::move(label), space, std::move(target), eps, std::min(outside, 1.0),
                       compute_box_exact};
}

AuditReport implication_audit(std::span<const AuditInstance> instances, double threshold,
                              unsigned threads) {
  if (instances.empty()) throw DomainError("implication_audit: empty family");
  if (!(threshold > 0.0)) throw DomainError("implication_audit: threshold must be > 0");
  AuditReport report;
  report.threshold = threshold;
  report.rows.resize(instances.size());
  parallel_for(instances.size(), threads, [&](std::size_t i) {
    const auto& inst = instances[i];
    auto& row = report.rows[i];
    row.instance = inst.label;
    const auto w1 = w1_exact(inst.space, inst.target);
    row.w1 = w1.plan.cost;
    row.dual_gap = w1.gap;
    row.eps = inst.eps;
    row.complement = inst.complement;
    if (inst.eps && inst.complement) row.box_bound = box_bound_via_tube(*inst.complement, *inst.eps);
    if (inst.compute_box_exact) {
      row.box_exact = box_exact(inst.space.support(), inst.space.with_weights(inst.target).support());
    }
  });

  std::vector<double> w1_series;
  std::vector<double> box_series;
  bool box_complete = true;
  for (const auto& row : report.rows) {
    w1_series.push_back(row.w1);
    if (row.box_exact) {
      box_series.push_back(*row.box_exact);
    } else if (row.box_bound) {
      box_series.push_back(*row.box_bound);
    } else {
      box_complete = false;
    }
  }
  report.w1_to_zero = vanishes(w1_series, threshold);
  report.box_to_zero = box_complete && vanishes(box_series, threshold);
  report.implication_holds = !(report.w1_to_zero && !report.box_to_zero);
  if (report.w1_to_zero && !report.box_to_zero && !box_complete) {
    report.note = "box column incomplete; supply eps or request box_exact";
  } else if (report.box_to_zero && !report.w1_to_zero) {
    report.note = "box distance vanishes while W1 does not";
  } else {
    report.note = "d_conc <= d_box; d_conc is not computed";
  }
  return report;
}

void write_audit_csv(std::ostream& out, const AuditReport& report) {
  out << "instance,w1,box_bound,box_exact,complement,eps\n";
  for (const auto& row : report.rows) {
    out << row.instance << ',' << format_double(row.w1) << ',';
    put_optional(out, row.box_bound);
    out << ',';
    put_optional(out, row.box_exact);
    out << ',';
    put_optional(out, row.complement);
    out << ',';
    put_optional(out, row.eps);
    out << '\n';
  }
}

nlohmann::json to_json(const AuditReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"instance", row.instance},
                    {"w1", row.w1},
                    {"box_bound", optional_json(row.box_bound)},
                    {"box_exact", optional_json(row.box_exact)},
                    {"complement", optional_json(row.complement)},
                    {"eps", optional_json(row.eps)},
                    {"dual_gap", row.dual_gap}});
  }
  return {{"rows", std::move(rows)},
          {"threshold", report.threshold},
          {"w1_to_zero", report.w1_to_zero},
          {"box_to_zero", report.box_to_zero},
          {"implication_holds", report.implication_holds},
          {"note", report.note}};
}

nlohmann::json to_json(const W1Result& result) {
  nlohmann::json plan = nlohmann::json::array();
  for (std::size_t i = 0; i < result.plan.rows; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < result.plan.cols; ++j) row.push_back(result.plan.at(i, j));
    plan.push_back(std::move(row));
  }
  return {{"w1", result.plan.cost},
          {"plan", std::move(plan)},
          {"potential", result.potential},
          {"dual_value", result.dual_value},
          {"gap", result.gap},
          {"lipschitz_excess", result.lipschitz_excess}};
}

}  // namespace tubelab::mmdist
