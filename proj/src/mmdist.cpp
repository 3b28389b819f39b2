#include "tubelab/mmdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tubelab/errors.hpp"

namespace tubelab::mmdist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Residual masses at or below this are treated as exhausted.
constexpr double kMassEps = 1e-15;

void check_order(int order) {
  if (order != 1 && order != 2) throw DomainError("projection_transport_cost: order must be 1 or 2");
}

}  // namespace

void check_weights(std::span<const double> w, std::size_t m, const char* who) {
  if (w.size() != m) {
    throw DimensionError(std::string(who) + ": expected " + std::to_string(m) + " weights");
  }
  double total = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string(who) + ": weights must be finite and >= 0");
    }
    total += v;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw DomainError(std::string(who) + ": weights must sum to 1");
  }
}

FiniteMMSpace::FiniteMMSpace(std::size_t m, std::vector<double> distances,
                             std::vector<double> weights)
    : m_(m), d_(std::move(distances)), w_(std::move(weights)) {
  if (m_ == 0) throw DimensionError("FiniteMMSpace: need at least one point");
  if (d_.size() != m_ * m_) throw DimensionError("FiniteMMSpace: D must have m*m entries");
  for (std::size_t i = 0; i < m_; ++i) {
    if (std::fabs(d_[i * m_ + i]) > 1e-12) {
      throw DomainError("FiniteMMSpace: diagonal must be zero");
    }
    d_[i * m_ + i] = 0.0;
    for (std::size_t j = 0; j < m_; ++j) {
      const double v = d_[i * m_ + j];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw DomainError("FiniteMMSpace: distances must be finite and >= 0");
      }
      if (std::fabs(v - d_[j * m_ + i]) > 1e-12) {
        throw DomainError("FiniteMMSpace: D must be symmetric");
      }
    }
  }
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t j = 0; j < m_; ++j)
      for (std::size_t k = 0; k < m_; ++k) {
        if (d_[i * m_ + k] > d_[i * m_ + j] + d_[j * m_ + k] + 1e-9) {
          throw DomainError("FiniteMMSpace: triangle inequality violated");
        }
      }
  check_weights(w_, m_, "FiniteMMSpace");
}

FiniteMMSpace FiniteMMSpace::with_weights(std::vector<double> weights) const {
  return FiniteMMSpace(m_, d_, std::move(weights));
}

FiniteMMSpace FiniteMMSpace::support() const {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < m_; ++i) {
    if (w_[i] > 0.0) keep.push_back(i);
  }
  std::vector<double> d(keep.size() * keep.size());
  std::vector<double> w(keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a) {
    w[a] = w_[keep[a]];
    for (std::size_t b = 0; b < keep.size(); ++b) d[a * keep.size() + b] = distance(keep[a], keep[b]);
  }
  return FiniteMMSpace(keep.size(), std::move(d), std::move(w));
}

FiniteMMSpace FiniteMMSpace::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("m") || !doc.contains("D") || !doc.contains("w")) {
    throw DomainError("FiniteMMSpace: JSON must be an object with keys m, D, w");
  }
  for (const auto& item : doc.items()) {
    if (item.key() != "m" && item.key() != "D" && item.key() != "w") {
      throw DomainError("FiniteMMSpace: unknown key '" + item.key() + "'");
    }
  }
  try {
    const auto m = doc.at("m").get<std::size_t>();
    auto d = doc.at("D").get<std::vector<double>>();
    auto w = doc.at("w").get<std::vector<double>>();
    return FiniteMMSpace(m, std::move(d), std::move(w));
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("FiniteMMSpace: malformed JSON: ") + e.what());
  }
}

nlohmann::json FiniteMMSpace::to_json() const {
  return {{"m", m_}, {"D", d_}, {"w", w_}};
}

W1Result w1_exact(const FiniteMMSpace& mu, std::span<const double> nu) {
  const std::size_t m = mu.size();
  check_weights(nu, m, "w1_exact");
  double mass_mu = 0.0, mass_nu = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mass_mu += mu.weights()[i];
    mass_nu += nu[i];
  }
  if (std::fabs(mass_mu - mass_nu) > 1e-12) throw InfeasibleError("w1_exact: total masses differ");

  std::vector<double> supply(mu.weights());
  std::vector<double> demand(nu.begin(), nu.end());
  std::vector<double> flow(m * m, 0.0);
  std::vector<double> h_src(m, 0.0), h_snk(m, 0.0);
  std::vector<double> dist_src(m), dist_snk(m);
  std::vector<int> pred_src(m), pred_snk(m);
  std::vector<char> done_src(m), done_snk(m);

  // Successive shortest paths on the complete bipartite residual graph.
  // Nodes are scanned in (distance, sources before sinks, index) order, which
  // fixes the tie-breaking between equal-cost plans.
  while (true) {
    bool any_supply = false;
    for (std::size_t i = 0; i < m; ++i) {
      dist_src[i] = supply[i] > kMassEps ? 0.0 : kInf;
      any_supply = any_supply || supply[i] > kMassEps;
      pred_src[i] = -1;
      done_src[i] = 0;
      dist_snk[i] = kInf;
      pred_snk[i] = -1;
      done_snk[i] = 0;
    }
    if (!any_supply) break;

    while (true) {
      double best = kInf;
      int node = -1;
      bool is_sink = false;
      for (std::size_t i = 0; i < m; ++i) {
        if (!done_src[i] && dist_src[i] < best) {
          best = dist_src[i];
          node = static_cast<int>(i);
          is_sink = false;
        }
      }
      for (std::size_t j = 0; j < m; ++j) {
        if (!done_snk[j] && dist_snk[j] < best) {
          best = dist_snk[j];
          node = static_cast<int>(j);
          is_sink = true;
        }
      }
      if (node < 0) break;
      if (!is_sink) {
        const auto i = static_cast<std::size_t>(node);
        done_src[i] = 1;
        for (std::size_t j = 0; j < m; ++j) {
          if (done_snk[j]) continue;
          const double rc = std::max(0.0, mu.distance(i, j) + h_src[i] - h_snk[j]);
          if (best + rc < dist_snk[j]) {
            dist_snk[j] = best + rc;
            pred_snk[j] = node;
          }
        }
      } else {
        const auto j = static_cast<std::size_t>(node);
        done_snk[j] = 1;
        for (std::size_t i = 0; i < m; ++i) {
          if (done_src[i] || flow[i * m + j] <= 0.0) continue;
          const double rc = std::max(0.0, -mu.distance(i, j) + h_snk[j] - h_src[i]);
          if (best + rc < dist_src[i]) {
            dist_src[i] = best + rc;
            pred_src[i] = node;
          }
        }
      }
    }

    int target = -1;
    for (std::size_t j = 0; j < m; ++j) {
      if (demand[j] > kMassEps && dist_snk[j] < kInf &&
          (target < 0 || dist_snk[j] < dist_snk[static_cast<std::size_t>(target)])) {
        target = static_cast<int>(j);
      }
    }
    if (target < 0) throw InfeasibleError("w1_exact: no augmenting path");
    const double reach = dist_snk[static_cast<std::size_t>(target)];
    for (std::size_t v = 0; v < m; ++v) {
      h_src[v] += std::min(dist_src[v], reach);
      h_snk[v] += std::min(dist_snk[v], reach);
    }

    // Walk back to the start source and find the bottleneck.
    double amount = demand[static_cast<std::size_t>(target)];
    std::size_t j = static_cast<std::size_t>(target);
    std::size_t i = static_cast<std::size_t>(pred_snk[j]);
    while (pred_src[i] >= 0) {
      const auto back = static_cast<std::size_t>(pred_src[i]);
      amount = std::min(amount, flow[i * m + back]);
      j = back;
      i = static_cast<std::size_t>(pred_snk[j]);
    }
    amount = std::min(amount, supply[i]);

    j = static_cast<std::size_t>(target);
    i = static_cast<std::size_t>(pred_snk[j]);
    demand[j] -= amount;
    while (true) {
      flow[i * m + j] += amount;
      if (pred_src[i] < 0) break;
      const auto back = static_cast<std::size_t>(pred_src[i]);
      flow[i * m + back] -= amount;
      j = back;
      i = static_cast<std::size_t>(pred_snk[j]);
    }
    supply[i] -= amount;
  }

  W1Result result;
  result.plan.rows = m;
  result.plan.cols = m;
  result.plan.pi = std::move(flow);
  for (auto& v : result.plan.pi) v = std::max(v, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) result.plan.cost += result.plan.pi[i * m + j] * mu.distance(i, j);

  // c-transform of the sink potentials: f(x) = min_j D(x, j) - h_j.
  result.potential.assign(m, kInf);
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t j = 0; j < m; ++j)
      result.potential[x] = std::min(result.potential[x], mu.distance(x, j) - h_snk[j]);
  for (std::size_t x = 0; x < m; ++x) {
    result.dual_value += (mu.weights()[x] - nu[x]) * result.potential[x];
  }
  result.gap = result.plan.cost - result.dual_value;
  result.lipschitz_excess = -kInf;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      result.lipschitz_excess =
          std::max(result.lipschitz_excess,
                   std::fabs(result.potential[a] - result.potential[b]) - mu.distance(a, b));
  return result;
}

ProjectionCost projection_transport_cost(const sphere_lab::SampleCloud& cloud, int order) {
  check_order(order);
  if (cloud.count == 0) throw DomainError("projection_transport_cost: empty cloud");
  ProjectionCost out;
  const double unit = 1.0 / static_cast<double>(cloud.count);
  for (std::size_t i = 0; i < cloud.count; ++i) {
    const auto x = cloud.point(i);
    bool pole = true;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) pole = pole && x[k] == 0.0;
    if (pole) {
      out.excluded_mass += unit;
      continue;
    }
    const double d = std::fabs(cloud.colatitudes[i]);
    out.cost += unit * (order == 1 ? d : d * d);
  }
  return out;
}

ProjectionCost projection_transport_cost(const FiniteMMSpace& space, std::span<const int> proj,
                                         int order) {
  check_order(order);
  if (proj.size() != space.size()) throw DimensionError("projection map must cover every point");
  ProjectionCost out;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double w = space.weights()[i];
    if (proj[i] < 0) {
      out.excluded_mass += w;
      continue;
    }
    if (static_cast<std::size_t>(proj[i]) >= space.size()) {
      throw DimensionError("projection target out of range");
    }
    const double d = space.distance(i, static_cast<std::size_t>(proj[i]));
    out.cost += w * (order == 1 ? d : d * d);
  }
  return out;
}

std::vector<double> pushforward(const FiniteMMSpace& space, std::span<const int> proj) {
  if (proj.size() != space.size()) throw DimensionError("projection map must cover every point");
  std::vector<double> nu(space.size(), 0.0);
  double kept = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (proj[i] < 0) continue;
    if (static_cast<std::size_t>(proj[i]) >= space.size()) {
      throw DimensionError("projection target out of range");
    }
    nu[static_cast<std::size_t>(proj[i])] += space.weights()[i];
    kept += space.weights()[i];
  }
  if (!(kept > 0.0)) throw DomainError("pushforward: every point is focal");
  if (kept != 1.0) {
    for (double& v : nu) v /= kept;
  }
  return nu;
}

}  // namespace tubelab::mmdist
