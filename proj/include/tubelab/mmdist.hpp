#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tubelab/sphere_lab.hpp"

namespace tubelab::mmdist {

/// A finite metric measure space: m points, a symmetric (pseudo-)distance
/// matrix with zero diagonal obeying the triangle inequality, and probability
/// weights.
class FiniteMMSpace {
 public:
  /// Validates all invariants (triangle inequality to 1e-9, sum w = 1 to 1e-12).
  FiniteMMSpace(std::size_t m, std::vector<double> distances, std::vector<double> weights);

  std::size_t size() const { return m_; }
  double distance(std::size_t i, std::size_t j) const { return d_[i * m_ + j]; }
  const std::vector<double>& distances() const { return d_; }
  const std::vector<double>& weights() const { return w_; }

  /// Same metric, different weights (validated).
  FiniteMMSpace with_weights(std::vector<double> weights) const;
  /// Restriction to the points of positive weight.
  FiniteMMSpace support() const;

  /// {"m": m, "D": [row-major], "w": [...]}
  static FiniteMMSpace from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

 private:
  std::size_t m_;
  std::vector<double> d_;
  std::vector<double> w_;
};

/// Validates a probability vector of the given length.
void check_weights(std::span<const double> w, std::size_t m, const char* who);

struct TransportPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> pi;  // row-major rows x cols
  double cost = 0.0;

  double at(std::size_t i, std::size_t j) const { return pi[i * cols + j]; }
};

struct W1Result {
  TransportPlan plan;
  /// 1-Lipschitz potential f on the ground set.
  std::vector<double> potential;
  /// sum mu f - sum nu f, a lower bound on W1.
  double dual_value = 0.0;
  /// cost - dual_value.
  double gap = 0.0;
  /// max_{i,k} (|f(i) - f(k)| - D(i,k)), <= 0 up to rounding.
  double lipschitz_excess = 0.0;
};

/// Exact W1 between mu (the space's weights) and nu on the same ground set by
/// successive shortest augmenting paths with node potentials.
W1Result w1_exact(const FiniteMMSpace& mu, std::span<const double> nu);

struct ProjectionCost {
  double cost = 0.0;
  /// Mass at focal points, excluded from the cost.
  double excluded_mass = 0.0;
};

/// (1/N) sum |colatitude_i|^order over the non-focal points of the cloud.
ProjectionCost projection_transport_cost(const sphere_lab::SampleCloud& cloud, int order);

/// sum_i w_i D(i, proj[i])^order. proj[i] < 0 marks a focal point.
ProjectionCost projection_transport_cost(const FiniteMMSpace& space, std::span<const int> proj,
                                         int order);

/// Pushforward of the space's weights along proj (focal points are dropped
/// and the remainder renormalised).
std::vector<double> pushforward(const FiniteMMSpace& space, std::span<const int> proj);

/// Ground set of 2N points: the cloud (uniform weights, indices 0..N-1)
/// followed by the equator projections (weight 0, indices N..2N-1), with
/// geodesic distances. proj[i] = N + i (-1 at a pole); the projected points
/// map to themselves.
struct ProjectedCloudSpace {
  FiniteMMSpace space;
  std::vector<int> proj;
};
ProjectedCloudSpace equator_projection_space(const sphere_lab::SampleCloud& cloud);

/// Box distance restricted to step parametrisations on k equal subintervals
/// of [0,1), k the least common denominator of all weights. Exact within that
/// class and an upper bound on the true box distance. Throws ResolutionError
/// if k would exceed max_denominator.
double box_exact(const FiniteMMSpace& x, const FiniteMMSpace& y, int max_denominator = 8);

/// max(complement_mass, 2 eps): box-distance certificate for the ambient
/// space against its projection onto a totally geodesic locus.
double box_bound_via_tube(double complement_mass, double eps);

struct AuditInstance {
  std::string label;
  FiniteMMSpace space;           // ground set with mu as its weights
  std::vector<double> target;    // nu on the same ground set
  std::optional<double> eps;     // tube radius for the box bound
  std::optional<double> complement;
  bool compute_box_exact = false;
};

/// Instance comparing mu with its pushforward along proj, eps-complement
/// measured by D(i, proj[i]).
AuditInstance make_projection_instance(std::string label, const FiniteMMSpace& space,
                                       std::span<const int> proj, double eps,
                                       bool compute_box_exact = false);

struct AuditRow {
  std::string instance;
  double w1 = 0.0;
  std::optional<double> box_bound;
  std::optional<double> box_exact;
  std::optional<double> complement;
  std::optional<double> eps;
  double dual_gap = 0.0;
};

struct AuditReport {
  std::vector<AuditRow> rows;
  /// W1 nonincreasing along the family and below the threshold at the end.
  bool w1_to_zero = false;
  /// Box column (exact when computed, else the tube bound) likewise.
  bool box_to_zero = false;
  /// False only if W1 vanishes while the box column does not.
  bool implication_holds = true;
  double threshold = 0.05;
  std::string note;
};

AuditReport implication_audit(std::span<const AuditInstance> instances, double threshold = 0.05,
                              unsigned threads = 1);

void write_audit_csv(std::ostream& out, const AuditReport& report);
nlohmann::json to_json(const AuditReport& report);
nlohmann::json to_json(const W1Result& result);

}  // namespace tubelab::mmdist
