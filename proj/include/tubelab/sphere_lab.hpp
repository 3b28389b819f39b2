#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace tubelab::sphere_lab {

/// N points on the unit sphere S^n stored row-major in R^{n+1}, with the
/// signed geodesic distance of each point to the equator {x_n = 0}.
struct SampleCloud {
  int n = 0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::vector<double> points;
  std::vector<double> colatitudes;

  int ambient_dim() const { return n + 1; }
  std::span<const double> point(std::size_t i) const {
    const auto d = static_cast<std::size_t>(n + 1);
    return {points.data() + i * d, d};
  }
};

struct SampleOptions {
  unsigned threads = 1;
  /// Upper bound on count * (n + 1) stored doubles.
  std::size_t max_values = std::size_t{1} << 28;
};

/// Points per independent RNG stream. Stream b covers points
/// [b * kStreamBlock, (b+1) * kStreamBlock) and is seeded from (seed, b), so
/// the cloud does not depend on the number of worker threads.
inline constexpr std::size_t kStreamBlock = 4096;

/// i.i.d. uniform points on S^n (normalised isotropic Gaussians).
SampleCloud sample_sphere(int n, std::size_t count, std::uint64_t seed,
                          const SampleOptions& options = {});

/// Great-circle distance between unit vectors; throws DomainError if either
/// norm differs from 1 by more than 1e-9.
double geodesic_distance(std::span<const double> x, std::span<const double> y);

struct EquatorProjection {
  std::vector<double> point;
  double dist = 0.0;
  /// Set at the poles, where every equator point is nearest.
  bool focal = false;
};

/// Nearest point on the equator {x_n = 0}. At a pole the canonical point e_0
/// is returned with dist = pi/2 and `focal` set.
EquatorProjection project_to_equator(std::span<const double> x);

struct ComplementEstimate {
  double p_hat = 0.0;
  double std_err = 0.0;
};

/// Fraction of the cloud farther than eps from the equator.
ComplementEstimate empirical_complement(const SampleCloud& cloud, double eps);

/// Fraction of the cloud with distance_to_locus(point) > eps, for a
/// user-supplied locus.
ComplementEstimate empirical_complement(
    const SampleCloud& cloud, double eps,
    const std::function<double(std::span<const double>)>& distance_to_locus);

/// Header "x0,...,xn,colatitude", one row per point, round-trip precision.
void write_cloud_csv(std::ostream& out, const SampleCloud& cloud);
/// Reads the format written by write_cloud_csv and checks its invariants.
SampleCloud read_cloud_csv(std::istream& in, std::uint64_t seed = 0);

}  // namespace tubelab::sphere_lab
