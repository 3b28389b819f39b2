#include "tubelab/sphere_lab.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "tubelab/errors.hpp"
#include "tubelab/format.hpp"
#include "tubelab/parallel.hpp"

namespace tubelab::sphere_lab {

namespace {

constexpr double kNormTol = 1e-9;

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

void check_unit(std::span<const double> x, const char* who) {
  if (x.empty() || std::fabs(norm(x) - 1.0) > kNormTol) {
    throw DomainError(std::string(who) + ": argument is not a unit vector");
  }
}

double colatitude(std::span<const double> x) {
  const double last = x.back();
  return std::atan2(last, norm(x.first(x.size() - 1)));
}

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

SampleCloud sample_sphere(int n, std::size_t count, std::uint64_t seed,
                          const SampleOptions& options) {
  if (n < 1) throw DomainError("sample_sphere: n must be >= 1");
  if (count < 1) throw DomainError("sample_sphere: N must be >= 1");
  const auto dim = static_cast<std::size_t>(n) + 1;
  if (count > options.max_values / dim) {
    throw ResourceError("sample_sphere: N * (n + 1) exceeds the configured cap");
  }

  SampleCloud cloud;
  cloud.n = n;
  cloud.count = count;
  cloud.seed = seed;
  cloud.points.resize(count * dim);
  cloud.colatitudes.resize(count);

  const std::size_t blocks = (count + kStreamBlock - 1) / kStreamBlock;
  parallel_for(blocks, options.threads, [&](std::size_t b) {
    auto engine = stream_engine(seed, b);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t end = std::min(count, (b + 1) * kStreamBlock);
    for (std::size_t i = b * kStreamBlock; i < end; ++i) {
      std::span<double> x(cloud.points.data() + i * dim, dim);
      double r = 0.0;
      do {
        r = 0.0;
        for (double& v : x) {
          v = gauss(engine);
          r += v * v;
        }
      } while (r == 0.0);
      r = std::sqrt(r);
      for (double& v : x) v /= r;
      cloud.colatitudes[i] = colatitude(x);
    }
  });
  return cloud;
}

double geodesic_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("geodesic_distance: dimension mismatch");
  check_unit(x, "geodesic_distance");
  check_unit(y, "geodesic_distance");
  // arccos(<x,y>) written as 2 atan2(|x-y|, |x+y|), accurate at both ends.
  double diff = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    diff += (x[i] - y[i]) * (x[i] - y[i]);
    sum += (x[i] + y[i]) * (x[i] + y[i]);
  }
  return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

EquatorProjection project_to_equator(std::span<const double> x) {
  check_unit(x, "project_to_equator");
  EquatorProjection proj;
  proj.point.assign(x.begin(), x.end());
  proj.point.back() = 0.0;
  const double rest = norm(x.first(x.size() - 1));
  if (rest == 0.0) {
    std::fill(proj.point.begin(), proj.point.end(), 0.0);
    proj.point.front() = 1.0;
    proj.dist = std::numbers::pi / 2.0;
    proj.focal = true;
    return proj;
  }
  for (double& v : proj.point) v /= rest;
  proj.dist = std::atan2(std::fabs(x.back()), rest);
  return proj;
}

ComplementEstimate empirical_complement(const SampleCloud& cloud, double eps) {
  if (!(eps >= 0.0 && eps <= std::numbers::pi / 2.0)) {
    throw DomainError("empirical_complement: eps must lie in [0, pi/2]");
  }
  if (cloud.count == 0) throw DomainError("empirical_complement: empty cloud");
  std::size_t outside = 0;
  for (double c : cloud.colatitudes) {
    if (std::fabs(c) > eps) ++outside;
  }
  const double p = static_cast<double>(outside) / static_cast<double>(cloud.count);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(cloud.count))};
}

ComplementEstimate empirical_complement(
    const SampleCloud& cloud, double eps,
    const std::function<double(std::span<const double>)>& distance_to_locus) {
  if (!(eps >= 0.0)) throw DomainError("empirical_complement: eps must be >= 0");
  if (cloud.count == 0) throw DomainError("empirical_complement: empty cloud");
  std::size_t outside = 0;
  for (std::size_t i = 0; i < cloud.count; ++i) {
    if (distance_to_locus(cloud.point(i)) > eps) ++outside;
  }
  const double p = static_cast<double>(outside) / static_cast<double>(cloud.count);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(cloud.count))};
}

void write_cloud_csv(std::ostream& out, const SampleCloud& cloud) {
  const int dim = cloud.ambient_dim();
  for (int k = 0; k < dim; ++k) out << 'x' << k << ',';
  out << "colatitude\n";
  for (std::size_t i = 0; i < cloud.count; ++i) {
    for (double v : cloud.point(i)) out << format_double(v) << ',';
    out << format_double(cloud.colatitudes[i]) << '\n';
  }
}

SampleCloud read_cloud_csv(std::istream& in, std::uint64_t seed) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("read_cloud_csv: missing header");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 3 || header.back() != "colatitude") {
    throw DomainError("read_cloud_csv: header must be x0,...,xn,colatitude");
  }
  const std::size_t dim = header.size() - 1;
  for (std::size_t k = 0; k < dim; ++k) {
    if (header[k] != "x" + std::to_string(k)) {
      throw DomainError("read_cloud_csv: unexpected column '" + header[k] + "'");
    }
  }

  SampleCloud cloud;
  cloud.n = static_cast<int>(dim) - 1;
  cloud.seed = seed;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cell.size()) {
        throw DomainError("read_cloud_csv: bad number on row " + std::to_string(row));
      }
      values.push_back(v);
    }
    if (values.size() != dim + 1) {
      throw DomainError("read_cloud_csv: wrong column count on row " + std::to_string(row));
    }
    std::span<const double> x(values.data(), dim);
    check_unit(x, "read_cloud_csv");
    if (std::fabs(colatitude(x) - values.back()) > 1e-9) {
      throw DomainError("read_cloud_csv: colatitude inconsistent on row " + std::to_string(row));
    }
    cloud.points.insert(cloud.points.end(), x.begin(), x.end());
    cloud.colatitudes.push_back(values.back());
  }
  cloud.count = cloud.colatitudes.size();
  return cloud;
}

}  // namespace tubelab::sphere_lab
