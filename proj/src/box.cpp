#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "tubelab/errors.hpp"
#include "tubelab/mmdist.hpp"

namespace tubelab::mmdist {

namespace {

// Smallest d <= max_den with w * d integral (to 1e-9), or 0 if none.
int denominator_of(double w, int max_den) {
  for (int d = 1; d <= max_den; ++d) {
    const double scaled = w * d;
    if (std::fabs(scaled - std::round(scaled)) <= 1e-9) return d;
  }
  return 0;
}

std::vector<std::size_t> atoms(const FiniteMMSpace& s, int k) {
  std::vector<std::size_t> seq;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto count = static_cast<long>(std::lround(s.weights()[i] * k));
    for (long c = 0; c < count; ++c) seq.push_back(i);
  }
  if (seq.size() != static_cast<std::size_t>(k)) {
    throw ResolutionError("box_exact: weights do not resolve on the common grid");
  }
  return seq;
}

}  // namespace

double box_exact(const FiniteMMSpace& x, const FiniteMMSpace& y, int max_denominator) {
  if (max_denominator < 1) throw DomainError("box_exact: max_denominator must be >= 1");
  long k = 1;
  for (const auto* s : {&x, &y}) {
    for (double w : s->weights()) {
      if (w == 0.0) continue;
      const int d = denominator_of(w, max_denominator);
      if (d == 0) {
        throw ResolutionError("box_exact: weight " + std::to_string(w) +
                              " has no denominator <= " + std::to_string(max_denominator));
      }
      k = std::lcm(k, static_cast<long>(d));
      if (k > max_denominator) {
        throw ResolutionError("box_exact: common denominator exceeds " +
                              std::to_string(max_denominator));
      }
    }
  }
  const int kk = static_cast<int>(k);
  const auto phi = atoms(x, kk);
  auto psi = atoms(y, kk);
  std::sort(psi.begin(), psi.end());

  const auto kz = static_cast<std::size_t>(kk);
  std::vector<double> rho1(kz * kz);
  for (std::size_t s = 0; s < kz; ++s)
    for (std::size_t t = 0; t < kz; ++t) rho1[s * kz + t] = x.distance(phi[s], phi[t]);

  const std::uint32_t full = (std::uint32_t{1} << kk) - 1;
  std::vector<double> delta(kz * kz);
  std::vector<double> sup(std::size_t{full} + 1);
  double best = 1.0;
  do {
    for (std::size_t s = 0; s < kz; ++s)
      for (std::size_t t = 0; t < kz; ++t)
        delta[s * kz + t] = std::fabs(rho1[s * kz + t] - y.distance(psi[s], psi[t]));
    sup[0] = 0.0;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      const int low = std::countr_zero(mask);
      const std::uint32_t rest = mask & (mask - 1);
      double v = sup[rest];
      for (std::uint32_t r = rest; r != 0; r &= r - 1) {
        v = std::max(v, delta[static_cast<std::size_t>(low) * kz +
                              static_cast<std::size_t>(std::countr_zero(r))]);
      }
      sup[mask] = v;
      const double outside = static_cast<double>(kk - std::popcount(mask)) / kk;
      best = std::min(best, std::max(v, outside));
    }
    if (best == 0.0) break;
  } while (std::next_permutation(psi.begin(), psi.end()));
  return best;
}

double box_bound_via_tube(double complement_mass, double eps) {
  if (!(complement_mass >= 0.0 && complement_mass <= 1.0)) {
    throw DomainError("box_bound_via_tube: complement mass must lie in [0, 1]");
  }
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError("box_bound_via_tube: eps must be >= 0");
  return std::max(complement_mass, 2.0 * eps);
}

}  // namespace tubelab::mmdist
