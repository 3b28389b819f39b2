// Lipschitz-Killing curvature densities by brute-force exterior algebra.
//
// Forms on an n-dimensional frame (n <= 8) are stored densely, indexed by the
// bitmask of their basis covector e^{i_1} ^ ... ^ e^{i_p} with i_1 < ... < i_p.

#include <array>
#include <bit>
#include <cmath>
#include <string>
#include <vector>

#include "tubelab/errors.hpp"
#include "tubelab/tube.hpp"

namespace tubelab::tube {

namespace {

constexpr int kMaxDim = 8;
using Form = std::array<double, 1u << kMaxDim>;

// Sign of e^{A} ^ e^{B} relative to e^{A|B} for disjoint sorted masks:
// (-1)^{#pairs (i in A, j in B) with i > j}.
double wedge_sign(unsigned a, unsigned b) {
  int swaps = 0;
  for (unsigned rest = b; rest != 0; rest &= rest - 1) {
    const int j = std::countr_zero(rest);
    swaps += std::popcount(a >> (j + 1));
  }
  return (swaps % 2 == 0) ? 1.0 : -1.0;
}

// Bitmasks grouped by popcount, so wedges only visit the relevant degree.
struct MaskTable {
  std::array<std::vector<unsigned>, kMaxDim + 1> by_degree;
  explicit MaskTable(int n) {
    for (unsigned m = 0; m < (1u << n); ++m) by_degree[std::popcount(m)].push_back(m);
  }
};

// f of degree p wedged with the 2-form g.
Form wedge(const Form& f, int p, const Form& g, const MaskTable& masks) {
  Form out{};
  for (unsigned a : masks.by_degree[p]) {
    if (f[a] == 0.0) continue;
    for (unsigned b : masks.by_degree[2]) {
      if (g[b] == 0.0 || (a & b) != 0) continue;
      out[a | b] += wedge_sign(a, b) * f[a] * g[b];
    }
  }
  return out;
}

// Single component (f ^ g)[target] for f of degree |target| - 2.
double wedge_component(const Form& f, const Form& g, unsigned target, const MaskTable& masks) {
  double sum = 0.0;
  for (unsigned b : masks.by_degree[2]) {
    if ((b & target) != b || g[b] == 0.0) continue;
    const unsigned a = target & ~b;
    sum += wedge_sign(a, b) * f[a] * g[b];
  }
  return sum;
}

struct Accumulator {
  int n;
  int j;
  unsigned full;
  const MaskTable* masks;
  std::array<std::array<Form, kMaxDim>, kMaxDim> omega;  // curvature 2-forms
  double sum = 0.0;
};

// Parity of the permutation given as a sequence of distinct indices.
double permutation_sign(const std::array<int, kMaxDim>& seq, int len) {
  int inversions = 0;
  for (int i = 0; i < len; ++i) {
    for (int k = i + 1; k < len; ++k) {
      if (seq[i] > seq[k]) ++inversions;
    }
  }
  return (inversions % 2 == 0) ? 1.0 : -1.0;
}

// Enumerates the ordered prefix sigma(1..2j); the remaining indices are
// placed in increasing order, since eps_sigma e^{sigma(2j+1)} ^ ... ^ e^{sigma(n)}
// does not depend on their order. The (n-2j)! equal tail terms are accounted
// for by the caller.
void enumerate(Accumulator& acc, std::array<int, kMaxDim>& seq, int depth, unsigned used,
               const Form& current) {
  if (depth == acc.j) {
    int len = 2 * acc.j;
    for (int i = 0; i < acc.n; ++i) {
      if ((used & (1u << i)) == 0) seq[len++] = i;
    }
    const unsigned tail = acc.full & ~used;
    acc.sum += permutation_sign(seq, acc.n) * current[used] * wedge_sign(used, tail);
    return;
  }
  for (int a = 0; a < acc.n; ++a) {
    if (used & (1u << a)) continue;
    for (int b = 0; b < acc.n; ++b) {
      if (b == a || (used & (1u << b))) continue;
      seq[2 * depth] = a;
      seq[2 * depth + 1] = b;
      const unsigned next_used = used | (1u << a) | (1u << b);
      if (depth + 1 == acc.j) {
        // Only the component on next_used survives the wedge with the tail.
        Form last{};
        last[next_used] = wedge_component(current, acc.omega[a][b], next_used, *acc.masks);
        enumerate(acc, seq, depth + 1, next_used, last);
      } else {
        const Form next = wedge(current, 2 * depth, acc.omega[a][b], *acc.masks);
        enumerate(acc, seq, depth + 1, next_used, next);
      }
    }
  }
}

}  // namespace

CurvatureTensor::CurvatureTensor(int dim) : dim_(dim) {
  if (dim < 1) throw DimensionError("CurvatureTensor: dimension must be >= 1");
  const auto n = static_cast<std::size_t>(dim);
  data_.assign(n * n * n * n, 0.0);
}

CurvatureTensor CurvatureTensor::constant_curvature(int dim, double r) {
  if (!(r > 0.0)) throw DomainError("CurvatureTensor: radius must be > 0");
  CurvatureTensor t(dim);
  const double k = 1.0 / (r * r);
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      if (a == b) continue;
      t(a, b, a, b) = k;
      t(a, b, b, a) = -k;
    }
  }
  return t;
}

std::size_t CurvatureTensor::index(int a, int b, int c, int d) const {
  if (a < 0 || b < 0 || c < 0 || d < 0 || a >= dim_ || b >= dim_ || c >= dim_ || d >= dim_) {
    throw DimensionError("CurvatureTensor: index out of range");
  }
  const auto n = static_cast<std::size_t>(dim_);
  return ((static_cast<std::size_t>(a) * n + b) * n + c) * n + d;
}

void CurvatureTensor::validate(double tol) const {
  const int n = dim_;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double r = (*this)(a, b, c, d);
          if (std::fabs(r + (*this)(b, a, c, d)) > tol || std::fabs(r + (*this)(a, b, d, c)) > tol) {
            throw DomainError("CurvatureTensor: antisymmetry violated");
          }
          if (std::fabs(r - (*this)(c, d, a, b)) > tol) {
            throw DomainError("CurvatureTensor: pair symmetry violated");
          }
          if (std::fabs(r + (*this)(a, c, d, b) + (*this)(a, d, b, c)) > tol) {
            throw DomainError("CurvatureTensor: first Bianchi identity violated");
          }
        }
}

double lk_density(const CurvatureTensor& omega, int j) {
  const int n = omega.dim();
  if (j < 0 || 2 * j > n) {
    throw DimensionError("lk_density: need 0 <= 2j <= n, got j = " + std::to_string(j));
  }
  if (n > kMaxDim) throw DimensionError("lk_density: permutation sum limited to n <= 8");
  if (j == 0) return 1.0;

  Accumulator acc{};
  acc.n = n;
  acc.j = j;
  acc.full = (1u << n) - 1u;
  const MaskTable masks(n);
  acc.masks = &masks;
  // Omega_ab = (1/2) sum_{c,d} R_abcd e^c ^ e^d = sum_{c<d} R_abcd e^c ^ e^d
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      Form f{};
      for (int c = 0; c < n; ++c) {
        for (int d = c + 1; d < n; ++d) f[(1u << c) | (1u << d)] = omega(a, b, c, d);
      }
      acc.omega[a][b] = f;
    }
  }

  Form unit{};
  unit[0] = 1.0;
  std::array<int, kMaxDim> seq{};
  enumerate(acc, seq, 0, 0u, unit);

  // 1/(2^j j! (n-2j)!) times the (n-2j)! identical tail orderings.
  double norm = 1.0;
  for (int i = 1; i <= j; ++i) norm *= 2.0 * i;
  return acc.sum / norm;
}

}  // namespace tubelab::tube
