#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <variant>
#include <vector>

namespace tubelab::tube {

/// Eigenvalues d_a of sqrt(A), A the normal-curvature matrix
/// R(n, e_a, n, e_c) of a codimension-1 normal direction. Entries are >= 0.
class SpectralData {
 public:
  SpectralData() = default;
  explicit SpectralData(std::vector<double> d);

  /// n copies of the same value; the unit sphere equator uses value 1.
  static SpectralData isotropic(std::size_t n, double value);

  const std::vector<double>& values() const { return d_; }
  std::size_t size() const { return d_.size(); }
  double max() const;
  double sum_squares() const;

 private:
  std::vector<double> d_;
};

struct FlatAmbient {};

struct SphereAmbient {
  double radius = 1.0;
};

/// Codimension-1 totally geodesic locus in a compact symmetric space.
struct SymmetricCodim1Ambient {
  SpectralData spectrum;
  double t_max = 0.0;
};

using Ambient = std::variant<FlatAmbient, SphereAmbient, SymmetricCodim1Ambient>;

/// A single tube-volume query. `kappas[j-1]` holds the mean Lipschitz-Killing
/// curvature kappa_{2j} = K_{2j} / vol_m for j = 1..floor(n/2).
struct TubeSpec {
  Ambient ambient = FlatAmbient{};
  int n = 1;
  int q = 1;
  double eps = 0.0;
  double vol_m = 1.0;
  std::vector<double> kappas;

  /// Throws DomainError / DimensionError when an invariant is violated.
  void validate() const;
};

/// Pointwise Riemann tensor R_{abcd} in an orthonormal frame.
class CurvatureTensor {
 public:
  explicit CurvatureTensor(int dim);

  /// Space form of sectional curvature 1/r^2:
  /// R_{abcd} = (delta_ac delta_bd - delta_ad delta_bc) / r^2.
  static CurvatureTensor constant_curvature(int dim, double r);

  int dim() const { return dim_; }
  double operator()(int a, int b, int c, int d) const { return data_[index(a, b, c, d)]; }
  double& operator()(int a, int b, int c, int d) { return data_[index(a, b, c, d)]; }

  /// Checks antisymmetry, pair symmetry and the first Bianchi identity.
  void validate(double tol = 1e-12) const;

 private:
  std::size_t index(int a, int b, int c, int d) const;

  int dim_;
  std::vector<double> data_;
};

/// Second fundamental form: one symmetric n x n matrix per normal direction
/// together with the director cosines omega^s of the chosen normal.
struct SecondFundamentalForm {
  std::vector<Eigen::MatrixXd> K;
  std::vector<double> omega;

  /// Zero form of codimension q on an n-dimensional submanifold.
  static SecondFundamentalForm zero(int n, int q);

  void validate(int n, double tol = 1e-12) const;
  /// sum_s omega^s K^s
  Eigen::MatrixXd weighted() const;
};

/// Taylor coefficients A_j, B_j (j = 1..order) of the Fermi-frame Jacobian
/// for a covariantly constant curvature (A_{j+1} = -B_j A, B_{j+1} = A_j).
class JacobiSeriesState {
 public:
  JacobiSeriesState(const Eigen::MatrixXd& A, int order = 12);

  const Eigen::MatrixXd& curvature() const { return A_; }
  int order() const { return order_; }
  /// Coefficients are 1-indexed; index 0 is unused.
  const Eigen::MatrixXd& a_coeff(int j) const { return a_coeffs_.at(j); }
  const Eigen::MatrixXd& b_coeff(int j) const { return b_coeffs_.at(j); }

 private:
  Eigen::MatrixXd A_;
  int order_;
  std::vector<Eigen::MatrixXd> a_coeffs_;
  std::vector<Eigen::MatrixXd> b_coeffs_;
};

double weyl_flat_volume(const TubeSpec& spec);

/// eps^{2j} kappa_{2j} / eps^{2j} for an n-manifold of constant sectional
/// curvature 1/r^2: n! / (2^j j! (n-2j)!) r^{-2j}.
double constant_curvature_kappa(int n, int j, double r);

/// Large-n estimate of eps^{2j} kappa_{2j}: (n eps/r)^{2j} / (2^j j!).
double stirling_kappa_estimate(int n, int j, double eps_over_r);

/// Weyl's exact formula for a tube of geodesic radius eps in S^{n+q}_R.
double weyl_sphere_volume(const TubeSpec& spec);

/// |Vol_sphere / Vol_flat - 1| for a Sphere-ambient spec.
double flat_vs_sphere_relative_error(const TubeSpec& spec);

/// Volume of the tube around a codimension-1 totally geodesic locus in a
/// symmetric space: vol_m * 2 * int_0^eps prod_a cos(d_a t) dt.
double totally_geodesic_tube_volume(const TubeSpec& spec);

/// Dispatches on the ambient kind.
double tube_volume(const TubeSpec& spec);

/// Coefficient of dVol in k_{2j}(Omega), by the signed permutation sum.
/// Requires 2j <= n <= 8.
double lk_density(const CurvatureTensor& omega, int j);

/// det( cos(D t) + sin(D t)/D * sum_s omega^s K^s ), with the K^s given in
/// the eigenbasis of A and sin(d t)/d -> t at d = 0.
double symmetric_tube_density(const SpectralData& spectrum, const SecondFundamentalForm& sff,
                              double t);

double totally_geodesic_density(const SpectralData& spectrum, double t);

/// exp(-t^2 sum d_a^2 / 2). Requires d_a t in [0, pi/2] for every a.
double gaussian_bound(const SpectralData& spectrum, double t);

/// I + sum_{j=1}^{order} (A_j + B_j K) t^j / j!
Eigen::MatrixXd jacobi_series_eval(const JacobiSeriesState& state,
                                   const Eigen::MatrixXd& k_weighted, double t);

}  // namespace tubelab::tube
