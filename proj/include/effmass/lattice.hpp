#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <map>
#include <vector>

namespace effmass {

using cplx = std::complex<double>;

/// Integer reciprocal-lattice index. Only the first `dim` entries are used.
using MultiIndex = std::array<int, 2>;

inline MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline MultiIndex operator-(const MultiIndex& a) { return {-a[0], -a[1]}; }

/**
 * Bravais lattice in d = 1 or 2 dimensions.
 *
 * Generators are stored as the columns of a d x d matrix and are rescaled on
 * construction so that the elementary cell has unit volume. The reciprocal
 * generators satisfy zeta_l . b_j = 2 pi delta_lj.
 */
class LatticeSpec {
 public:
  explicit LatticeSpec(const Eigen::MatrixXd& generators);

  /// Unit hypercubic lattice Z^d.
  static LatticeSpec hypercubic(int dim);

  int dim() const noexcept { return static_cast<int>(generators_.cols()); }
  const Eigen::MatrixXd& generators() const noexcept { return generators_; }
  const Eigen::MatrixXd& reciprocal() const noexcept { return reciprocal_; }
  bool is_unit_hypercubic() const;

  /// G_m = sum_j m_j b_j.
  Eigen::VectorXd reciprocal_vector(const MultiIndex& m) const;

  /// Coordinates of k in the reciprocal basis.
  Eigen::VectorXd reduced_momentum(const Eigen::VectorXd& k) const;

  /// Closed centered dual cell: every reduced coordinate in [-1/2, 1/2].
  bool in_brillouin_zone(const Eigen::VectorXd& k, double tol = 1e-12) const;

 private:
  Eigen::MatrixXd generators_;
  Eigen::MatrixXd reciprocal_;
};

/// Periodic potential V(y) = sum_m V(m) exp(i G_m . y) with finite support.
class FourierPotential {
 public:
  FourierPotential(LatticeSpec lattice, std::map<MultiIndex, cplx> coefficients);

  static FourierPotential zero(const LatticeSpec& lattice);
  /// amplitude * sum_l cos(G_{e_l} . y), i.e. cos(2 pi y_l) on the unit lattice.
  static FourierPotential cosine(const LatticeSpec& lattice, double amplitude);
  /// Optical-lattice form depth * sum_l sin^2(G_{e_l} . y / 2).
  static FourierPotential laser(const LatticeSpec& lattice, double depth);

  const LatticeSpec& lattice() const noexcept { return lattice_; }
  int dim() const noexcept { return lattice_.dim(); }
  const std::map<MultiIndex, cplx>& coefficients() const noexcept { return coeffs_; }
  cplx coefficient(const MultiIndex& m) const;
  /// Largest |m_j| over the support.
  int support_radius() const;
  bool is_even() const;

  /// Point evaluation in Cartesian coordinates (real part; V is real by construction).
  double operator()(const Eigen::VectorXd& y) const;

 private:
  LatticeSpec lattice_;
  std::map<MultiIndex, cplx> coeffs_;
};

/// Plane waves exp(i G_m . y) for |m_j| <= cutoff, lexicographic in m.
class PlaneWaveBasis {
 public:
  PlaneWaveBasis(LatticeSpec lattice, int cutoff);

  const LatticeSpec& lattice() const noexcept { return lattice_; }
  int dim() const noexcept { return lattice_.dim(); }
  int cutoff() const noexcept { return cutoff_; }
  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(indices_.size()); }
  const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
  /// Row j holds G_{m_j}.
  const Eigen::MatrixXd& vectors() const noexcept { return vectors_; }
  /// Position of m in the basis, or -1.
  Eigen::Index find(const MultiIndex& m) const;

 private:
  LatticeSpec lattice_;
  int cutoff_;
  std::vector<MultiIndex> indices_;
  Eigen::MatrixXd vectors_;
};

PlaneWaveBasis build_basis(const LatticeSpec& lattice, int cutoff);

}  // namespace effmass
