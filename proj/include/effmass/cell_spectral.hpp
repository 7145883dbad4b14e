#pragma once

#include "effmass/lattice.hpp"

#include <Eigen/Dense>

#include <vector>

namespace effmass {

/// Relative spectral gap below which a band is treated as degenerate.
inline constexpr double kSimpleGapTolerance = 1e-8;

/// Galerkin matrix of the shifted cell Hamiltonian 1/2 (-i grad + k)^2 + V at a fixed k.
struct BlochMatrix {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXd k;
};

/// One Bloch band at one quasimomentum; chi(y) = sum_m coeffs[m] exp(i G_m . y).
struct BlochEigenpair {
  int band = 1;  // 1-based
  Eigen::VectorXd k;
  double energy = 0.0;
  Eigen::VectorXcd coeffs;
};

struct BandDerivatives {
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  /// dk_chi[j] = d chi / d k_j, orthogonal to chi.
  std::vector<Eigen::VectorXcd> dk_chi;
};

/**
 * Full eigendecomposition of one Bloch matrix.
 *
 * Energies are nondecreasing. Every eigenvector is unit-norm with its
 * largest-modulus coefficient real and positive (first such index on ties).
 */
struct CellSpectrum {
  Eigen::VectorXd k;
  Eigen::VectorXd energies;
  Eigen::MatrixXcd vectors;

  Eigen::Index size() const noexcept { return energies.size(); }
  BlochEigenpair pair(int band) const;
  /// min(|E_{n-1} - E_n|, |E_{n+1} - E_n|) / max(1, |E_n|).
  double relative_gap(int band) const;
  void require_simple(int band) const;
};

BlochMatrix assemble_bloch_matrix(const PlaneWaveBasis& basis, const FourierPotential& potential,
                                  const Eigen::VectorXd& k);

CellSpectrum solve_cell(const BlochMatrix& a);

/// First n_max bands of a, normalized and gauge-fixed.
std::vector<BlochEigenpair> solve_bands(const BlochMatrix& a, int n_max);

/// Shorthand for assemble + full solve.
CellSpectrum solve_cell(const PlaneWaveBasis& basis, const FourierPotential& potential, const Eigen::VectorXd& k);

/// Rotates v so that its largest-modulus entry is real positive.
void fix_gauge(Eigen::Ref<Eigen::VectorXcd> v);

/// (-i grad_y + k)_j applied in coefficient space.
Eigen::VectorXcd apply_momentum(const PlaneWaveBasis& basis, const Eigen::VectorXd& k, int axis,
                                const Eigen::VectorXcd& c);

/// grad_k E_n = <chi, (-i grad_y + k) chi>.
Eigen::VectorXd grad_E(const BlochEigenpair& pair, const PlaneWaveBasis& basis);

/// d chi_n / d k_j in the gauge <chi_n, d chi_n> = 0, via the reduced resolvent.
std::vector<Eigen::VectorXcd> dk_chi(const CellSpectrum& spectrum, int band, const PlaneWaveBasis& basis);

/// Hessian of E_n from first-order perturbation data; symmetrized after an asymmetry check.
Eigen::MatrixXd hessian_E(const BlochEigenpair& pair, const Eigen::VectorXd& gradient,
                          const std::vector<Eigen::VectorXcd>& dk, const PlaneWaveBasis& basis);

/**
 * Values of sum_m c_m exp(2 pi i m . s) at the fractional grid s = j / points
 * (row-major over axes). Exact for any `points`: aliased modes are summed.
 */
std::vector<cplx> cell_samples(const PlaneWaveBasis& basis, const Eigen::VectorXcd& coeffs, std::size_t points);

/// Gradient, Hessian and d chi for one simple band.
BandDerivatives band_derivatives(const CellSpectrum& spectrum, int band, const PlaneWaveBasis& basis);

}  // namespace effmass
