#pragma once

#include "effmass/cell_spectral.hpp"
#include "effmass/effective_model.hpp"
#include "effmass/wave_field.hpp"

#include <vector>

namespace effmass {

/**
 * Partial inverse of H(k0) - E_n: returns u with (H - E_n) u = Q_n rhs and
 * <chi_n, u> = 0, using the full eigendecomposition in `spectrum`.
 * Throws DegenerateBand if any other level lies within 1e-8 of E_n.
 */
Eigen::VectorXcd fredholm_solve(const Eigen::VectorXcd& rhs, int band, const CellSpectrum& spectrum);

/// Plane-wave coefficients of |chi|^(2 sigma) chi, truncated to the basis.
Eigen::VectorXcd nonlinear_cell_coefficients(const PlaneWaveBasis& basis, const Eigen::VectorXcd& chi, int sigma);

/// Epsilon-independent cell functions entering u_0, u_1 and the orthogonal part of u_2.
struct CorrectorCells {
  int band = 1;
  Eigen::VectorXd k0;
  Eigen::VectorXcd chi;
  /// d chi / d k_j.
  std::vector<Eigen::VectorXcd> first;
  /// Entry j * d + l: R[(P_j - omega_j) d_l chi].
  std::vector<Eigen::VectorXcd> second;
  /// R[|chi|^(2 sigma) chi].
  Eigen::VectorXcd nonlinear;
  int sigma = 1;
  double kappa = 0.0;
  double h = 1.0;
};

CorrectorCells build_corrector_cells(const CellSpectrum& spectrum, const BandDerivatives& derivs,
                                     const PlaneWaveBasis& basis, const EffectiveModel& model);

/// eps^power * envelope(x) * cell(x / eps).
struct CorrectorTerm {
  int power = 0;
  WaveField envelope;
  Eigen::VectorXcd cell;
};

struct CorrectorSet {
  int order = 0;
  std::vector<CorrectorTerm> terms;
};

/// u_1 = -i grad f0 . grad_k chi (polarized part f_1 = 0).
std::vector<CorrectorTerm> build_corrector_u1(const WaveField& f0, const std::vector<Eigen::VectorXcd>& dk);

/// Terms of u_0, ..., u_order for the envelope f0; order in {0, 1, 2}.
CorrectorSet build_correctors(const WaveField& f0, const CorrectorCells& cells, int order);

/// Values of a cell function at y = x / eps on a fine grid (unit hypercubic lattice only).
std::vector<cplx> cell_on_fine_grid(const PlaneWaveBasis& basis, const Eigen::VectorXcd& cell, const Grid& fine,
                                    double eps);

/**
 * Phase and frame for two-scale assembly. The envelope is evaluated at
 * x - shift on the torus; each point picks up exp(i k0 . n X / eps) for the
 * periodic image n it came from, and the whole field exp(i phase).
 */
struct Frame {
  Eigen::VectorXd shift;
  double phase = 0.0;
};

/// sum_terms eps^p env(x - shift) cell(x/eps) exp(i k0.x/eps), with the frame phases.
WaveField assemble_two_scale(const CorrectorSet& set, const PlaneWaveBasis& basis, const Grid& fine, double eps,
                             const Eigen::VectorXd& k0, const Frame& frame);

/// Unnormalized well-prepared data of order K.
WaveField build_initial_profile(const WaveField& f_initial, const CorrectorCells& cells, const PlaneWaveBasis& basis,
                                int order, const Grid& fine, double eps);

/// build_initial_profile rescaled to unit discrete mass.
WaveField build_initial_data(const WaveField& f_initial, const CorrectorCells& cells, const PlaneWaveBasis& basis,
                             int order, const Grid& fine, double eps);

}  // namespace effmass
