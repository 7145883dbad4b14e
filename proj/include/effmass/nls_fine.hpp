#pragma once

#include "effmass/lattice.hpp"
#include "effmass/splitting.hpp"

#include <json.hpp>

namespace effmass {

struct ScaleParams {
  double eps = 0.125;
  double h = 1.0;
  double kappa = 1.0;
  int sigma = 1;
};

/// Throws unless X / eps is an integer and the grid has >= 16 points per lattice cell.
void validate_fine_grid(const Grid& grid, double eps);

/// Smallest power-of-two grid with at least `points_per_cell` points per cell.
Grid make_fine_grid(int dim, double box, double eps, int points_per_cell = 16);

/**
 * Static external potential U with a smooth plateau cutoff: U is untouched for
 * |x_a| <= window on every axis and fades out (C-infinity) before the box edge.
 */
struct ExternalPotential {
  enum class Kind { Zero, Harmonic, Linear };
  Kind kind = Kind::Zero;
  double frequency = 0.0;  // harmonic: U = frequency^2 |x|^2 / 2
  Eigen::VectorXd field;   // linear: U = field . x
  double window = 0.0;     // plateau half-width; 0 selects 0.6 * X / 2

  static ExternalPotential zero() { return {}; }
  static ExternalPotential harmonic(double frequency, double window = 0.0);
  static ExternalPotential linear(Eigen::VectorXd field, double window = 0.0);

  bool is_zero() const noexcept { return kind == Kind::Zero; }
  std::vector<double> sample(const Grid& grid) const;
};

ExternalPotential external_from_json(const nlohmann::json& j);
nlohmann::json external_to_json(const ExternalPotential& u);

/// V(x / eps) at every grid point by exact Fourier summation.
std::vector<double> sample_lattice_potential(const FourierPotential& potential, const Grid& grid, double eps);

/// Diagonal rate (h / eps^2) V(x / eps) + U / h, coupling kappa / h, symbol (h / 2)|xi|^2.
SplitProblem fine_problem(const ScaleParams& params, const Grid& grid, const std::vector<double>& v_samples,
                          const std::vector<double>& u_samples);

/// One Strang step of i h psi_t = -(h^2/2) Lap psi + (h^2/eps^2) V psi + U psi + kappa |psi|^(2 sigma) psi.
WaveField strang_step_fine(const WaveField& psi, const ScaleParams& params, const std::vector<double>& v_samples,
                           const std::vector<double>& u_samples, double dt);

Trajectory evolve_fine(const WaveField& psi0, const ScaleParams& params, const std::vector<double>& v_samples,
                       const std::vector<double>& u_samples, const EvolutionOptions& options,
                       const SnapshotObserver& observer = {});

}  // namespace effmass
