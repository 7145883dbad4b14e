#pragma once

#include "effmass/cell_spectral.hpp"

#include <json.hpp>

namespace effmass {

/// Homogenized constants of the effective-mass NLS for one band at k0.
struct EffectiveModel {
  int band = 1;
  Eigen::VectorXd k0;
  double energy = 0.0;     // E_n(k0)
  double beta = 0.0;       // -h E_n(k0)
  Eigen::VectorXd omega;   // group velocity grad E_n(k0)
  Eigen::MatrixXd mass;    // M* = Hessian of E_n at k0
  double kappa = 1.0;      // fine-scale coupling
  double kappa_eff = 1.0;  // kappa * int |chi|^(2 sigma + 2)
  int sigma = 1;
  double h = 1.0;
  bool elliptic = false;
  double ellipticity = 0.0;  // smallest eigenvalue of M*

  int dim() const noexcept { return static_cast<int>(k0.size()); }
};

struct EllipticityCheck {
  bool elliptic = false;
  double smallest = 0.0;
};

EllipticityCheck check_ellipticity(const Eigen::MatrixXd& mass);

/// Mean of |chi|^(2 sigma + 2) over the unit cell with `points` nodes per axis.
double cell_moment(const BlochEigenpair& pair, const PlaneWaveBasis& basis, int sigma, int points);

/// Smallest quadrature size for which the trapezoid rule is exact on |chi|^(2 sigma + 2).
int default_quadrature_points(const PlaneWaveBasis& basis, int sigma);

EffectiveModel build_effective_model(const BlochEigenpair& pair, const BandDerivatives& derivs,
                                     const PlaneWaveBasis& basis, double kappa, int sigma, double h,
                                     int quadrature_points = 0);

nlohmann::json model_to_json(const EffectiveModel& model);
EffectiveModel model_from_json(const nlohmann::json& j);

}  // namespace effmass
