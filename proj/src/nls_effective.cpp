#include "effmass/nls_effective.hpp"

#include "effmass/errors.hpp"

namespace effmass {

SplitProblem effective_problem(const EffectiveModel& model, const Grid& grid, const std::vector<double>& u_samples) {
  if (model.dim() != grid.dim) throw DimensionMismatch("model and grid dimensions differ");
  if (u_samples.size() != grid.size()) throw DimensionMismatch("potential samples do not match the grid");
  if ((model.mass - model.mass.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error("effective mass tensor is not symmetric");
  }
  SplitProblem p;
  p.grid = grid;
  p.linear.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) p.linear[i] = u_samples[i] / model.h;
  p.coupling = model.kappa_eff / model.h;
  p.sigma = model.sigma;
  p.symbol = quadratic_symbol(grid, model.mass, 0.5 * model.h);
  return p;
}

WaveField strang_step_effective(const WaveField& f, const EffectiveModel& model, const std::vector<double>& u_samples,
                                double dt) {
  SplitStepper stepper(effective_problem(model, f.grid, u_samples), SplitScheme::Strang, dt);
  WaveField out = f;
  stepper.advance(out, 1);
  return out;
}

Trajectory evolve_effective(const WaveField& f0, const EffectiveModel& model, const std::vector<double>& u_samples,
                            const EvolutionOptions& options, bool allow_non_elliptic,
                            const SnapshotObserver& observer) {
  if (!model.elliptic && !allow_non_elliptic) {
    throw Error("effective mass tensor is not elliptic; pass allow_non_elliptic to run anyway");
  }
  return evolve_split(effective_problem(model, f0.grid, u_samples), f0, options, observer);
}

}  // namespace effmass
