#pragma once

#include "effmass/effective_model.hpp"
#include "effmass/splitting.hpp"

namespace effmass {

/// Diagonal rate U / h, coupling kappa* / h, symbol (h / 2) xi^T M* xi.
SplitProblem effective_problem(const EffectiveModel& model, const Grid& grid, const std::vector<double>& u_samples);

/// One Strang step of i h f_t = -(h^2/2) div(M* grad f) + U f + kappa* |f|^(2 sigma) f.
WaveField strang_step_effective(const WaveField& f, const EffectiveModel& model, const std::vector<double>& u_samples,
                                double dt);

/// Non-elliptic M* is rejected unless allow_non_elliptic is set.
Trajectory evolve_effective(const WaveField& f0, const EffectiveModel& model, const std::vector<double>& u_samples,
                            const EvolutionOptions& options, bool allow_non_elliptic = false,
                            const SnapshotObserver& observer = {});

}  // namespace effmass
