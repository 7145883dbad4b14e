#pragma once

#include "effmass/fft.hpp"
#include "effmass/wave_field.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace effmass {

enum class SplitScheme { Strang, BlanesMoan4 };

SplitScheme parse_scheme(const std::string& name);
std::string scheme_name(SplitScheme scheme);
int scheme_order(SplitScheme scheme);

/// Palindromic diagonal-kinetic-diagonal coefficients: diag.size() == kin.size() + 1.
struct SplitCoefficients {
  std::vector<double> diag;
  std::vector<double> kin;
};

SplitCoefficients split_coefficients(SplitScheme scheme);

/**
 * psi_t = -i [ K(xi) + L(x) + g |psi|^(2 sigma) ] psi on a periodic grid.
 * `linear` holds L at each grid point, `symbol` holds K at each FFT index.
 */
struct SplitProblem {
  Grid grid;
  std::vector<double> linear;
  double coupling = 0.0;
  int sigma = 1;
  std::vector<double> symbol;
};

/// Fixed-step splitting integrator. Both sub-flows are exact and unitary.
class SplitStepper {
 public:
  SplitStepper(SplitProblem problem, SplitScheme scheme, double dt);

  double dt() const noexcept { return dt_; }
  SplitScheme scheme() const noexcept { return scheme_; }

  /// Advances `steps` steps in place; returns the largest |psi|^2 met in any diagonal substep.
  double advance(WaveField& psi, long steps);

 private:
  const std::vector<cplx>& linear_phase(double weight);
  const std::vector<cplx>& kinetic_phase(double weight);
  double diagonal(double weight);
  void kinetic(double weight);

  SplitProblem problem_;
  SplitScheme scheme_;
  SplitCoefficients coeffs_;
  double dt_;
  FftPlan plan_;
  std::vector<std::pair<double, std::vector<cplx>>> linear_cache_;
  std::vector<std::pair<double, std::vector<cplx>>> kinetic_cache_;
};

/// Step layout of one run: `snapshots` equal intervals, each an integer number of steps.
struct TimeGrid {
  double t_final = 0.0;
  int snapshots = 1;
  long steps_per_snapshot = 1;
  double dt = 0.0;

  double time(int k) const noexcept { return t_final * static_cast<double>(k) / snapshots; }
};

/// Largest step <= dt_max that tiles every snapshot interval exactly.
TimeGrid plan_time(double t_final, double dt_max, int snapshots);

struct EvolutionOptions {
  double t_final = 0.5;
  double dt = 1e-4;  // upper bound; see plan_time
  int snapshots = 10;
  SplitScheme scheme = SplitScheme::Strang;
  /// Sup-norm growth factor over the initial state that counts as blow-up.
  double blowup_factor = 1e3;
  /// Keep every snapshot in the returned trajectory.
  bool store_states = true;
};

struct MassRecord {
  double t = 0.0;
  double error = 0.0;  // | ||psi(t)|| - ||psi(0)|| | / ||psi(0)||
};

struct Trajectory {
  TimeGrid time;
  std::vector<double> times;
  std::vector<WaveField> states;
  std::vector<MassRecord> mass_log;
  double max_mass_error = 0.0;
  WaveField final_state;
};

/// Called at t = 0 and after every snapshot interval.
using SnapshotObserver = std::function<void(int index, double t, const WaveField& state)>;

/// Runs a split-step evolution with snapshots, mass log and blow-up guard.
Trajectory evolve_split(SplitProblem problem, const WaveField& initial, const EvolutionOptions& options,
                        const SnapshotObserver& observer = {});

/// CSV with header "t,mass_error".
void write_mass_log(const std::filesystem::path& path, const std::vector<MassRecord>& log);

/// |xi|^2 (scaled by `factor`) at every FFT index of `grid`.
std::vector<double> laplacian_symbol(const Grid& grid, double factor);

/// factor * xi^T M xi at every FFT index of `grid`.
std::vector<double> quadratic_symbol(const Grid& grid, const Eigen::MatrixXd& m, double factor);

}  // namespace effmass
