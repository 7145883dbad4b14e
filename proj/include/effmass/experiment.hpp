#pragma once

#include "effmass/asymptotics.hpp"
#include "effmass/cell_spectral.hpp"
#include "effmass/correctors.hpp"
#include "effmass/effective_model.hpp"
#include "effmass/nls_fine.hpp"
#include "effmass/splitting.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace effmass {

/// Time-step selection for the fine solver.
enum class DtRule {
  Cell,     // dt = cell_step * eps^2 for each eps
  Uniform,  // dt = min(1e-3 eps_min^2, 1e-4) for every eps
  Fixed     // dt as given
};

struct TimeSpec {
  double t_final = 0.5;
  int snapshots = 10;
  SplitScheme scheme = SplitScheme::BlanesMoan4;
  DtRule rule = DtRule::Cell;
  double cell_step = 0.02;
  double dt = 1e-4;
  SplitScheme effective_scheme = SplitScheme::BlanesMoan4;
  double effective_dt = 1e-4;
};

struct EnvelopeSpec {
  std::string type = "gaussian";  // or "file"
  double width = 0.5;
  Eigen::VectorXd center;
  std::string path;
};

struct ExperimentConfig {
  nlohmann::json lattice = {{"dimension", 1}};
  nlohmann::json potential = {{"type", "cosine"}, {"amplitude", 1.0}};
  int band = 1;
  Eigen::VectorXd k0 = Eigen::VectorXd::Zero(1);
  int sigma = 1;
  double kappa = 1.0;
  double h = 1.0;
  int cutoff = 16;
  EnvelopeSpec envelope;
  ExternalPotential external;
  std::vector<double> eps{0.125, 0.0625, 0.03125, 0.015625};
  int K = 2;
  int N = 0;
  double box = 16.0;
  int points_per_cell = 16;
  std::size_t envelope_points = 256;
  TimeSpec time;
  std::vector<int> ys_orders{1};
  bool unframed = false;
  bool allow_non_elliptic = false;
  double blowup_factor = 1e3;
  int threads = 1;
  unsigned seed = 0;
  std::string output;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  int dim() const { return static_cast<int>(k0.size()); }
  /// Throws ConfigError / CommensurabilityError / ResolutionError.
  void validate() const;
  /// Checks that do not depend on an individual eps.
  void validate_structure() const;
  /// Range, commensurability and resolution checks for one eps.
  void validate_eps(double e) const;
  /// FNV-1a of the canonical JSON dump.
  std::string hash() const;
  double fine_dt(double eps) const;
};

ExperimentConfig load_config(const std::filesystem::path& path);

/// Sets a dotted key ("time.t_final") from "key=value"; the value is parsed as JSON when possible.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// Everything that does not depend on eps.
struct BandContext {
  LatticeSpec lattice;
  FourierPotential potential;
  PlaneWaveBasis basis;
  CellSpectrum spectrum;
  BandDerivatives derivatives;
  EffectiveModel model;
  CorrectorCells cells;
};

BandContext build_band_context(const ExperimentConfig& config);

/// Initial envelope f_I on the envelope grid.
WaveField initial_envelope(const ExperimentConfig& config);

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares of log(error) against log(eps); needs >= 3 pairs with positive errors.
OrderFit estimate_order(const std::vector<std::pair<double, double>>& pairs);

struct ConvergenceRow {
  double eps = 0.0;
  bool ok = false;
  std::string message;
  std::size_t grid_n = 0;
  double dt = 0.0;
  long steps = 0;
  ErrorReport report;
  double unframed_sup_l2 = -1.0;  // < 0 when not measured
  double max_mass_error = 0.0;
  double boundary_amplitude = 0.0;
  double runtime_s = 0.0;
  std::vector<MassRecord> mass_log;
};

struct ConvergenceReport {
  std::string config_hash;
  EffectiveModel model;
  std::vector<ConvergenceRow> rows;
  std::optional<OrderFit> fit;
  bool floor = false;  // every error below 1e-8: no slope is fitted
  double effective_mass_error = 0.0;
  std::vector<MassRecord> effective_mass_log;
  double effective_runtime_s = 0.0;
};

ConvergenceReport run_convergence(const ExperimentConfig& config, std::ostream* log = nullptr);

struct PreparationRow {
  double eps = 0.0;
  double initial_l2 = 0.0;
  double sup_l2 = 0.0;
  double sup_y1 = 0.0;
  double max_mass_error = 0.0;
};

struct PreparationReport {
  int k_low = 0;
  int k_high = 2;
  std::vector<PreparationRow> rows;
  /// Exponent of the L2 / Y1 distance in eps (two-point slope or least squares).
  std::optional<double> exponent_l2;
  std::optional<double> exponent_y1;
};

PreparationReport compare_preparation(const ExperimentConfig& config, int k_low, int k_high,
                                      std::ostream* log = nullptr);

/// Slope of log(value) against log(eps) through all points (two points allowed).
double fitted_exponent(const std::vector<std::pair<double, double>>& pairs);

nlohmann::json convergence_to_json(const ConvergenceReport& report);
nlohmann::json preparation_to_json(const PreparationReport& report);

/// config.json, stamp.txt, convergence.csv, errors.csv, summary.json, convergence.svg and mass logs.
void write_convergence_run(const std::filesystem::path& dir, const ExperimentConfig& config,
                           const ConvergenceReport& report);
void write_preparation_run(const std::filesystem::path& dir, const ExperimentConfig& config,
                           const PreparationReport& report);

/// Log-log error plot with the fitted line.
std::string convergence_svg(const ConvergenceReport& report);

/// Version string of the source tree at build time.
std::string build_stamp();

}  // namespace effmass
