#include "effmass/nls_fine.hpp"

#include "effmass/cell_spectral.hpp"
#include "effmass/correctors.hpp"
#include "effmass/errors.hpp"

#include <cmath>

namespace effmass {

void validate_fine_grid(const Grid& grid, double eps) {
  const long cells = cells_per_box(grid.box, eps);
  if (!is_power_of_two(grid.n)) throw ResolutionError("grid size must be a power of two");
  if (static_cast<long>(grid.n) < 16 * cells) {
    throw ResolutionError("fine grid resolves fewer than 16 points per lattice cell");
  }
}

Grid make_fine_grid(int dim, double box, double eps, int points_per_cell) {
  if (points_per_cell < 16) throw ResolutionError("at least 16 points per lattice cell are required");
  const long cells = cells_per_box(box, eps);
  std::size_t n = 1;
  while (n < static_cast<std::size_t>(cells) * static_cast<std::size_t>(points_per_cell)) n *= 2;
  return {dim, n, box};
}

ExternalPotential ExternalPotential::harmonic(double frequency, double window) {
  ExternalPotential u;
  u.kind = Kind::Harmonic;
  u.frequency = frequency;
  u.window = window;
  return u;
}

ExternalPotential ExternalPotential::linear(Eigen::VectorXd field, double window) {
  ExternalPotential u;
  u.kind = Kind::Linear;
  u.field = std::move(field);
  u.window = window;
  return u;
}

namespace {
// 0 for t <= 0, 1 for t >= 1, C-infinity in between.
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}
}  // namespace

std::vector<double> ExternalPotential::sample(const Grid& grid) const {
  std::vector<double> u(grid.size(), 0.0);
  if (kind == Kind::Zero) return u;
  const double half = 0.5 * grid.box;
  const double w = window > 0.0 ? window : 0.6 * half;
  if (w >= half) throw ConfigError("external potential window must lie inside the box");
  // Fade out over 90% of the margin so the periodic continuation stays smooth.
  const double fade = 0.9 * (half - w);
  if (kind == Kind::Linear && field.size() != grid.dim) throw DimensionMismatch("field has wrong dimension");
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Eigen::VectorXd x = grid.point(p);
    double cut = 1.0;
    for (int a = 0; a < grid.dim; ++a) cut *= 1.0 - smooth_step((std::abs(x[a]) - w) / fade);
    const double raw = kind == Kind::Harmonic ? 0.5 * frequency * frequency * x.squaredNorm() : field.dot(x);
    u[p] = cut * raw;
  }
  return u;
}

ExternalPotential external_from_json(const nlohmann::json& j) {
  const std::string type = j.value("type", "zero");
  const double window = j.value("window", 0.0);
  if (type == "zero") return ExternalPotential::zero();
  if (type == "harmonic") return ExternalPotential::harmonic(j.at("frequency").get<double>(), window);
  if (type == "linear") {
    const auto f = j.at("field").get<std::vector<double>>();
    return ExternalPotential::linear(Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size())),
                                     window);
  }
  throw ConfigError("unknown external potential type '" + type + "'");
}

nlohmann::json external_to_json(const ExternalPotential& u) {
  switch (u.kind) {
    case ExternalPotential::Kind::Zero:
      return {{"type", "zero"}};
    case ExternalPotential::Kind::Harmonic:
      return {{"type", "harmonic"}, {"frequency", u.frequency}, {"window", u.window}};
    case ExternalPotential::Kind::Linear:
      return {{"type", "linear"},
              {"field", std::vector<double>(u.field.data(), u.field.data() + u.field.size())},
              {"window", u.window}};
  }
  return {};
}

std::vector<double> sample_lattice_potential(const FourierPotential& potential, const Grid& grid, double eps) {
  const PlaneWaveBasis basis(potential.lattice(), std::max(1, potential.support_radius()));
  Eigen::VectorXcd c(basis.size());
  for (Eigen::Index i = 0; i < basis.size(); ++i) c[i] = potential.coefficient(basis.indices()[static_cast<std::size_t>(i)]);
  const auto vals = cell_on_fine_grid(basis, c, grid, eps);
  std::vector<double> v(vals.size());
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = vals[p].real();
  return v;
}

SplitProblem fine_problem(const ScaleParams& params, const Grid& grid, const std::vector<double>& v_samples,
                          const std::vector<double>& u_samples) {
  if (!(params.eps > 0.0) || !(params.h > 0.0)) throw Error("eps and h must be positive");
  if (v_samples.size() != grid.size() || u_samples.size() != grid.size()) {
    throw DimensionMismatch("potential samples do not match the grid");
  }
  validate_fine_grid(grid, params.eps);
  SplitProblem p;
  p.grid = grid;
  p.linear.resize(grid.size());
  const double sv = params.h / (params.eps * params.eps);
  for (std::size_t i = 0; i < grid.size(); ++i) p.linear[i] = sv * v_samples[i] + u_samples[i] / params.h;
  p.coupling = params.kappa / params.h;
  p.sigma = params.sigma;
  p.symbol = laplacian_symbol(grid, 0.5 * params.h);
  return p;
}

WaveField strang_step_fine(const WaveField& psi, const ScaleParams& params, const std::vector<double>& v_samples,
                           const std::vector<double>& u_samples, double dt) {
  SplitStepper stepper(fine_problem(params, psi.grid, v_samples, u_samples), SplitScheme::Strang, dt);
  WaveField out = psi;
  stepper.advance(out, 1);
  return out;
}

Trajectory evolve_fine(const WaveField& psi0, const ScaleParams& params, const std::vector<double>& v_samples,
                       const std::vector<double>& u_samples, const EvolutionOptions& options,
                       const SnapshotObserver& observer) {
  return evolve_split(fine_problem(params, psi0.grid, v_samples, u_samples), psi0, options, observer);
}

}  // namespace effmass
