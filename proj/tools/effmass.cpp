#include "effmass/errors.hpp"
#include "effmass/experiment.hpp"
#include "effmass/nls_effective.hpp"
#include "effmass/potential_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>

using namespace effmass;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string output;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config, "experiment config (JSON)");
  cmd->add_option("--set", args.overrides, "override a config key, e.g. --set time.t_final=0.2");
  cmd->add_option("-o,--output", args.output, "output path");
}

ExperimentConfig resolve(const CommonArgs& args) {
  json j = json::object();
  if (!args.config.empty()) {
    std::ifstream is(args.config);
    if (!is) throw ConfigError("cannot open config " + args.config);
    try {
      j = json::parse(is);
    } catch (const json::exception& e) {
      throw ConfigError("config " + args.config + " is not valid JSON: " + e.what());
    }
  }
  for (const auto& o : args.overrides) apply_override(j, o);
  ExperimentConfig c = ExperimentConfig::from_json(j);
  if (!args.output.empty()) c.output = args.output;
  return c;
}

std::filesystem::path output_dir(const ExperimentConfig& c, const std::string& fallback) {
  return c.output.empty() ? std::filesystem::path("runs") / (fallback + "-" + c.hash().substr(0, 8))
                          : std::filesystem::path(c.output);
}

int cmd_bands(const CommonArgs& args, int points, int bands) {
  const ExperimentConfig c = resolve(args);
  const LatticeSpec lattice = lattice_from_json(c.lattice);
  const FourierPotential v = potential_from_json(lattice, c.potential);
  const PlaneWaveBasis basis(lattice, c.cutoff);
  // 1D: the zone [-b/2, b/2]; 2D: Gamma -> X -> M -> Gamma in reduced coordinates.
  std::vector<Eigen::VectorXd> path;
  const int d = lattice.dim();
  for (int i = 0; i < points; ++i) {
    const double s = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    Eigen::VectorXd red(d);
    if (d == 1) {
      red[0] = s - 0.5;
    } else {
      const double u = 3.0 * s;
      if (u <= 1.0) red << 0.5 * u, 0.0;
      else if (u <= 2.0) red << 0.5, 0.5 * (u - 1.0);
      else red << 0.5 * (3.0 - u), 0.5 * (3.0 - u);
    }
    path.push_back(lattice.reciprocal() * red);
  }
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!args.output.empty()) {
    file.open(args.output);
    if (!file) throw Error("cannot open " + args.output);
    os = &file;
  }
  *os << std::setprecision(15) << "index";
  for (int a = 0; a < d; ++a) *os << ",k" << a + 1;
  for (int n = 1; n <= bands; ++n) *os << ",E" << n;
  *os << '\n';
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto pairs = solve_bands(assemble_bloch_matrix(basis, v, path[i]), bands);
    *os << i;
    for (int a = 0; a < d; ++a) *os << ',' << path[i][a];
    for (const auto& p : pairs) *os << ',' << p.energy;
    *os << '\n';
  }
  return 0;
}

int cmd_model(const CommonArgs& args) {
  const ExperimentConfig c = resolve(args);
  const BandContext ctx = build_band_context(c);
  const std::string text = model_to_json(ctx.model).dump(2);
  if (args.output.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream os(args.output);
    if (!os) throw Error("cannot open " + args.output);
    os << text << '\n';
  }
  if (!ctx.model.elliptic) std::cerr << "warning: effective mass tensor is not elliptic\n";
  return 0;
}

int cmd_evolve(const CommonArgs& args, const std::string& solver, double eps) {
  ExperimentConfig c = resolve(args);
  if (solver == "fine" && eps > 0.0) c.eps = {eps};
  c.validate();
  const BandContext ctx = build_band_context(c);
  const WaveField envelope = initial_envelope(c);
  const auto dir = output_dir(c, "evolve");
  std::filesystem::create_directories(dir);
  EvolutionOptions opt;
  opt.t_final = c.time.t_final;
  opt.snapshots = c.time.snapshots;
  opt.blowup_factor = c.blowup_factor;
  opt.store_states = false;
  const auto save = [&](int k, double, const WaveField& f) {
    std::ostringstream name;
    name << "snapshot_" << std::setw(4) << std::setfill('0') << k << ".bin";
    write_wave_field(dir / name.str(), f);
  };
  Trajectory traj;
  if (solver == "effective") {
    opt.dt = c.time.effective_dt;
    opt.scheme = c.time.effective_scheme;
    traj = evolve_effective(envelope, ctx.model, c.external.sample(envelope.grid), opt, c.allow_non_elliptic, save);
  } else if (solver == "fine") {
    const double e = c.eps.front();
    const Grid fine = make_fine_grid(c.dim(), c.box, e, c.points_per_cell);
    const WaveField psi0 = build_initial_data(envelope, ctx.cells, ctx.basis, c.K, fine, e);
    opt.dt = c.fine_dt(e);
    opt.scheme = c.time.scheme;
    traj = evolve_fine(psi0, {e, c.h, c.kappa, c.sigma}, sample_lattice_potential(ctx.potential, fine, e),
                       c.external.sample(fine), opt, save);
  } else {
    throw ConfigError("solver must be fine or effective");
  }
  write_mass_log(dir / "mass.csv", traj.mass_log);
  std::ofstream(dir / "config.json") << c.to_json().dump(2) << '\n';
  std::ofstream(dir / "stamp.txt") << build_stamp() << '\n';
  std::cout << "wrote " << traj.times.size() << " snapshots to " << dir.string() << " (max mass error "
            << traj.max_mass_error << ")\n";
  return 0;
}

int cmd_converge(const CommonArgs& args) {
  const ExperimentConfig c = resolve(args);
  const ConvergenceReport rep = run_convergence(c, &std::cerr);
  const auto dir = output_dir(c, "converge");
  write_convergence_run(dir, c, rep);
  std::cout << std::setprecision(6);
  for (const auto& r : rep.rows) {
    std::cout << "eps=" << r.eps << "  ";
    if (r.ok) std::cout << "sup L2 error " << r.report.sup_l2;
    else std::cout << "failed: " << r.message;
    std::cout << '\n';
  }
  if (rep.floor) std::cout << "slope: floor (all errors below 1e-8)\n";
  else if (rep.fit) std::cout << "slope " << rep.fit->slope << "  R2 " << rep.fit->r2 << '\n';
  std::cout << "results in " << dir.string() << '\n';
  return 0;
}

int cmd_prepare(const CommonArgs& args, int k_low, int k_high) {
  const ExperimentConfig c = resolve(args);
  const PreparationReport rep = compare_preparation(c, k_low, k_high, &std::cerr);
  const auto dir = output_dir(c, "prepare");
  write_preparation_run(dir, c, rep);
  if (rep.exponent_l2) std::cout << "L2 distance exponent " << *rep.exponent_l2 << '\n';
  if (rep.exponent_y1) std::cout << "Y1 distance exponent " << *rep.exponent_y1 << '\n';
  std::cout << "results in " << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bloch bands, effective-mass models and homogenized NLS experiments"};
  app.require_subcommand(1);

  CommonArgs bands_args, model_args, evolve_args, converge_args, prepare_args;
  int points = 101, nbands = 5;
  auto* bands = app.add_subcommand("bands", "band energies along the Brillouin zone as CSV");
  add_common(bands, bands_args);
  bands->add_option("--points", points, "number of k-points")->check(CLI::PositiveNumber);
  bands->add_option("--bands", nbands, "number of bands")->check(CLI::PositiveNumber);

  auto* model = app.add_subcommand("model", "effective model constants as JSON");
  add_common(model, model_args);

  std::string solver = "fine";
  double eps = 0.0;
  auto* evolve = app.add_subcommand("evolve", "single fine or effective trajectory");
  add_common(evolve, evolve_args);
  evolve->add_option("--solver", solver, "fine or effective")->check(CLI::IsMember({"fine", "effective"}));
  evolve->add_option("--eps", eps, "eps for the fine solver (default: first of the config list)");

  auto* converge = app.add_subcommand("converge", "eps sweep against the asymptotic solution");
  add_common(converge, converge_args);

  int k_low = 0, k_high = 2;
  auto* prepare = app.add_subcommand("prepare-compare", "distance between differently prepared solutions");
  add_common(prepare, prepare_args);
  prepare->add_option("--k-low", k_low, "lower preparation order")->check(CLI::Range(0, 2));
  prepare->add_option("--k-high", k_high, "higher preparation order")->check(CLI::Range(0, 2));

  CLI11_PARSE(app, argc, argv);
  try {
    if (*bands) return cmd_bands(bands_args, points, nbands);
    if (*model) return cmd_model(model_args);
    if (*evolve) return cmd_evolve(evolve_args, solver, eps);
    if (*converge) return cmd_converge(converge_args);
    if (*prepare) return cmd_prepare(prepare_args, k_low, k_high);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
