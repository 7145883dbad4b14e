#include "effmass/experiment.hpp"

#include "effmass/errors.hpp"
#include "effmass/nls_effective.hpp"
#include "effmass/potential_io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

namespace effmass {

using nlohmann::json;

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

DtRule parse_rule(const std::string& s) {
  if (s == "cell") return DtRule::Cell;
  if (s == "uniform") return DtRule::Uniform;
  if (s == "fixed") return DtRule::Fixed;
  throw ConfigError("unknown dt rule '" + s + "' (expected cell, uniform or fixed)");
}

std::string rule_name(DtRule r) {
  switch (r) {
    case DtRule::Cell:
      return "cell";
    case DtRule::Uniform:
      return "uniform";
    case DtRule::Fixed:
      return "fixed";
  }
  return "cell";
}

double elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("lattice")) c.lattice = j.at("lattice");
    if (j.contains("potential")) c.potential = j.at("potential");
    c.band = j.value("band", c.band);
    if (j.contains("k0")) c.k0 = to_vector(j.at("k0").get<std::vector<double>>());
    else c.k0 = Eigen::VectorXd::Zero(lattice_from_json(c.lattice).dim());
    c.sigma = j.value("sigma", c.sigma);
    c.kappa = j.value("kappa", c.kappa);
    c.h = j.value("h", c.h);
    c.cutoff = j.value("cutoff", c.cutoff);
    if (j.contains("envelope")) {
      const auto& e = j.at("envelope");
      c.envelope.type = e.value("type", c.envelope.type);
      c.envelope.width = e.value("width", c.envelope.width);
      c.envelope.path = e.value("path", std::string{});
      if (e.contains("center")) c.envelope.center = to_vector(e.at("center").get<std::vector<double>>());
    }
    if (c.envelope.center.size() == 0) c.envelope.center = Eigen::VectorXd::Zero(c.k0.size());
    if (j.contains("external")) c.external = external_from_json(j.at("external"));
    if (j.contains("eps")) c.eps = j.at("eps").get<std::vector<double>>();
    c.K = j.value("K", c.K);
    c.N = j.value("N", c.N);
    c.box = j.value("box", c.box);
    c.points_per_cell = j.value("points_per_cell", c.points_per_cell);
    c.envelope_points = j.value("envelope_points", c.envelope_points);
    if (j.contains("time")) {
      const auto& t = j.at("time");
      c.time.t_final = t.value("t_final", c.time.t_final);
      c.time.snapshots = t.value("snapshots", c.time.snapshots);
      if (t.contains("scheme")) c.time.scheme = parse_scheme(t.at("scheme").get<std::string>());
      if (t.contains("rule")) c.time.rule = parse_rule(t.at("rule").get<std::string>());
      c.time.cell_step = t.value("cell_step", c.time.cell_step);
      c.time.dt = t.value("dt", c.time.dt);
      if (t.contains("effective_scheme")) c.time.effective_scheme = parse_scheme(t.at("effective_scheme").get<std::string>());
      c.time.effective_dt = t.value("effective_dt", c.time.effective_dt);
    }
    if (j.contains("ys_orders")) c.ys_orders = j.at("ys_orders").get<std::vector<int>>();
    c.unframed = j.value("unframed", c.unframed);
    c.allow_non_elliptic = j.value("allow_non_elliptic", c.allow_non_elliptic);
    c.blowup_factor = j.value("blowup_factor", c.blowup_factor);
    c.threads = j.value("threads", c.threads);
    c.seed = j.value("seed", c.seed);
    c.output = j.value("output", c.output);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json envelope_json = {{"type", envelope.type}, {"width", envelope.width}, {"center", to_std(envelope.center)}};
  if (!envelope.path.empty()) envelope_json["path"] = envelope.path;
  return {{"lattice", lattice},
          {"potential", potential},
          {"band", band},
          {"k0", to_std(k0)},
          {"sigma", sigma},
          {"kappa", kappa},
          {"h", h},
          {"cutoff", cutoff},
          {"envelope", envelope_json},
          {"external", external_to_json(external)},
          {"eps", eps},
          {"K", K},
          {"N", N},
          {"box", box},
          {"points_per_cell", points_per_cell},
          {"envelope_points", envelope_points},
          {"time",
           {{"t_final", time.t_final},
            {"snapshots", time.snapshots},
            {"scheme", scheme_name(time.scheme)},
            {"rule", rule_name(time.rule)},
            {"cell_step", time.cell_step},
            {"dt", time.dt},
            {"effective_scheme", scheme_name(time.effective_scheme)},
            {"effective_dt", time.effective_dt}}},
          {"ys_orders", ys_orders},
          {"unframed", unframed},
          {"allow_non_elliptic", allow_non_elliptic},
          {"blowup_factor", blowup_factor},
          {"threads", threads},
          {"seed", seed},
          {"output", output}};
}

void ExperimentConfig::validate() const {
  validate_structure();
  for (double e : eps) validate_eps(e);
}

void ExperimentConfig::validate_eps(double e) const {
  if (!(e > 0.0 && e <= 1.0)) throw ConfigError("each eps must lie in (0, 1]");
  const Grid g = make_fine_grid(dim(), box, e, points_per_cell);
  if (g.n < envelope_points) throw ConfigError("fine grid is coarser than the envelope grid");
}

void ExperimentConfig::validate_structure() const {
  const LatticeSpec lat = lattice_from_json(lattice);
  if (!lat.is_unit_hypercubic()) throw ConfigError("experiments need the unit hypercubic lattice");
  if (k0.size() != lat.dim()) throw ConfigError("k0 dimension does not match the lattice");
  if (!lat.in_brillouin_zone(k0)) throw ConfigError("k0 lies outside the Brillouin zone");
  if (band < 1) throw ConfigError("band index is 1-based");
  if (sigma < 1) throw ConfigError("sigma must be a positive integer");
  if (!(h > 0.0)) throw ConfigError("h must be positive");
  if (cutoff < 1) throw ConfigError("plane-wave cutoff must be at least 1");
  if (K < 0 || K > 2) throw ConfigError("K must be 0, 1 or 2");
  if (N < 0 || N > K) throw ConfigError("N must satisfy 0 <= N <= K");
  if (!(box > 0.0)) throw ConfigError("box length must be positive");
  if (!is_power_of_two(envelope_points) || envelope_points < 8) throw ConfigError("envelope_points must be a power of two >= 8");
  if (time.snapshots < 1 || !(time.t_final > 0.0)) throw ConfigError("time grid needs t_final > 0 and snapshots >= 1");
  if (!(time.effective_dt > 0.0) || !(time.cell_step > 0.0) || !(time.dt > 0.0)) throw ConfigError("time steps must be positive");
  for (int s : ys_orders) {
    if (s < 0 || s > 3) throw ConfigError("Ys orders must lie in 0..3");
  }
  if (eps.empty()) throw ConfigError("eps list is empty");
  for (std::size_t i = 1; i < eps.size(); ++i) {
    if (!(eps[i] < eps[i - 1])) throw ConfigError("eps list must be strictly decreasing");
  }
  if (envelope.type != "gaussian" && envelope.type != "file") throw ConfigError("envelope type must be gaussian or file");
  if (envelope.type == "gaussian" && !(envelope.width > 0.0)) throw ConfigError("Gaussian width must be positive");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

std::string ExperimentConfig::hash() const {
  const std::string text = to_json().dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

double ExperimentConfig::fine_dt(double e) const {
  switch (time.rule) {
    case DtRule::Cell:
      return time.cell_step * e * e;
    case DtRule::Uniform: {
      const double emin = *std::min_element(eps.begin(), eps.end());
      return std::min(1e-3 * emin * emin, 1e-4);
    }
    case DtRule::Fixed:
      return time.dt;
  }
  return time.dt;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return ExperimentConfig::from_json(j);
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' must be key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &j;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i]) || !(*node)[parts[i]].is_object()) (*node)[parts[i]] = json::object();
    node = &(*node)[parts[i]];
  }
  (*node)[parts.back()] = value;
}

BandContext build_band_context(const ExperimentConfig& config) {
  LatticeSpec lattice = lattice_from_json(config.lattice);
  FourierPotential potential = potential_from_json(lattice, config.potential);
  PlaneWaveBasis basis(lattice, config.cutoff);
  CellSpectrum spectrum = solve_cell(basis, potential, config.k0);
  BandDerivatives derivs = band_derivatives(spectrum, config.band, basis);
  EffectiveModel model = build_effective_model(spectrum.pair(config.band), derivs, basis, config.kappa, config.sigma,
                                               config.h);
  CorrectorCells cells = build_corrector_cells(spectrum, derivs, basis, model);
  return {std::move(lattice), std::move(potential), std::move(basis), std::move(spectrum),
          std::move(derivs),  std::move(model),     std::move(cells)};
}

WaveField initial_envelope(const ExperimentConfig& config) {
  const Grid grid{config.dim(), config.envelope_points, config.box};
  if (config.envelope.type == "gaussian") return gaussian_envelope(grid, config.envelope.width, config.envelope.center);
  WaveField f = read_wave_field(config.envelope.path);
  if (f.grid.dim != grid.dim || std::abs(f.grid.box - grid.box) > 1e-12 * grid.box) {
    throw ConfigError("envelope file does not match the configured box");
  }
  if (!is_power_of_two(f.grid.n)) throw ConfigError("envelope file grid size must be a power of two");
  const double norm = f.l2_norm();
  if (!(norm > 0.0)) throw ConfigError("envelope file holds a zero field");
  for (auto& v : f.samples) v /= norm;
  return f;
}

OrderFit estimate_order(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw DegenerateFit("order fit needs at least three points");
  for (const auto& [e, err] : pairs) {
    if (!(err > 0.0) || !(e > 0.0)) throw DegenerateFit("order fit needs positive eps and errors");
  }
  const double n = static_cast<double>(pairs.size());
  double sx = 0, sy = 0;
  for (const auto& [e, err] : pairs) {
    sx += std::log(e);
    sy += std::log(err);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [e, err] : pairs) {
    const double dx = std::log(e) - mx, dy = std::log(err) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw DegenerateFit("all eps values are equal");
  OrderFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

double fitted_exponent(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 2) throw DegenerateFit("exponent needs at least two points");
  if (pairs.size() >= 3) return estimate_order(pairs).slope;
  const auto& [e0, d0] = pairs[0];
  const auto& [e1, d1] = pairs[1];
  if (!(d0 > 0.0 && d1 > 0.0 && e0 > 0.0 && e1 > 0.0)) throw DegenerateFit("exponent needs positive values");
  if (e0 == e1) throw DegenerateFit("all eps values are equal");
  return std::log(d0 / d1) / std::log(e0 / e1);
}

namespace {

struct SharedRun {
  const ExperimentConfig* config;
  const BandContext* ctx;
  const WaveField* envelope;
  const Trajectory* effective;
};

ConvergenceRow run_row(const SharedRun& s, double eps) {
  const ExperimentConfig& config = *s.config;
  const BandContext& ctx = *s.ctx;
  ConvergenceRow row;
  row.eps = eps;
  const auto start = std::chrono::steady_clock::now();
  try {
    config.validate_eps(eps);
    const Grid fine = make_fine_grid(config.dim(), config.box, eps, config.points_per_cell);
    validate_fine_grid(fine, eps);
    row.grid_n = fine.n;
    const auto v = sample_lattice_potential(ctx.potential, fine, eps);
    const auto u = config.external.sample(fine);
    const WaveField psi0 = build_initial_data(*s.envelope, ctx.cells, ctx.basis, config.K, fine, eps);
    const ScaleParams params{eps, config.h, config.kappa, config.sigma};
    EvolutionOptions opt;
    opt.t_final = config.time.t_final;
    opt.dt = config.fine_dt(eps);
    opt.snapshots = config.time.snapshots;
    opt.scheme = config.time.scheme;
    opt.blowup_factor = config.blowup_factor;
    opt.store_states = false;

    row.report.eps = eps;
    row.report.order = config.N;
    row.report.grid_n = fine.n;
    row.report.dim = fine.dim;
    row.report.config_hash = config.hash();
    row.report.s_values = config.ys_orders;
    double unframed = 0.0;
    const auto observer = [&](int k, double t, const WaveField& psi) {
      const WaveField& f0 = s.effective->states.at(static_cast<std::size_t>(k));
      FrameDiagnostics diag;
      const WaveField vn = assemble_vN(f0, ctx.cells, ctx.model, ctx.basis, fine, eps, config.N, t, true, &diag);
      row.boundary_amplitude = std::max(row.boundary_amplitude, diag.boundary_amplitude);
      row.report.add(measure_error(t, psi, vn, config.ys_orders, eps));
      if (config.unframed) {
        const WaveField vu = assemble_vN(f0, ctx.cells, ctx.model, ctx.basis, fine, eps, config.N, t, false);
        unframed = std::max(unframed, l2_distance(psi, vu));
      }
    };
    const Trajectory traj = evolve_fine(psi0, params, v, u, opt, observer);
    row.dt = traj.time.dt;
    row.steps = traj.time.steps_per_snapshot * traj.time.snapshots;
    row.max_mass_error = traj.max_mass_error;
    row.mass_log = traj.mass_log;
    if (config.unframed) row.unframed_sup_l2 = unframed;
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.message = e.what();
  }
  row.runtime_s = elapsed(start);
  return row;
}

}  // namespace

ConvergenceReport run_convergence(const ExperimentConfig& config, std::ostream* log) {
  // Per-eps problems are reported on their own row.
  config.validate_structure();
  ConvergenceReport rep;
  rep.config_hash = config.hash();
  const BandContext ctx = build_band_context(config);
  rep.model = ctx.model;
  if (!ctx.model.elliptic && !config.allow_non_elliptic) {
    throw ConfigError("effective mass tensor is not elliptic (smallest eigenvalue " +
                      std::to_string(ctx.model.ellipticity) + "); set allow_non_elliptic to override");
  }
  if (!config.external.is_zero() && ctx.model.omega.norm() > 1e-12) {
    throw ConfigError("an external potential together with a nonzero drift is not supported");
  }
  const WaveField envelope = initial_envelope(config);
  const auto u_env = config.external.sample(envelope.grid);
  EvolutionOptions eopt;
  eopt.t_final = config.time.t_final;
  eopt.dt = config.time.effective_dt;
  eopt.snapshots = config.time.snapshots;
  eopt.scheme = config.time.effective_scheme;
  eopt.blowup_factor = config.blowup_factor;
  const auto start = std::chrono::steady_clock::now();
  const Trajectory eff = evolve_effective(envelope, ctx.model, u_env, eopt, config.allow_non_elliptic);
  rep.effective_runtime_s = elapsed(start);
  rep.effective_mass_error = eff.max_mass_error;
  rep.effective_mass_log = eff.mass_log;
  if (log) *log << "effective run: mass error " << eff.max_mass_error << ", " << rep.effective_runtime_s << " s\n";

  const SharedRun shared{&config, &ctx, &envelope, &eff};
  rep.rows.resize(config.eps.size());
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), config.eps.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < config.eps.size(); ++i) {
      rep.rows[i] = run_row(shared, config.eps[i]);
      if (log) {
        const auto& r = rep.rows[i];
        *log << "eps=" << r.eps << (r.ok ? "" : " FAILED: " + r.message) << " sup L2=" << r.report.sup_l2
             << " (" << r.runtime_s << " s)\n";
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < config.eps.size(); i = next++) rep.rows[i] = run_row(shared, config.eps[i]);
      });
    }
    for (auto& t : pool) t.join();
  }

  std::vector<std::pair<double, double>> pairs;
  bool all_small = true;
  for (const auto& r : rep.rows) {
    if (!r.ok) continue;
    pairs.emplace_back(r.eps, r.report.sup_l2);
    all_small = all_small && r.report.sup_l2 < 1e-8;
  }
  if (!pairs.empty() && all_small) {
    rep.floor = true;
  } else if (pairs.size() >= 3) {
    try {
      rep.fit = estimate_order(pairs);
    } catch (const DegenerateFit&) {
      rep.fit.reset();
    }
  }
  return rep;
}

PreparationReport compare_preparation(const ExperimentConfig& config, int k_low, int k_high, std::ostream* log) {
  config.validate();
  if (k_low < 0 || k_low > 2 || k_high < 0 || k_high > 2) throw ConfigError("preparation orders must lie in 0..2");
  const BandContext ctx = build_band_context(config);
  const WaveField envelope = initial_envelope(config);
  PreparationReport rep;
  rep.k_low = k_low;
  rep.k_high = k_high;
  for (double eps : config.eps) {
    const Grid fine = make_fine_grid(config.dim(), config.box, eps, config.points_per_cell);
    const auto v = sample_lattice_potential(ctx.potential, fine, eps);
    const auto u = config.external.sample(fine);
    const ScaleParams params{eps, config.h, config.kappa, config.sigma};
    EvolutionOptions opt;
    opt.t_final = config.time.t_final;
    opt.dt = config.fine_dt(eps);
    opt.snapshots = config.time.snapshots;
    opt.scheme = config.time.scheme;
    opt.blowup_factor = config.blowup_factor;
    const WaveField high0 = build_initial_data(envelope, ctx.cells, ctx.basis, k_high, fine, eps);
    const WaveField low0 = build_initial_data(envelope, ctx.cells, ctx.basis, k_low, fine, eps);
    const Trajectory high = evolve_fine(high0, params, v, u, opt);
    opt.store_states = false;
    PreparationRow row;
    row.eps = eps;
    const auto observer = [&](int k, double, const WaveField& psi) {
      const WaveField& other = high.states.at(static_cast<std::size_t>(k));
      WaveField diff(fine, eps);
      for (std::size_t p = 0; p < diff.samples.size(); ++p) diff.samples[p] = psi.samples[p] - other.samples[p];
      const double l2 = diff.l2_norm();
      if (k == 0) row.initial_l2 = l2;
      row.sup_l2 = std::max(row.sup_l2, l2);
      row.sup_y1 = std::max(row.sup_y1, ys_norm(diff, 1, eps));
    };
    const Trajectory low = evolve_fine(low0, params, v, u, opt, observer);
    row.max_mass_error = std::max(high.max_mass_error, low.max_mass_error);
    if (log) *log << "eps=" << eps << " sup L2 distance " << row.sup_l2 << " sup Y1 distance " << row.sup_y1 << '\n';
    rep.rows.push_back(row);
  }
  std::vector<std::pair<double, double>> l2, y1;
  for (const auto& r : rep.rows) {
    l2.emplace_back(r.eps, r.sup_l2);
    y1.emplace_back(r.eps, r.sup_y1);
  }
  try {
    rep.exponent_l2 = fitted_exponent(l2);
    rep.exponent_y1 = fitted_exponent(y1);
  } catch (const DegenerateFit&) {
  }
  return rep;
}

}  // namespace effmass
