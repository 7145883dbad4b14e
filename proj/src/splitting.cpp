#include "effmass/splitting.hpp"

#include "effmass/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace effmass {

namespace {
// exp(i theta); the nonlinear phase per substep is tiny in practice, where a
// short Taylor series is exact to rounding and much cheaper than sincos.
inline cplx unit_phase(double theta) {
  if (std::abs(theta) < 2e-3) {
    const double t2 = theta * theta;
    return {1.0 - 0.5 * t2 * (1.0 - t2 / 12.0), theta * (1.0 - t2 / 6.0 * (1.0 - t2 / 20.0))};
  }
  return std::polar(1.0, theta);
}

// Plain product; std::complex operator* goes through the NaN-safe library path.
inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}
}  // namespace

SplitScheme parse_scheme(const std::string& name) {
  if (name == "strang") return SplitScheme::Strang;
  if (name == "bm4") return SplitScheme::BlanesMoan4;
  throw ConfigError("unknown splitting scheme '" + name + "' (expected strang or bm4)");
}

std::string scheme_name(SplitScheme scheme) { return scheme == SplitScheme::Strang ? "strang" : "bm4"; }

int scheme_order(SplitScheme scheme) { return scheme == SplitScheme::Strang ? 2 : 4; }

SplitCoefficients split_coefficients(SplitScheme scheme) {
  if (scheme == SplitScheme::Strang) return {{0.5, 0.5}, {1.0}};
  // Blanes and Moan (2002), six-stage order-four partitioned RK, BAB form.
  const double b1 = 0.0792036964311957, b2 = 0.353172906049774, b3 = -0.0420650803577195;
  const double b4 = 1.0 - 2.0 * (b1 + b2 + b3);
  const double a1 = 0.209515106613362, a2 = -0.143851773179818;
  const double a3 = 0.5 - (a1 + a2);
  return {{b1, b2, b3, b4, b3, b2, b1}, {a1, a2, a3, a3, a2, a1}};
}

std::vector<double> laplacian_symbol(const Grid& grid, double factor) {
  std::vector<double> s(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto idx = grid.unflatten(p);
    double q = 0.0;
    for (int a = 0; a < grid.dim; ++a) q += grid.wavenumber(idx[a]) * grid.wavenumber(idx[a]);
    s[p] = factor * q;
  }
  return s;
}

std::vector<double> quadratic_symbol(const Grid& grid, const Eigen::MatrixXd& m, double factor) {
  if (m.rows() != grid.dim || m.cols() != grid.dim) throw DimensionMismatch("symbol matrix has wrong size");
  std::vector<double> s(grid.size());
  Eigen::VectorXd xi(grid.dim);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto idx = grid.unflatten(p);
    for (int a = 0; a < grid.dim; ++a) xi[a] = grid.wavenumber(idx[a]);
    s[p] = factor * xi.dot(m * xi);
  }
  return s;
}

SplitStepper::SplitStepper(SplitProblem problem, SplitScheme scheme, double dt)
    : problem_(std::move(problem)),
      scheme_(scheme),
      coeffs_(split_coefficients(scheme)),
      dt_(dt),
      plan_(problem_.grid.dim, problem_.grid.n) {
  if (!(dt > 0.0)) throw Error("time step must be positive");
  if (problem_.linear.size() != problem_.grid.size() || problem_.symbol.size() != problem_.grid.size()) {
    throw DimensionMismatch("split problem arrays do not match the grid");
  }
  if (problem_.sigma < 1) throw Error("sigma must be a positive integer");
}

const std::vector<cplx>& SplitStepper::linear_phase(double weight) {
  for (const auto& [w, v] : linear_cache_) {
    if (w == weight) return v;
  }
  std::vector<cplx> v(problem_.linear.size());
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = std::polar(1.0, -weight * dt_ * problem_.linear[p]);
  linear_cache_.emplace_back(weight, std::move(v));
  return linear_cache_.back().second;
}

const std::vector<cplx>& SplitStepper::kinetic_phase(double weight) {
  for (const auto& [w, v] : kinetic_cache_) {
    if (w == weight) return v;
  }
  const double inv = 1.0 / static_cast<double>(problem_.grid.size());
  std::vector<cplx> v(problem_.symbol.size());
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = std::polar(inv, -weight * dt_ * problem_.symbol[p]);
  kinetic_cache_.emplace_back(weight, std::move(v));
  return kinetic_cache_.back().second;
}

double SplitStepper::diagonal(double weight) {
  const auto& lin = linear_phase(weight);
  auto buf = plan_.data();
  const double c = -weight * dt_ * problem_.coupling;
  const int sigma = problem_.sigma;
  double peak = 0.0;
  if (c == 0.0) {
    for (std::size_t p = 0; p < buf.size(); ++p) {
      peak = std::max(peak, std::norm(buf[p]));
      buf[p] = mul(buf[p], lin[p]);
    }
    return peak;
  }
  for (std::size_t p = 0; p < buf.size(); ++p) {
    const double r = std::norm(buf[p]);
    peak = std::max(peak, r);
    double rs = r;
    for (int s = 1; s < sigma; ++s) rs *= r;
    buf[p] = mul(buf[p], mul(lin[p], unit_phase(c * rs)));
  }
  return peak;
}

void SplitStepper::kinetic(double weight) {
  const auto& mult = kinetic_phase(weight);
  auto buf = plan_.data();
  plan_.forward();
  for (std::size_t p = 0; p < buf.size(); ++p) buf[p] = mul(buf[p], mult[p]);
  plan_.backward();
}

double SplitStepper::advance(WaveField& psi, long steps) {
  if (!(psi.grid == problem_.grid)) throw GridMismatch("field does not live on the stepper grid");
  if (steps <= 0) return psi.sup_norm() * psi.sup_norm();
  auto buf = plan_.data();
  std::copy(psi.samples.begin(), psi.samples.end(), buf.begin());
  const auto& b = coeffs_.diag;
  const auto& a = coeffs_.kin;
  // |psi| is invariant under the diagonal flow, so the last diagonal substep of
  // one step and the first of the next combine exactly into one.
  const double merged = b.back() + b.front();
  double peak = diagonal(b.front());
  for (long s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      kinetic(a[i]);
      const bool last = i + 1 == a.size();
      if (!last) {
        peak = std::max(peak, diagonal(b[i + 1]));
      } else {
        peak = std::max(peak, diagonal(s + 1 < steps ? merged : b.back()));
      }
    }
  }
  std::copy(buf.begin(), buf.end(), psi.samples.begin());
  return peak;
}

TimeGrid plan_time(double t_final, double dt_max, int snapshots) {
  if (!(t_final > 0.0) || !(dt_max > 0.0) || snapshots < 1) {
    throw Error("time grid needs t_final > 0, dt > 0 and at least one snapshot");
  }
  TimeGrid g;
  g.t_final = t_final;
  g.snapshots = snapshots;
  const double interval = t_final / snapshots;
  g.steps_per_snapshot = std::max(1L, static_cast<long>(std::ceil(interval / dt_max * (1.0 - 1e-12))));
  g.dt = interval / static_cast<double>(g.steps_per_snapshot);
  return g;
}

Trajectory evolve_split(SplitProblem problem, const WaveField& initial, const EvolutionOptions& options,
                        const SnapshotObserver& observer) {
  Trajectory traj;
  traj.time = plan_time(options.t_final, options.dt, options.snapshots);
  SplitStepper stepper(std::move(problem), options.scheme, traj.time.dt);
  WaveField psi = initial;
  const double norm0 = psi.l2_norm();
  const double sup0 = psi.sup_norm();
  if (!(norm0 > 0.0)) throw Error("initial state vanishes");

  auto record = [&](int k) {
    const double t = traj.time.time(k);
    const double err = std::abs(psi.l2_norm() - norm0) / norm0;
    traj.times.push_back(t);
    traj.mass_log.push_back({t, err});
    traj.max_mass_error = std::max(traj.max_mass_error, err);
    if (options.store_states) traj.states.push_back(psi);
    if (observer) observer(k, t, psi);
  };

  record(0);
  // Short chunks so that a blow-up is caught close to when it happens.
  const long chunk = std::min<long>(traj.time.steps_per_snapshot, 64);
  for (int k = 1; k <= traj.time.snapshots; ++k) {
    long done = 0;
    while (done < traj.time.steps_per_snapshot) {
      const long n = std::min(chunk, traj.time.steps_per_snapshot - done);
      const double peak = std::sqrt(stepper.advance(psi, n));
      done += n;
      const double ratio = std::max(peak, psi.sup_norm()) / sup0;
      if (!std::isfinite(ratio) || ratio > options.blowup_factor) {
        const double t = traj.time.time(k - 1) + static_cast<double>(done) * traj.time.dt;
        throw BlowUpDetected(t, ratio);
      }
    }
    record(k);
  }
  traj.final_state = psi;
  return traj;
}

void write_mass_log(const std::filesystem::path& path, const std::vector<MassRecord>& log) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string());
  os << "t,mass_error\n" << std::setprecision(17);
  for (const auto& r : log) os << r.t << ',' << r.error << '\n';
}

}  // namespace effmass
