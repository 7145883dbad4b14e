#include "effmass/asymptotics.hpp"

#include "effmass/errors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace effmass {

WaveField assemble_vN(const WaveField& f0_t, const CorrectorCells& cells, const EffectiveModel& model,
                      const PlaneWaveBasis& basis, const Grid& fine, double eps, int order, double t,
                      bool moving_frame, FrameDiagnostics* diagnostics) {
  const int d = fine.dim;
  Frame frame;
  frame.shift = moving_frame ? Eigen::VectorXd(model.h * t / eps * model.omega) : Eigen::VectorXd::Zero(d);
  frame.phase = model.beta * t / (eps * eps);
  if (diagnostics) {
    const WaveField shifted = resample(f0_t, f0_t.grid, frame.shift);
    double edge = 0.0;
    for (std::size_t p = 0; p < shifted.grid.size(); ++p) {
      const auto idx = shifted.grid.unflatten(p);
      bool on_edge = false;
      for (int a = 0; a < d; ++a) on_edge = on_edge || idx[a] == 0;
      if (on_edge) edge = std::max(edge, std::abs(shifted.samples[p]));
    }
    diagnostics->boundary_amplitude = edge;
    diagnostics->wrap_warning = edge > 1e-10;
  }
  const CorrectorSet set = build_correctors(f0_t, cells, order);
  return assemble_two_scale(set, basis, fine, eps, model.k0, frame);
}

namespace {
// Sum of ||(eps x)^alpha g|| over |alpha| <= budget for one derivative field g.
double moment_sum(const WaveField& g, int budget, double eps) {
  const Grid& grid = g.grid;
  double total = 0.0;
  for (int a0 = 0; a0 <= budget; ++a0) {
    for (int a1 = 0; a1 <= (grid.dim == 2 ? budget - a0 : 0); ++a1) {
      if (a0 == 0 && a1 == 0) {
        total += g.l2_norm();
        continue;
      }
      double s = 0.0;
      for (std::size_t p = 0; p < grid.size(); ++p) {
        const auto idx = grid.unflatten(p);
        double w = std::pow(eps * grid.coordinate(idx[0]), a0);
        if (grid.dim == 2) w *= std::pow(eps * grid.coordinate(idx[1]), a1);
        s += std::norm(w * g.samples[p]);
      }
      total += std::sqrt(s * grid.cell_volume());
    }
  }
  return total;
}
}  // namespace

double ys_norm(const WaveField& f, int s, double eps) {
  if (s < 0) throw Error("Ys order must be non-negative");
  if (s == 0) return f.l2_norm();
  double total = 0.0;
  const int d = f.grid.dim;
  for (int b0 = 0; b0 <= s; ++b0) {
    for (int b1 = 0; b1 <= (d == 2 ? s - b0 : 0); ++b1) {
      WaveField g = (b0 == 0 && b1 == 0) ? f : spectral_derivative(f, {b0, b1});
      const double scale = std::pow(eps, b0 + b1);
      if (b0 + b1 > 0) {
        for (auto& v : g.samples) v *= scale;
      }
      total += moment_sum(g, s - b0 - b1, eps);
    }
  }
  return total;
}

void ErrorReport::add(ErrorSample sample) {
  sup_l2 = std::max(sup_l2, sample.l2);
  sup_linf = std::max(sup_linf, sample.linf);
  if (sup_ys.size() < sample.ys.size()) sup_ys.resize(sample.ys.size(), 0.0);
  for (std::size_t i = 0; i < sample.ys.size(); ++i) sup_ys[i] = std::max(sup_ys[i], sample.ys[i]);
  samples.push_back(std::move(sample));
}

ErrorSample measure_error(double t, const WaveField& psi, const WaveField& v, const std::vector<int>& s_values,
                          double eps) {
  if (!(psi.grid == v.grid)) throw GridMismatch("solution and approximation live on different grids");
  WaveField diff(psi.grid, eps);
  for (std::size_t p = 0; p < diff.samples.size(); ++p) diff.samples[p] = psi.samples[p] - v.samples[p];
  ErrorSample e;
  e.t = t;
  e.l2 = diff.l2_norm();
  e.linf = diff.sup_norm();
  for (int s : s_values) e.ys.push_back(ys_norm(diff, s, eps));
  return e;
}

ErrorReport error_metrics(const std::vector<double>& times, const std::vector<WaveField>& psi,
                          const std::vector<WaveField>& v, const std::vector<int>& s_values, double eps) {
  if (psi.size() != v.size() || psi.size() != times.size()) throw GridMismatch("snapshot counts differ");
  ErrorReport r;
  r.eps = eps;
  r.s_values = s_values;
  if (!psi.empty()) {
    r.grid_n = psi.front().grid.n;
    r.dim = psi.front().grid.dim;
  }
  for (std::size_t i = 0; i < psi.size(); ++i) r.add(measure_error(times[i], psi[i], v[i], s_values, eps));
  return r;
}

void write_error_csv(const std::filesystem::path& path, const std::vector<ErrorReport>& reports) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string());
  os << "t,eps,N,L2,Linf";
  if (!reports.empty()) {
    for (int s : reports.front().s_values) os << ",Ys" << s;
  }
  os << '\n' << std::setprecision(17);
  for (const auto& r : reports) {
    for (const auto& e : r.samples) {
      os << e.t << ',' << r.eps << ',' << r.order << ',' << e.l2 << ',' << e.linf;
      for (double y : e.ys) os << ',' << y;
      os << '\n';
    }
  }
}

nlohmann::json error_summary_json(const ErrorReport& r) {
  nlohmann::json ys = nlohmann::json::object();
  nlohmann::json proxy = nlohmann::json::object();
  for (std::size_t i = 0; i < r.s_values.size() && i < r.sup_ys.size(); ++i) {
    const std::string key = std::to_string(r.s_values[i]);
    ys[key] = r.sup_ys[i];
    proxy[key] = std::pow(r.eps, -0.5 * r.dim) * r.sup_ys[i];
  }
  return {{"eps", r.eps},     {"order", r.order},         {"grid_points", r.grid_n}, {"config_hash", r.config_hash},
          {"sup_l2", r.sup_l2}, {"sup_linf", r.sup_linf}, {"sup_ys", ys},            {"linf_proxy", proxy}};
}

}  // namespace effmass
