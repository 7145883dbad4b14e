#include "effmass/errors.hpp"
#include "effmass/experiment.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifndef EFFMASS_BUILD_STAMP
#define EFFMASS_BUILD_STAMP "unknown"
#endif

namespace effmass {

using nlohmann::json;

std::string build_stamp() { return EFFMASS_BUILD_STAMP; }

json convergence_to_json(const ConvergenceReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json row = {{"eps", r.eps},
                {"ok", r.ok},
                {"grid_points", r.grid_n},
                {"dt", r.dt},
                {"steps", r.steps},
                {"max_mass_error", r.max_mass_error},
                {"boundary_amplitude", r.boundary_amplitude},
                {"runtime_s", r.runtime_s}};
    if (!r.ok) row["error"] = r.message;
    if (r.ok) row["errors"] = error_summary_json(r.report);
    if (r.unframed_sup_l2 >= 0.0) row["unframed_sup_l2"] = r.unframed_sup_l2;
    rows.push_back(row);
  }
  json out = {{"config_hash", rep.config_hash},
              {"model", model_to_json(rep.model)},
              {"effective_mass_error", rep.effective_mass_error},
              {"effective_runtime_s", rep.effective_runtime_s},
              {"rows", rows},
              {"stamp", build_stamp()}};
  if (rep.floor) {
    out["slope"] = "floor";
  } else if (rep.fit) {
    out["slope"] = rep.fit->slope;
    out["intercept"] = rep.fit->intercept;
    out["r2"] = rep.fit->r2;
  } else {
    out["slope"] = nullptr;
  }
  return out;
}

json preparation_to_json(const PreparationReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"eps", r.eps},
                    {"initial_l2", r.initial_l2},
                    {"sup_l2", r.sup_l2},
                    {"sup_y1", r.sup_y1},
                    {"max_mass_error", r.max_mass_error}});
  }
  json out = {{"k_low", rep.k_low}, {"k_high", rep.k_high}, {"rows", rows}, {"stamp", build_stamp()}};
  out["exponent_l2"] = rep.exponent_l2 ? json(*rep.exponent_l2) : json(nullptr);
  out["exponent_y1"] = rep.exponent_y1 ? json(*rep.exponent_y1) : json(nullptr);
  return out;
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw Error("cannot open " + p.string() + " for writing");
  os << std::setprecision(17);
  return os;
}

void write_common(const std::filesystem::path& dir, const ExperimentConfig& config) {
  std::filesystem::create_directories(dir);
  open_out(dir / "config.json") << config.to_json().dump(2) << '\n';
  open_out(dir / "stamp.txt") << build_stamp() << '\n';
}

}  // namespace

void write_convergence_run(const std::filesystem::path& dir, const ExperimentConfig& config,
                           const ConvergenceReport& rep) {
  write_common(dir, config);
  {
    auto os = open_out(dir / "convergence.csv");
    os << "eps,status,grid_points,dt,sup_l2,sup_linf";
    for (int s : config.ys_orders) os << ",sup_ys" << s;
    os << ",unframed_sup_l2,max_mass_error\n";
    for (const auto& r : rep.rows) {
      os << r.eps << ',' << (r.ok ? "ok" : "failed") << ',' << r.grid_n << ',' << r.dt << ',' << r.report.sup_l2 << ','
         << r.report.sup_linf;
      for (std::size_t i = 0; i < config.ys_orders.size(); ++i) {
        os << ',' << (i < r.report.sup_ys.size() ? r.report.sup_ys[i] : 0.0);
      }
      os << ',' << r.unframed_sup_l2 << ',' << r.max_mass_error << '\n';
    }
  }
  std::vector<ErrorReport> reports;
  for (const auto& r : rep.rows) {
    if (r.ok) reports.push_back(r.report);
  }
  write_error_csv(dir / "errors.csv", reports);
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (rep.rows[i].ok) write_mass_log(dir / ("mass_fine_" + std::to_string(i) + ".csv"), rep.rows[i].mass_log);
  }
  write_mass_log(dir / "mass_effective.csv", rep.effective_mass_log);
  open_out(dir / "summary.json") << convergence_to_json(rep).dump(2) << '\n';
  open_out(dir / "convergence.svg") << convergence_svg(rep);
}

void write_preparation_run(const std::filesystem::path& dir, const ExperimentConfig& config,
                           const PreparationReport& rep) {
  write_common(dir, config);
  {
    auto os = open_out(dir / "preparation.csv");
    os << "eps,initial_l2,sup_l2,sup_y1,max_mass_error\n";
    for (const auto& r : rep.rows) {
      os << r.eps << ',' << r.initial_l2 << ',' << r.sup_l2 << ',' << r.sup_y1 << ',' << r.max_mass_error << '\n';
    }
  }
  open_out(dir / "summary.json") << preparation_to_json(rep).dump(2) << '\n';
}

std::string convergence_svg(const ConvergenceReport& rep) {
  constexpr double width = 560, height = 420, left = 70, right = 20, top = 20, bottom = 50;
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rep.rows) {
    if (r.ok && r.report.sup_l2 > 0.0) pts.emplace_back(std::log10(r.eps), std::log10(r.report.sup_l2));
  }
  std::ostringstream os;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (pts.empty()) {
    os << "<text x=\"20\" y=\"40\">no data</text>\n</svg>\n";
    return os.str();
  }
  double x0 = pts[0].first, x1 = x0, y0 = pts[0].second, y1 = y0;
  for (const auto& [x, y] : pts) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  x0 = std::floor(x0 * 2.0) / 2.0 - 0.1;
  x1 = std::ceil(x1 * 2.0) / 2.0 + 0.1;
  y0 = std::floor(y0) - 0.1;
  y1 = std::ceil(y1) + 0.1;
  const auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (width - left - right); };
  const auto py = [&](double y) { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); };
  os << "<g stroke=\"black\" fill=\"none\">\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
     << height - top - bottom << "\"/>\n</g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int e = static_cast<int>(std::ceil(y0)); e <= static_cast<int>(std::floor(y1)); ++e) {
    os << "<text x=\"" << left - 8 << "\" y=\"" << py(e) + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  for (const auto& [x, y] : pts) {
    os << "<text x=\"" << px(x) << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\">"
       << std::pow(10.0, x) << "</text>\n";
  }
  os << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 10
     << "\" text-anchor=\"middle\">eps</text>\n";
  os << "<text x=\"16\" y=\"" << (top + height - bottom) / 2 << "\" transform=\"rotate(-90 16 "
     << (top + height - bottom) / 2 << ")\" text-anchor=\"middle\">sup_t L2 error</text>\n";
  if (rep.fit) {
    os << "<text x=\"" << left + 10 << "\" y=\"" << top + 16 << "\">slope " << rep.fit->slope << ", R2 " << rep.fit->r2
       << "</text>\n";
  }
  os << "</g>\n";
  if (rep.fit) {
    const double a = x0 + 0.05, b = x1 - 0.05;
    os << "<line x1=\"" << px(a) << "\" y1=\"" << py(rep.fit->intercept / std::log(10.0) + rep.fit->slope * a)
       << "\" x2=\"" << px(b) << "\" y2=\"" << py(rep.fit->intercept / std::log(10.0) + rep.fit->slope * b)
       << "\" stroke=\"steelblue\" stroke-dasharray=\"6 4\"/>\n";
  }
  for (const auto& [x, y] : pts) {
    os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"4\" fill=\"firebrick\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace effmass
