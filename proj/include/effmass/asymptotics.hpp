#pragma once

#include "effmass/correctors.hpp"
#include "effmass/effective_model.hpp"
#include "effmass/wave_field.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace effmass {

struct FrameDiagnostics {
  /// Largest |f0| of the shifted envelope on the box boundary.
  double boundary_amplitude = 0.0;
  bool wrap_warning = false;
};

/**
 * v_N at time t from the envelope snapshot f0(t):
 * (sum_{j<=N} eps^j u_j(t, x - h t omega / eps, x / eps)) exp(i k0.x / eps) exp(-i h E t / eps^2).
 * With moving_frame = false the drift shift is omitted (diagnostic only).
 */
WaveField assemble_vN(const WaveField& f0_t, const CorrectorCells& cells, const EffectiveModel& model,
                      const PlaneWaveBasis& basis, const Grid& fine, double eps, int order, double t,
                      bool moving_frame = true, FrameDiagnostics* diagnostics = nullptr);

/// sum over |alpha| + |beta| <= s of ||(eps x)^alpha (eps d)^beta f||_{L2}; s = 0 is the L2 norm.
double ys_norm(const WaveField& f, int s, double eps);

struct ErrorSample {
  double t = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  std::vector<double> ys;  // one per requested s
};

struct ErrorReport {
  double eps = 0.0;
  int order = 0;
  std::size_t grid_n = 0;
  int dim = 1;
  std::string config_hash;
  std::vector<int> s_values;
  std::vector<ErrorSample> samples;
  double sup_l2 = 0.0;
  double sup_linf = 0.0;
  std::vector<double> sup_ys;

  void add(ErrorSample sample);
};

ErrorSample measure_error(double t, const WaveField& psi, const WaveField& v, const std::vector<int>& s_values,
                          double eps);

/// Pointwise error norms for matching snapshot lists; throws GridMismatch.
ErrorReport error_metrics(const std::vector<double>& times, const std::vector<WaveField>& psi,
                          const std::vector<WaveField>& v, const std::vector<int>& s_values, double eps);

/// Header "t,eps,N,L2,Linf,Ys<s>..." where N is the asymptotic order.
void write_error_csv(const std::filesystem::path& path, const std::vector<ErrorReport>& reports);
nlohmann::json error_summary_json(const ErrorReport& report);

}  // namespace effmass
