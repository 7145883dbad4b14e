#include "effmass/wave_field.hpp"

#include "effmass/errors.hpp"
#include "effmass/fft.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>

namespace effmass {

double Grid::wavenumber(std::size_t i) const noexcept {
  const auto ni = static_cast<long>(n);
  const auto ii = static_cast<long>(i);
  const long s = ii < ni / 2 ? ii : ii - ni;
  return 2.0 * std::numbers::pi * static_cast<double>(s) / box;
}

Eigen::VectorXd Grid::point(std::size_t p) const {
  const auto idx = unflatten(p);
  Eigen::VectorXd x(dim);
  for (int a = 0; a < dim; ++a) x[a] = coordinate(idx[a]);
  return x;
}

double WaveField::mass() const {
  double s = 0.0;
  for (const auto& v : samples) s += std::norm(v);
  return s * grid.cell_volume();
}

double WaveField::l2_norm() const { return std::sqrt(mass()); }

double WaveField::sup_norm() const {
  double m = 0.0;
  for (const auto& v : samples) m = std::max(m, std::abs(v));
  return m;
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

long cells_per_box(double box, double eps) {
  if (!(eps > 0.0)) throw CommensurabilityError("eps must be positive");
  const double r = box / eps;
  const double rr = std::round(r);
  if (rr < 1.0 || std::abs(r - rr) > 1e-9 * std::max(1.0, r)) {
    throw CommensurabilityError("box length " + std::to_string(box) + " is not an integer multiple of eps " +
                                std::to_string(eps));
  }
  return static_cast<long>(rr);
}

WaveField gaussian_envelope(const Grid& grid, double width, const Eigen::VectorXd& center) {
  if (!(width > 0.0)) throw Error("Gaussian width must be positive");
  WaveField f(grid, 0.0);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double r2 = (grid.point(p) - center).squaredNorm();
    f.samples[p] = std::exp(-r2 / (2.0 * width * width));
  }
  const double norm = f.l2_norm();
  for (auto& v : f.samples) v /= norm;
  return f;
}

namespace {
void require_same_grid(const WaveField& a, const WaveField& b) {
  if (!(a.grid == b.grid)) throw GridMismatch("fields live on different grids");
}
}  // namespace

double l2_distance(const WaveField& a, const WaveField& b) {
  require_same_grid(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) s += std::norm(a.samples[i] - b.samples[i]);
  return std::sqrt(s * a.grid.cell_volume());
}

double sup_distance(const WaveField& a, const WaveField& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) m = std::max(m, std::abs(a.samples[i] - b.samples[i]));
  return m;
}

WaveField spectral_derivative(const WaveField& f, const std::array<int, 2>& order) {
  const Grid& g = f.grid;
  FftPlan plan(g.dim, g.n);
  auto buf = plan.data();
  std::copy(f.samples.begin(), f.samples.end(), buf.begin());
  plan.forward();
  const double inv = 1.0 / static_cast<double>(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto idx = g.unflatten(p);
    cplx factor = inv;
    for (int a = 0; a < g.dim; ++a) {
      const cplx ik{0.0, g.wavenumber(idx[a])};
      for (int r = 0; r < order[a]; ++r) factor *= ik;
    }
    buf[p] *= factor;
  }
  plan.backward();
  WaveField out(g, f.eps);
  std::copy(buf.begin(), buf.end(), out.samples.begin());
  return out;
}

WaveField resample(const WaveField& f, const Grid& target, const Eigen::VectorXd& shift) {
  const Grid& src = f.grid;
  if (src.dim != target.dim || std::abs(src.box - target.box) > 1e-12 * src.box || target.n < src.n) {
    throw GridMismatch("resample needs the same box and a target at least as fine as the source");
  }
  if (shift.size() != src.dim) throw DimensionMismatch("shift has wrong dimension");
  FftPlan in(src.dim, src.n);
  std::copy(f.samples.begin(), f.samples.end(), in.data().begin());
  in.forward();
  FftPlan out(target.dim, target.n);
  auto dst = out.data();
  std::fill(dst.begin(), dst.end(), cplx{0.0});
  const double inv = 1.0 / static_cast<double>(src.size());
  const auto ns = static_cast<long>(src.n);
  const auto nt = static_cast<long>(target.n);
  // Origin offset: the grids share x = -X/2, so no extra phase beyond the shift.
  for (std::size_t p = 0; p < src.size(); ++p) {
    const auto idx = src.unflatten(p);
    std::size_t q = 0;
    double phase = 0.0;
    for (int a = 0; a < src.dim; ++a) {
      const long i = static_cast<long>(idx[a]);
      const long s = i < ns / 2 ? i : i - ns;
      const long t = s >= 0 ? s : s + nt;
      q = q * target.n + static_cast<std::size_t>(t);
      phase -= src.wavenumber(idx[a]) * shift[a];
    }
    dst[q] = in.data()[p] * inv * std::polar(1.0, phase);
  }
  out.backward();
  WaveField r(target, f.eps);
  std::copy(dst.begin(), dst.end(), r.samples.begin());
  return r;
}

void write_wave_field(const std::filesystem::path& path, const WaveField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  const auto d = static_cast<std::uint32_t>(f.grid.dim);
  const auto n = static_cast<std::uint32_t>(f.grid.n);
  os.write(reinterpret_cast<const char*>(&d), sizeof d);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(&f.grid.box), sizeof f.grid.box);
  os.write(reinterpret_cast<const char*>(f.samples.data()),
           static_cast<std::streamsize>(f.samples.size() * sizeof(cplx)));
  if (!os) throw Error("write failed for " + path.string());
}

WaveField read_wave_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  std::uint32_t d = 0, n = 0;
  double box = 0.0;
  is.read(reinterpret_cast<char*>(&d), sizeof d);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  is.read(reinterpret_cast<char*>(&box), sizeof box);
  if (!is || d < 1 || d > 2 || n == 0 || !(box > 0.0)) throw Error("malformed wave-field header in " + path.string());
  WaveField f(Grid{static_cast<int>(d), n, box}, 0.0);
  is.read(reinterpret_cast<char*>(f.samples.data()), static_cast<std::streamsize>(f.samples.size() * sizeof(cplx)));
  if (!is) throw Error("truncated wave-field data in " + path.string());
  return f;
}

}  // namespace effmass
