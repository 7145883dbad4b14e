#pragma once

#include "effmass/lattice.hpp"

#include <Eigen/Dense>

#include <complex>
#include <filesystem>
#include <vector>

namespace effmass {

/// Uniform periodic grid on the box [-X/2, X/2)^d with N points per axis.
struct Grid {
  int dim = 1;
  std::size_t n = 0;
  double box = 1.0;

  std::size_t size() const noexcept { return dim == 1 ? n : n * n; }
  double spacing() const noexcept { return box / static_cast<double>(n); }
  double cell_volume() const noexcept { return dim == 1 ? spacing() : spacing() * spacing(); }
  double coordinate(std::size_t i) const noexcept { return -0.5 * box + static_cast<double>(i) * spacing(); }
  /// Angular wavenumber of FFT index i (negative frequencies in the upper half).
  double wavenumber(std::size_t i) const noexcept;
  /// Per-axis indices of flat index p.
  std::array<std::size_t, 2> unflatten(std::size_t p) const noexcept {
    return dim == 1 ? std::array<std::size_t, 2>{p, 0} : std::array<std::size_t, 2>{p / n, p % n};
  }
  Eigen::VectorXd point(std::size_t p) const;
  bool operator==(const Grid& o) const noexcept { return dim == o.dim && n == o.n && box == o.box; }
};

/// Complex samples of psi or f on a Grid; eps = 0 marks an envelope field.
struct WaveField {
  Grid grid;
  double eps = 0.0;
  std::vector<cplx> samples;

  WaveField() = default;
  WaveField(Grid g, double e) : grid(g), eps(e), samples(g.size(), cplx{0.0}) {}

  double mass() const;
  double l2_norm() const;
  double sup_norm() const;
};

bool is_power_of_two(std::size_t n) noexcept;

/// Throws CommensurabilityError unless box / eps is a positive integer; returns it.
long cells_per_box(double box, double eps);

WaveField gaussian_envelope(const Grid& grid, double width, const Eigen::VectorXd& center);

/// Discrete L2 distance sqrt(sum |a-b|^2 dx^d); throws GridMismatch.
double l2_distance(const WaveField& a, const WaveField& b);
double sup_distance(const WaveField& a, const WaveField& b);

/// Spectral partial derivative d^order f (order per axis).
WaveField spectral_derivative(const WaveField& f, const std::array<int, 2>& order);

/**
 * Trigonometric interpolation of f onto a finer (or equal) grid over the same
 * box, evaluated at x - shift. Exact for band-limited periodic fields.
 */
WaveField resample(const WaveField& f, const Grid& target, const Eigen::VectorXd& shift);

/// Binary layout: uint32 d, uint32 N, double X, then N^d interleaved (re, im) doubles.
void write_wave_field(const std::filesystem::path& path, const WaveField& f);
WaveField read_wave_field(const std::filesystem::path& path);

}  // namespace effmass
