#pragma once

#include "effmass/cell_spectral.hpp"
#include "effmass/lattice.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace testing_support {

using effmass::cplx;

/// Real 1D potential with |V(m)| <= max_abs on 1 <= |m| <= radius, seeded.
inline effmass::FourierPotential random_potential(unsigned seed, int dim = 1, int radius = 2, double max_abs = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.0, max_abs), phase(0.0, 2.0 * std::numbers::pi);
  std::map<effmass::MultiIndex, cplx> c;
  const effmass::LatticeSpec lat = effmass::LatticeSpec::hypercubic(dim);
  const int r1 = dim == 2 ? radius : 0;
  for (int a = -radius; a <= radius; ++a) {
    for (int b = -r1; b <= r1; ++b) {
      const effmass::MultiIndex m{a, b};
      if (c.count(m) || (a == 0 && b == 0)) continue;
      const cplx v = std::polar(mag(rng), phase(rng));
      c[m] = v;
      c[{-a, -b}] = std::conj(v);
    }
  }
  return {lat, std::move(c)};
}

inline Eigen::VectorXd kvec(double k) { return Eigen::VectorXd::Constant(1, k); }
inline Eigen::VectorXd kvec(double k1, double k2) { return (Eigen::VectorXd(2) << k1, k2).finished(); }

inline double band_energy(const effmass::PlaneWaveBasis& basis, const effmass::FourierPotential& v,
                          const Eigen::VectorXd& k, int band) {
  return effmass::solve_cell(basis, v, k).energies[band - 1];
}

/// Eigenvector at k rotated to maximize overlap with `ref` (phase alignment).
inline Eigen::VectorXcd aligned_vector(const effmass::PlaneWaveBasis& basis, const effmass::FourierPotential& v,
                                       const Eigen::VectorXd& k, int band, const Eigen::VectorXcd& ref) {
  Eigen::VectorXcd c = effmass::solve_cell(basis, v, k).vectors.col(band - 1);
  const cplx o = c.dot(ref);  // <c, ref>
  return c * (o / std::abs(o));
}

}  // namespace testing_support
