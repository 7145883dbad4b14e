#include "effmass/correctors.hpp"

#include "effmass/errors.hpp"
#include "effmass/fft.hpp"

#include <cmath>

namespace effmass {

Eigen::VectorXcd fredholm_solve(const Eigen::VectorXcd& rhs, int band, const CellSpectrum& spectrum) {
  if (band < 1 || band > spectrum.size()) throw Error("band index out of range");
  if (rhs.size() != spectrum.vectors.rows()) throw DimensionMismatch("right-hand side does not match the basis");
  const Eigen::Index n = band - 1;
  const double e = spectrum.energies[n];
  Eigen::VectorXcd proj = spectrum.vectors.adjoint() * rhs;
  for (Eigen::Index m = 0; m < spectrum.size(); ++m) {
    if (m == n) {
      proj[m] = 0.0;
      continue;
    }
    const double gap = spectrum.energies[m] - e;
    if (std::abs(gap) < kSimpleGapTolerance) throw DegenerateBand(band, std::abs(gap));
    proj[m] /= gap;
  }
  Eigen::VectorXcd u = spectrum.vectors * proj;
  const Eigen::VectorXcd chi = spectrum.vectors.col(n);
  u -= chi.dot(u) * chi;
  return u;
}

Eigen::VectorXcd nonlinear_cell_coefficients(const PlaneWaveBasis& basis, const Eigen::VectorXcd& chi, int sigma) {
  const int m = basis.cutoff();
  // Degree (2 sigma + 1) M product; P > degree + M keeps |m| <= M alias-free.
  std::size_t points = 1;
  while (points <= static_cast<std::size_t>((2 * sigma + 2) * m)) points *= 2;
  const int d = basis.dim();
  auto vals = cell_samples(basis, chi, points);
  FftPlan plan(d, points);
  auto buf = plan.data();
  for (std::size_t i = 0; i < vals.size(); ++i) buf[i] = std::pow(std::norm(vals[i]), sigma) * vals[i];
  plan.forward();
  const double inv = 1.0 / static_cast<double>(vals.size());
  const auto p = static_cast<long>(points);
  const auto wrap = [p](int k) { return static_cast<std::size_t>(((k % p) + p) % p); };
  Eigen::VectorXcd out(basis.size());
  for (Eigen::Index i = 0; i < basis.size(); ++i) {
    const MultiIndex& mi = basis.indices()[static_cast<std::size_t>(i)];
    const std::size_t q = d == 1 ? wrap(mi[0]) : wrap(mi[0]) * points + wrap(mi[1]);
    out[i] = buf[q] * inv;
  }
  return out;
}

CorrectorCells build_corrector_cells(const CellSpectrum& spectrum, const BandDerivatives& derivs,
                                     const PlaneWaveBasis& basis, const EffectiveModel& model) {
  const int d = basis.dim();
  CorrectorCells c;
  c.band = model.band;
  c.k0 = model.k0;
  c.chi = spectrum.vectors.col(model.band - 1);
  c.first = derivs.dk_chi;
  c.sigma = model.sigma;
  c.kappa = model.kappa;
  c.h = model.h;
  for (int j = 0; j < d; ++j) {
    for (int l = 0; l < d; ++l) {
      const Eigen::VectorXcd r = apply_momentum(basis, model.k0, j, c.first[l]) - model.omega[j] * c.first[l];
      c.second.push_back(fredholm_solve(r, model.band, spectrum));
    }
  }
  c.nonlinear = fredholm_solve(nonlinear_cell_coefficients(basis, c.chi, c.sigma), model.band, spectrum);
  return c;
}

std::vector<CorrectorTerm> build_corrector_u1(const WaveField& f0, const std::vector<Eigen::VectorXcd>& dk) {
  if (static_cast<int>(dk.size()) != f0.grid.dim) throw DimensionMismatch("one cell derivative per axis expected");
  std::vector<CorrectorTerm> out;
  for (int j = 0; j < f0.grid.dim; ++j) {
    std::array<int, 2> order{0, 0};
    order[j] = 1;
    WaveField g = spectral_derivative(f0, order);
    for (auto& v : g.samples) v *= cplx{0.0, -1.0};
    out.push_back({1, std::move(g), dk[static_cast<std::size_t>(j)]});
  }
  return out;
}

CorrectorSet build_correctors(const WaveField& f0, const CorrectorCells& cells, int order) {
  if (order < 0 || order > 2) throw Error("corrector order must be 0, 1 or 2");
  const int d = f0.grid.dim;
  if (cells.k0.size() != d) throw DimensionMismatch("envelope and cell data dimensions differ");
  CorrectorSet set;
  set.order = order;
  set.terms.push_back({0, f0, cells.chi});
  if (order >= 1) {
    for (auto& t : build_corrector_u1(f0, cells.first)) set.terms.push_back(std::move(t));
  }
  if (order >= 2) {
    for (int j = 0; j < d; ++j) {
      for (int l = 0; l < d; ++l) {
        std::array<int, 2> o{0, 0};
        o[j] += 1;
        o[l] += 1;
        set.terms.push_back({2, spectral_derivative(f0, o), cells.second[static_cast<std::size_t>(j * d + l)]});
      }
    }
    WaveField nl(f0.grid, f0.eps);
    const double w = -cells.kappa / (cells.h * cells.h);
    for (std::size_t p = 0; p < nl.samples.size(); ++p) {
      const cplx f = f0.samples[p];
      nl.samples[p] = w * std::pow(std::norm(f), cells.sigma) * f;
    }
    set.terms.push_back({2, std::move(nl), cells.nonlinear});
  }
  return set;
}

std::vector<cplx> cell_on_fine_grid(const PlaneWaveBasis& basis, const Eigen::VectorXcd& cell, const Grid& fine,
                                    double eps) {
  if (!basis.lattice().is_unit_hypercubic()) {
    throw Error("fine-grid evaluation requires the unit hypercubic lattice");
  }
  if (basis.dim() != fine.dim) throw DimensionMismatch("cell basis and grid dimensions differ");
  const long cells = cells_per_box(fine.box, eps);
  const auto table = cell_samples(basis, cell, fine.n);
  // y_j = x_j / eps = (j L - L N / 2) / N in cell units.
  const auto n = static_cast<long>(fine.n);
  std::vector<std::size_t> map(fine.n);
  for (long j = 0; j < n; ++j) {
    const long r = ((j * cells - cells * (n / 2)) % n + n) % n;
    map[static_cast<std::size_t>(j)] = static_cast<std::size_t>(r);
  }
  std::vector<cplx> out(fine.size());
  for (std::size_t p = 0; p < fine.size(); ++p) {
    const auto idx = fine.unflatten(p);
    out[p] = fine.dim == 1 ? table[map[idx[0]]] : table[map[idx[0]] * fine.n + map[idx[1]]];
  }
  return out;
}

WaveField assemble_two_scale(const CorrectorSet& set, const PlaneWaveBasis& basis, const Grid& fine, double eps,
                             const Eigen::VectorXd& k0, const Frame& frame) {
  const int d = fine.dim;
  if (k0.size() != d || frame.shift.size() != d) throw DimensionMismatch("quasimomentum or shift has wrong dimension");
  const long cells = cells_per_box(fine.box, eps);
  WaveField out(fine, eps);
  for (const auto& term : set.terms) {
    const WaveField env = resample(term.envelope, fine, frame.shift);
    const auto cell = cell_on_fine_grid(basis, term.cell, fine, eps);
    const double scale = std::pow(eps, term.power);
    for (std::size_t p = 0; p < fine.size(); ++p) out.samples[p] += scale * env.samples[p] * cell[p];
  }
  const auto n = static_cast<long>(fine.n);
  const double box = fine.box;
  for (std::size_t p = 0; p < fine.size(); ++p) {
    const auto idx = fine.unflatten(p);
    double phase = frame.phase;
    for (int a = 0; a < d; ++a) {
      const auto j = static_cast<long>(idx[a]);
      // x / eps computed in exact integer arithmetic before scaling.
      const double y = static_cast<double>(j * cells - cells * (n / 2)) / static_cast<double>(n);
      const double x = fine.coordinate(idx[a]);
      const double image = -std::floor((x - frame.shift[a] + 0.5 * box) / box);
      phase += k0[a] * (y + image * static_cast<double>(cells));
    }
    out.samples[p] *= std::polar(1.0, phase);
  }
  return out;
}

WaveField build_initial_profile(const WaveField& f_initial, const CorrectorCells& cells, const PlaneWaveBasis& basis,
                                int order, const Grid& fine, double eps) {
  cells_per_box(fine.box, eps);
  const CorrectorSet set = build_correctors(f_initial, cells, order);
  return assemble_two_scale(set, basis, fine, eps, cells.k0, Frame{Eigen::VectorXd::Zero(fine.dim), 0.0});
}

WaveField build_initial_data(const WaveField& f_initial, const CorrectorCells& cells, const PlaneWaveBasis& basis,
                             int order, const Grid& fine, double eps) {
  WaveField psi = build_initial_profile(f_initial, cells, basis, order, fine, eps);
  const double norm = psi.l2_norm();
  if (!(norm > 0.0)) throw Error("initial profile vanishes");
  for (auto& v : psi.samples) v /= norm;
  return psi;
}

}  // namespace effmass
