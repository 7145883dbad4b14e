#include "effmass/cell_spectral.hpp"

#include "effmass/errors.hpp"
#include "effmass/fft.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace effmass {

BlochMatrix assemble_bloch_matrix(const PlaneWaveBasis& basis, const FourierPotential& potential,
                                  const Eigen::VectorXd& k) {
  if (basis.dim() != potential.dim() || k.size() != basis.dim()) {
    throw DimensionMismatch("basis, potential and quasimomentum dimensions differ");
  }
  if (!basis.lattice().in_brillouin_zone(k)) {
    throw Error("quasimomentum outside the closed Brillouin zone");
  }
  const Eigen::Index n = basis.size();
  const auto& idx = basis.indices();
  Eigen::MatrixXcd a(n, n);
  const cplx v0 = potential.coefficient({0, 0});
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd gk = basis.vectors().row(i).transpose() + k;
    a(i, i) = 0.5 * gk.squaredNorm() + v0.real();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const cplx v = potential.coefficient(idx[i] - idx[j]);
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  }
  return {std::move(a), k};
}

void fix_gauge(Eigen::Ref<Eigen::VectorXcd> v) {
  const double vmax = v.cwiseAbs().maxCoeff();
  if (vmax == 0.0) return;
  Eigen::Index pick = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= vmax * (1.0 - 1e-10)) {
      pick = i;
      break;
    }
  }
  const cplx phase = std::conj(v[pick]) / std::abs(v[pick]);
  v *= phase;
  v[pick] = cplx{std::abs(v[pick]), 0.0};
}

CellSpectrum solve_cell(const BlochMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.matrix);
  if (es.info() != Eigen::Success) throw EigenSolverError("Hermitian eigensolver did not converge");
  CellSpectrum s{a.k, es.eigenvalues(), es.eigenvectors()};
  for (Eigen::Index j = 0; j < s.vectors.cols(); ++j) {
    s.vectors.col(j).normalize();
    fix_gauge(s.vectors.col(j));
  }
  return s;
}

CellSpectrum solve_cell(const PlaneWaveBasis& basis, const FourierPotential& potential, const Eigen::VectorXd& k) {
  return solve_cell(assemble_bloch_matrix(basis, potential, k));
}

std::vector<BlochEigenpair> solve_bands(const BlochMatrix& a, int n_max) {
  if (n_max < 1 || n_max > a.matrix.rows()) throw Error("requested band count exceeds the basis size");
  const CellSpectrum s = solve_cell(a);
  std::vector<BlochEigenpair> out;
  out.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) out.push_back(s.pair(n));
  return out;
}

BlochEigenpair CellSpectrum::pair(int band) const {
  if (band < 1 || band > size()) throw Error("band index out of range");
  return {band, k, energies[band - 1], vectors.col(band - 1)};
}

double CellSpectrum::relative_gap(int band) const {
  const Eigen::Index i = band - 1;
  double gap = std::numeric_limits<double>::infinity();
  if (i > 0) gap = std::min(gap, std::abs(energies[i] - energies[i - 1]));
  if (i + 1 < size()) gap = std::min(gap, std::abs(energies[i + 1] - energies[i]));
  return gap / std::max(1.0, std::abs(energies[i]));
}

void CellSpectrum::require_simple(int band) const {
  if (band < 1 || band > size()) throw Error("band index out of range");
  const double g = relative_gap(band);
  if (g < kSimpleGapTolerance) throw DegenerateBand(band, g);
}

Eigen::VectorXcd apply_momentum(const PlaneWaveBasis& basis, const Eigen::VectorXd& k, int axis,
                                const Eigen::VectorXcd& c) {
  return ((basis.vectors().col(axis).array() + k[axis]) * c.array()).matrix();
}

Eigen::VectorXd grad_E(const BlochEigenpair& pair, const PlaneWaveBasis& basis) {
  const int d = basis.dim();
  Eigen::VectorXd g(d);
  for (int j = 0; j < d; ++j) {
    const cplx q = pair.coeffs.dot(apply_momentum(basis, pair.k, j, pair.coeffs));
    if (std::abs(q.imag()) > 1e-12) throw Error("momentum expectation is not real");
    g[j] = q.real();
  }
  return g;
}

std::vector<Eigen::VectorXcd> dk_chi(const CellSpectrum& spectrum, int band, const PlaneWaveBasis& basis) {
  spectrum.require_simple(band);
  const BlochEigenpair p = spectrum.pair(band);
  const Eigen::VectorXd g = grad_E(p, basis);
  const Eigen::Index n = band - 1;
  Eigen::VectorXd inv_gap = (spectrum.energies.array() - p.energy).matrix();
  for (Eigen::Index m = 0; m < inv_gap.size(); ++m) inv_gap[m] = m == n ? 0.0 : 1.0 / inv_gap[m];

  std::vector<Eigen::VectorXcd> out;
  for (int j = 0; j < basis.dim(); ++j) {
    // (H - E) d_j chi = -(P_j - d_j E) chi
    const Eigen::VectorXcd rhs = -(apply_momentum(basis, p.k, j, p.coeffs) - g[j] * p.coeffs);
    Eigen::VectorXcd proj = spectrum.vectors.adjoint() * rhs;
    proj.array() *= inv_gap.array().cast<cplx>();
    Eigen::VectorXcd u = spectrum.vectors * proj;
    u -= p.coeffs.dot(u) * p.coeffs;
    out.push_back(std::move(u));
  }
  return out;
}

Eigen::MatrixXd hessian_E(const BlochEigenpair& pair, const Eigen::VectorXd& gradient,
                          const std::vector<Eigen::VectorXcd>& dk, const PlaneWaveBasis& basis) {
  const int d = basis.dim();
  if (static_cast<int>(dk.size()) != d || gradient.size() != d) throw DimensionMismatch("derivative data has wrong size");
  std::vector<Eigen::VectorXcd> p_chi;
  for (int j = 0; j < d; ++j) p_chi.push_back(apply_momentum(basis, pair.k, j, pair.coeffs));
  // d_l d_j E = delta_jl + 2 Re <chi, P_j d_l chi> - 2 d_j E Re <chi, d_l chi>
  Eigen::MatrixXd h(d, d);
  for (int j = 0; j < d; ++j) {
    for (int l = 0; l < d; ++l) {
      const cplx cross = p_chi[j].dot(dk[l]);
      const cplx overlap = pair.coeffs.dot(dk[l]);
      h(j, l) = (j == l ? 1.0 : 0.0) + 2.0 * cross.real() - 2.0 * gradient[j] * overlap.real();
    }
  }
  const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) throw Error("Hessian asymmetry " + std::to_string(asym) + " exceeds 1e-10");
  return 0.5 * (h + h.transpose());
}

std::vector<cplx> cell_samples(const PlaneWaveBasis& basis, const Eigen::VectorXcd& coeffs, std::size_t points) {
  if (coeffs.size() != basis.size()) throw DimensionMismatch("coefficient vector does not match the basis");
  if (points == 0) throw Error("cell grid needs at least one point");
  const int d = basis.dim();
  FftPlan plan(d, points);
  auto buf = plan.data();
  const auto p = static_cast<long>(points);
  const auto wrap = [p](int m) { return static_cast<std::size_t>(((m % p) + p) % p); };
  for (Eigen::Index i = 0; i < basis.size(); ++i) {
    const MultiIndex& m = basis.indices()[static_cast<std::size_t>(i)];
    const std::size_t q = d == 1 ? wrap(m[0]) : wrap(m[0]) * points + wrap(m[1]);
    buf[q] += coeffs[i];
  }
  // FFTW's backward transform carries exp(+i ...), which is the synthesis we want.
  plan.backward();
  return {buf.begin(), buf.end()};
}

BandDerivatives band_derivatives(const CellSpectrum& spectrum, int band, const PlaneWaveBasis& basis) {
  const BlochEigenpair p = spectrum.pair(band);
  BandDerivatives out;
  out.gradient = grad_E(p, basis);
  out.dk_chi = dk_chi(spectrum, band, basis);
  out.hessian = hessian_E(p, out.gradient, out.dk_chi, basis);
  return out;
}

}  // namespace effmass
