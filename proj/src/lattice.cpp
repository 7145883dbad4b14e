#include "effmass/lattice.hpp"

#include "effmass/errors.hpp"

#include <cmath>
#include <numbers>

namespace effmass {

LatticeSpec::LatticeSpec(const Eigen::MatrixXd& generators) {
  const auto d = generators.rows();
  if (d < 1 || d > 2 || generators.cols() != d) {
    throw DimensionMismatch("lattice generators must form a d x d matrix with d in {1, 2}");
  }
  const double det = generators.determinant();
  if (!(std::abs(det) > 1e-12)) {
    throw DimensionMismatch("lattice generators are linearly dependent");
  }
  generators_ = generators / std::pow(std::abs(det), 1.0 / static_cast<double>(d));
  reciprocal_ = 2.0 * std::numbers::pi * generators_.inverse().transpose();
}

LatticeSpec LatticeSpec::hypercubic(int dim) { return LatticeSpec(Eigen::MatrixXd::Identity(dim, dim)); }

bool LatticeSpec::is_unit_hypercubic() const {
  return (generators_ - Eigen::MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff() < 1e-14;
}

Eigen::VectorXd LatticeSpec::reciprocal_vector(const MultiIndex& m) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim());
  for (int j = 0; j < dim(); ++j) g += static_cast<double>(m[j]) * reciprocal_.col(j);
  return g;
}

Eigen::VectorXd LatticeSpec::reduced_momentum(const Eigen::VectorXd& k) const {
  if (k.size() != dim()) throw DimensionMismatch("quasimomentum has wrong dimension");
  // zeta_l . k = 2 pi kappa_l
  return generators_.transpose() * k / (2.0 * std::numbers::pi);
}

bool LatticeSpec::in_brillouin_zone(const Eigen::VectorXd& k, double tol) const {
  return reduced_momentum(k).cwiseAbs().maxCoeff() <= 0.5 + tol;
}

FourierPotential::FourierPotential(LatticeSpec lattice, std::map<MultiIndex, cplx> coefficients)
    : lattice_(std::move(lattice)), coeffs_(std::move(coefficients)) {
  for (auto& [m, v] : coeffs_) {
    if (lattice_.dim() == 1 && m[1] != 0) throw DimensionMismatch("2D index in a 1D potential");
    auto it = coeffs_.find(-m);
    const cplx partner = it == coeffs_.end() ? cplx{0.0} : it->second;
    if (std::abs(partner - std::conj(v)) > 1e-12 * std::max(1.0, std::abs(v))) {
      throw Error("potential coefficients violate V(-m) = conj(V(m)); V must be real");
    }
  }
}

FourierPotential FourierPotential::zero(const LatticeSpec& lattice) { return {lattice, {}}; }

FourierPotential FourierPotential::cosine(const LatticeSpec& lattice, double amplitude) {
  std::map<MultiIndex, cplx> c;
  for (int l = 0; l < lattice.dim(); ++l) {
    MultiIndex e{0, 0};
    e[l] = 1;
    c[e] += 0.5 * amplitude;
    c[-e] += 0.5 * amplitude;
  }
  return {lattice, std::move(c)};
}

FourierPotential FourierPotential::laser(const LatticeSpec& lattice, double depth) {
  // sin^2(theta/2) = (1 - cos theta) / 2
  std::map<MultiIndex, cplx> c;
  c[{0, 0}] = 0.5 * depth * lattice.dim();
  for (int l = 0; l < lattice.dim(); ++l) {
    MultiIndex e{0, 0};
    e[l] = 1;
    c[e] -= 0.25 * depth;
    c[-e] -= 0.25 * depth;
  }
  return {lattice, std::move(c)};
}

cplx FourierPotential::coefficient(const MultiIndex& m) const {
  auto it = coeffs_.find(m);
  return it == coeffs_.end() ? cplx{0.0} : it->second;
}

int FourierPotential::support_radius() const {
  int r = 0;
  for (const auto& [m, v] : coeffs_) r = std::max({r, std::abs(m[0]), std::abs(m[1])});
  return r;
}

bool FourierPotential::is_even() const {
  for (const auto& [m, v] : coeffs_) {
    if (std::abs(coefficient(-m) - v) > 1e-14) return false;
  }
  return true;
}

double FourierPotential::operator()(const Eigen::VectorXd& y) const {
  cplx s{0.0};
  for (const auto& [m, v] : coeffs_) {
    s += v * std::polar(1.0, lattice_.reciprocal_vector(m).dot(y));
  }
  return s.real();
}

PlaneWaveBasis::PlaneWaveBasis(LatticeSpec lattice, int cutoff) : lattice_(std::move(lattice)), cutoff_(cutoff) {
  if (cutoff < 1) throw Error("plane-wave cutoff must be >= 1");
  const int d = lattice_.dim();
  if (d == 1) {
    for (int a = -cutoff; a <= cutoff; ++a) indices_.push_back({a, 0});
  } else {
    for (int a = -cutoff; a <= cutoff; ++a)
      for (int b = -cutoff; b <= cutoff; ++b) indices_.push_back({a, b});
  }
  vectors_.resize(static_cast<Eigen::Index>(indices_.size()), d);
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    vectors_.row(static_cast<Eigen::Index>(i)) = lattice_.reciprocal_vector(indices_[i]).transpose();
  }
}

Eigen::Index PlaneWaveBasis::find(const MultiIndex& m) const {
  const int w = 2 * cutoff_ + 1;
  for (int j = 0; j < dim(); ++j) {
    if (std::abs(m[j]) > cutoff_) return -1;
  }
  if (dim() == 1) return m[1] == 0 ? m[0] + cutoff_ : -1;
  return static_cast<Eigen::Index>(m[0] + cutoff_) * w + (m[1] + cutoff_);
}

PlaneWaveBasis build_basis(const LatticeSpec& lattice, int cutoff) { return {lattice, cutoff}; }

}  // namespace effmass
