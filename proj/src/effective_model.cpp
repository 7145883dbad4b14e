#include "effmass/effective_model.hpp"

#include "effmass/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace effmass {

using nlohmann::json;

EllipticityCheck check_ellipticity(const Eigen::MatrixXd& mass) {
  if (mass.rows() != mass.cols() || mass.rows() == 0) throw DimensionMismatch("mass tensor must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mass, Eigen::EigenvaluesOnly);
  const double smallest = es.eigenvalues().minCoeff();
  return {smallest > 1e-10, smallest};
}

int default_quadrature_points(const PlaneWaveBasis& basis, int sigma) {
  // |chi|^(2 sigma + 2) is a trigonometric polynomial of degree (2 sigma + 2) M.
  const int m = basis.cutoff();
  return std::max(4 * m + 4, (2 * sigma + 2) * m + 1);
}

double cell_moment(const BlochEigenpair& pair, const PlaneWaveBasis& basis, int sigma, int points) {
  if (sigma < 1) throw Error("sigma must be a positive integer");
  if (points < 1) throw Error("quadrature needs at least one point per axis");
  const auto vals = cell_samples(basis, pair.coeffs, static_cast<std::size_t>(points));
  double s = 0.0;
  for (const auto& v : vals) s += std::pow(std::norm(v), sigma + 1);
  return s / static_cast<double>(vals.size());
}

EffectiveModel build_effective_model(const BlochEigenpair& pair, const BandDerivatives& derivs,
                                     const PlaneWaveBasis& basis, double kappa, int sigma, double h,
                                     int quadrature_points) {
  if (!(h > 0.0)) throw Error("h must be positive");
  if (sigma < 1) throw Error("sigma must be a positive integer");
  const int d = basis.dim();
  if (pair.k.size() != d || derivs.gradient.size() != d || derivs.hessian.rows() != d) {
    throw DimensionMismatch("band data does not match the basis dimension");
  }
  const int points = quadrature_points > 0 ? quadrature_points : default_quadrature_points(basis, sigma);
  EffectiveModel m;
  m.band = pair.band;
  m.k0 = pair.k;
  m.energy = pair.energy;
  m.beta = -h * pair.energy;
  m.omega = derivs.gradient;
  m.mass = derivs.hessian;
  m.kappa = kappa;
  m.kappa_eff = kappa * cell_moment(pair, basis, sigma, points);
  m.sigma = sigma;
  m.h = h;
  const auto e = check_ellipticity(m.mass);
  m.elliptic = e.elliptic;
  m.ellipticity = e.smallest;
  return m;
}

namespace {
json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}
}  // namespace

json model_to_json(const EffectiveModel& m) {
  json mass = json::array();
  for (Eigen::Index i = 0; i < m.mass.rows(); ++i) mass.push_back(vec_json(m.mass.row(i).transpose()));
  return {{"band", m.band},
          {"k0", vec_json(m.k0)},
          {"energy", m.energy},
          {"beta", m.beta},
          {"omega", vec_json(m.omega)},
          {"mass", mass},
          {"kappa", m.kappa},
          {"kappa_eff", m.kappa_eff},
          {"sigma", m.sigma},
          {"h", m.h},
          {"elliptic", m.elliptic},
          {"ellipticity", m.ellipticity}};
}

EffectiveModel model_from_json(const json& j) {
  EffectiveModel m;
  try {
    m.band = j.at("band").get<int>();
    m.k0 = vec_from(j.at("k0"));
    m.energy = j.at("energy").get<double>();
    m.beta = j.at("beta").get<double>();
    m.omega = vec_from(j.at("omega"));
    const auto& rows = j.at("mass");
    const auto d = static_cast<Eigen::Index>(rows.size());
    m.mass.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) m.mass.row(i) = vec_from(rows[static_cast<std::size_t>(i)]).transpose();
    m.kappa = j.at("kappa").get<double>();
    m.kappa_eff = j.at("kappa_eff").get<double>();
    m.sigma = j.at("sigma").get<int>();
    m.h = j.at("h").get<double>();
    m.elliptic = j.at("elliptic").get<bool>();
    m.ellipticity = j.at("ellipticity").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed effective model: ") + e.what());
  }
  if (m.k0.size() != m.omega.size() || m.mass.rows() != m.k0.size()) {
    throw ConfigError("effective model fields have inconsistent dimensions");
  }
  return m;
}

}  // namespace effmass
