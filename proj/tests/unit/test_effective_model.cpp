#include "effmass/effective_model.hpp"
#include "effmass/errors.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace effmass;
using namespace testing_support;

namespace {
constexpr double pi = std::numbers::pi;
const LatticeSpec line = LatticeSpec::hypercubic(1);
const LatticeSpec square = LatticeSpec::hypercubic(2);

EffectiveModel model_for(const PlaneWaveBasis& b, const FourierPotential& v, const Eigen::VectorXd& k, int band = 1,
                         double kappa = 1.0, int sigma = 1, double h = 1.0) {
  const auto s = solve_cell(b, v, k);
  return build_effective_model(s.pair(band), band_derivatives(s, band, b), b, kappa, sigma, h);
}
}  // namespace

TEST_CASE("free potential reproduces the free NLS") {
  for (int d : {1, 2}) {
    const auto lat = LatticeSpec::hypercubic(d);
    const auto b = build_basis(lat, d == 1 ? 8 : 4);
    const Eigen::VectorXd k = Eigen::VectorXd::Zero(d);
    for (int sigma : {1, 2}) {
      const auto m = model_for(b, FourierPotential::zero(lat), k, 1, 0.7, sigma, 0.5);
      CHECK((m.mass - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(std::abs(m.kappa_eff - 0.7) <= 1e-12);
      CHECK(m.omega.cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(std::abs(m.beta) <= 1e-12);
      CHECK(m.elliptic);
    }
  }
}

TEST_CASE("free particle away from k = 0 moves with velocity k") {
  const auto b = build_basis(line, 8);
  const auto m = model_for(b, FourierPotential::zero(line), kvec(0.7), 1, 1.0, 1, 2.0);
  CHECK(m.omega[0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(m.energy == doctest::Approx(0.245).epsilon(1e-12));
  CHECK(m.beta == doctest::Approx(-0.49).epsilon(1e-12));
}

TEST_CASE("cosine potential constants") {
  const auto b = build_basis(line, 32);
  const auto m = model_for(b, FourierPotential::cosine(line, 1.0), kvec(0.0));
  CHECK(m.energy == doctest::Approx(-0.0253019209992).epsilon(1e-10));
  CHECK(m.mass(0, 0) == doctest::Approx(0.994889757376).epsilon(1e-9));
  CHECK(m.kappa_eff == doctest::Approx(1.00511188489).epsilon(1e-9));
  CHECK(std::abs(m.omega[0]) <= 1e-12);
}

TEST_CASE("effective coupling agrees with a finite-difference eigenvector") {
  const auto b = build_basis(line, 32);
  for (double amp : {1.0, 5.0}) {
    const auto m = model_for(b, FourierPotential::cosine(line, amp), kvec(0.0));
    const auto st = oracle::fd_cell_ground_state([amp](double y) { return amp * std::cos(2 * pi * y); }, 0.0, 8192);
    double s2 = 0.0, s4 = 0.0;
    for (const auto& v : st.values) {
      s2 += std::norm(v);
      s4 += std::norm(v) * std::norm(v);
    }
    const double n = static_cast<double>(st.values.size());
    const double ratio = (s4 / n) / std::pow(s2 / n, 2);
    CHECK(std::abs(m.kappa_eff - ratio) <= 1e-6);
  }
}

TEST_CASE("Cauchy-Schwarz lower bound on the effective coupling (property)") {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const int d = seed % 2 == 0 ? 1 : 2;
    const auto b = build_basis(LatticeSpec::hypercubic(d), d == 1 ? 12 : 4);
    const Eigen::VectorXd k = Eigen::VectorXd::Constant(d, 0.1 * seed);
    for (int sigma : {1, 2}) {
      const auto m = model_for(b, random_potential(seed, d, d == 1 ? 2 : 1, 1.5), k, 1, 2.0, sigma);
      CHECK(m.kappa_eff / m.kappa >= 1.0 - 1e-12);
    }
  }
}

TEST_CASE("ellipticity") {
  SUBCASE("matrix checks") {
    CHECK(check_ellipticity(Eigen::MatrixXd::Identity(2, 2)).elliptic);
    Eigen::MatrixXd saddle(2, 2);
    saddle << 1.0, 0.0, 0.0, -1.0;
    const auto e = check_ellipticity(saddle);
    CHECK_FALSE(e.elliptic);
    CHECK(e.smallest == doctest::Approx(-1.0));
    CHECK_FALSE(check_ellipticity(Eigen::MatrixXd::Zero(1, 1)).elliptic);
    CHECK_THROWS_AS(check_ellipticity(Eigen::MatrixXd::Zero(2, 3)), DimensionMismatch);
  }
  SUBCASE("second band at the zone centre curves downward") {
    const auto b = build_basis(line, 16);
    const auto m = model_for(b, FourierPotential::cosine(line, 1.0), kvec(0.0), 2);
    CHECK(m.mass(0, 0) < 0.0);
    CHECK_FALSE(m.elliptic);
  }
  SUBCASE("ground band minimum is elliptic for random potentials") {
    const auto b = build_basis(line, 12);
    for (unsigned seed = 0; seed < 5; ++seed) {
      CHECK(model_for(b, FourierPotential::cosine(line, 0.5 + seed), kvec(0.0)).elliptic);
    }
  }
}

TEST_CASE("constants do not depend on the eigenvector phase") {
  const auto b = build_basis(square, 4);
  const auto v = random_potential(11, 2, 1, 1.0);
  const auto s = solve_cell(b, v, kvec(0.2, 0.5));
  const auto der = band_derivatives(s, 1, b);
  auto pair = s.pair(1);
  const auto ref = build_effective_model(pair, der, b, 1.0, 1, 1.0);
  pair.coeffs *= std::polar(1.0, 1.234);
  const auto rot = build_effective_model(pair, der, b, 1.0, 1, 1.0);
  CHECK(std::abs(rot.kappa_eff - ref.kappa_eff) <= 1e-13);
  CHECK(rot.mass == ref.mass);
}

TEST_CASE("quadrature is exact at the default size") {
  const auto b = build_basis(line, 10);
  const auto s = solve_cell(b, random_potential(4), kvec(0.3));
  for (int sigma : {1, 2, 3}) {
    const int p = default_quadrature_points(b, sigma);
    CHECK(p > (2 * sigma + 2) * 10);
    const double a = cell_moment(s.pair(1), b, sigma, p);
    const double c = cell_moment(s.pair(1), b, sigma, 2 * p);
    CHECK(std::abs(a - c) <= 1e-13);
  }
  CHECK_THROWS_AS(cell_moment(s.pair(1), b, 0, 16), Error);
}

TEST_CASE("model JSON round trip") {
  const auto b = build_basis(square, 3);
  const auto m = model_for(b, random_potential(2, 2, 1, 1.0), kvec(0.1, -0.3), 1, 1.5, 2, 0.8);
  const auto r = model_from_json(nlohmann::json::parse(model_to_json(m).dump()));
  CHECK(r.band == m.band);
  CHECK(r.k0 == m.k0);
  CHECK(r.energy == m.energy);
  CHECK(r.beta == m.beta);
  CHECK(r.omega == m.omega);
  CHECK(r.mass == m.mass);
  CHECK(r.kappa_eff == m.kappa_eff);
  CHECK(r.sigma == 2);
  CHECK(r.h == 0.8);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"band":1})")), ConfigError);
}
