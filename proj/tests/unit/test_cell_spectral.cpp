#include "effmass/cell_spectral.hpp"
#include "effmass/errors.hpp"
#include "effmass/potential_io.hpp"
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
}  // namespace

TEST_CASE("lattice reciprocal generators are dual to the cell generators") {
  Eigen::MatrixXd z(2, 2);
  z << 1.0, 0.5, 0.0, 0.8;
  const LatticeSpec oblique(z);
  CHECK(std::abs(oblique.generators().determinant()) == doctest::Approx(1.0).epsilon(1e-14));
  const Eigen::MatrixXd dual = oblique.generators().transpose() * oblique.reciprocal();
  CHECK((dual - 2.0 * pi * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK_THROWS_AS(LatticeSpec(Eigen::MatrixXd::Zero(2, 2)), DimensionMismatch);
  CHECK(line.in_brillouin_zone(kvec(pi)));
  CHECK_FALSE(line.in_brillouin_zone(kvec(pi + 1e-6)));
}

TEST_CASE("plane-wave basis ordering") {
  const auto b = build_basis(line, 2);
  REQUIRE(b.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(b.vectors()(i, 0) == doctest::Approx(2.0 * pi * (i - 2)));
  const auto b2 = build_basis(square, 1);
  CHECK(b2.size() == 9);
  CHECK(b2.find({0, 0}) >= 0);
  const auto b32 = build_basis(line, 32);
  CHECK(b32.size() == 65);
  for (Eigen::Index i = 0; i < b32.size(); ++i) CHECK(b32.vectors()(i, 0) == -b32.vectors()(64 - i, 0));
}

TEST_CASE("Bloch matrix assembly") {
  SUBCASE("free particle at k = 0") {
    const auto a = assemble_bloch_matrix(build_basis(line, 1), FourierPotential::zero(line), kvec(0.0)).matrix;
    Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(3, 3);
    expect(0, 0) = expect(2, 2) = 2.0 * pi * pi;
    CHECK((a - expect).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("cosine potential is tridiagonal with 1/2 off the diagonal") {
    const auto a = assemble_bloch_matrix(build_basis(line, 3), FourierPotential::cosine(line, 1.0), kvec(0.0)).matrix;
    for (int i = 0; i < 7; ++i) {
      for (int j = 0; j < 7; ++j) {
        if (i == j) continue;
        CHECK(std::abs(a(i, j) - (std::abs(i - j) == 1 ? 0.5 : 0.0)) == 0.0);
      }
    }
  }
  SUBCASE("shifted kinetic symbol") {
    const auto b = build_basis(line, 2);
    const auto a = assemble_bloch_matrix(b, FourierPotential::zero(line), kvec(0.3)).matrix;
    for (int i = 0; i < 5; ++i) CHECK(a(i, i).real() == doctest::Approx(0.5 * std::pow(2 * pi * (i - 2) + 0.3, 2)));
  }
  SUBCASE("Hermitian for random complex potentials") {
    for (unsigned s = 0; s < 5; ++s) {
      const auto a = assemble_bloch_matrix(build_basis(square, 3), random_potential(s, 2), kvec(0.4, -1.1)).matrix;
      CHECK((a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(assemble_bloch_matrix(build_basis(line, 2), FourierPotential::zero(square), kvec(0.0)),
                    DimensionMismatch);
    CHECK_THROWS_AS(assemble_bloch_matrix(build_basis(line, 2), FourierPotential::zero(line), kvec(4.0)), Error);
  }
}

TEST_CASE("solve_bands on the free particle") {
  const auto b = build_basis(line, 4);
  const auto pairs = solve_bands(assemble_bloch_matrix(b, FourierPotential::zero(line), kvec(0.0)), 3);
  CHECK(std::abs(pairs[0].energy) <= 1e-12);
  CHECK(std::abs(pairs[0].coeffs[b.find({0, 0})] - 1.0) <= 1e-12);
  CHECK(pairs[1].energy == doctest::Approx(2 * pi * pi).epsilon(1e-12));
  CHECK(pairs[2].energy == doctest::Approx(2 * pi * pi).epsilon(1e-12));
  const auto s = solve_cell(b, FourierPotential::zero(line), kvec(0.0));
  CHECK_NOTHROW(s.require_simple(1));
  CHECK_THROWS_AS(s.require_simple(2), DegenerateBand);
  CHECK_THROWS_AS(dk_chi(s, 2, b), DegenerateBand);
}

TEST_CASE("cosine ground energy agrees with the finite-difference cell oracle") {
  const auto b = build_basis(line, 32);
  const double e = band_energy(b, FourierPotential::cosine(line, 1.0), kvec(0.0), 1);
  const double ref =
      oracle::fd_cell_ground_energy_richardson([](double y) { return std::cos(2.0 * pi * y); }, 0.0, 4096);
  CHECK(std::abs(e - ref) <= 1e-6);
  CHECK(e == doctest::Approx(-0.0253019209992).epsilon(1e-10));
}

TEST_CASE("band symmetry, normalization and gauge") {
  const auto b = build_basis(line, 12);
  for (unsigned seed = 0; seed < 4; ++seed) {
    const auto v = random_potential(seed);
    for (double k : {0.3, 1.7, 2.9}) {
      const auto sp = solve_cell(b, v, kvec(k));
      const auto sm = solve_cell(b, v, kvec(-k));
      for (int n = 0; n < 4; ++n) CHECK(std::abs(sp.energies[n] - sm.energies[n]) <= 1e-10);
      for (int n = 1; n < sp.size(); ++n) CHECK(sp.energies[n] >= sp.energies[n - 1]);
      for (int n = 1; n <= 3; ++n) {
        const auto p = sp.pair(n);
        CHECK(std::abs(p.coeffs.squaredNorm() - 1.0) <= 1e-12);
        Eigen::Index imax = 0;
        p.coeffs.cwiseAbs().maxCoeff(&imax);
        CHECK(p.coeffs[imax].imag() == 0.0);
        CHECK(p.coeffs[imax].real() > 0.0);
      }
    }
  }
}

TEST_CASE("gauge determinism: repeated solves are bitwise identical") {
  const auto b = build_basis(square, 3);
  const auto v = random_potential(7, 2);
  const auto a = solve_cell(b, v, kvec(0.2, -0.4));
  const auto c = solve_cell(b, v, kvec(0.2, -0.4));
  CHECK(a.vectors == c.vectors);
  CHECK(a.energies == c.energies);
}

TEST_CASE("Galerkin energies converge spectrally") {
  const auto v = FourierPotential::cosine(line, 400.0);
  const auto e = [&](int m) { return band_energy(build_basis(line, m), v, kvec(0.0), 1); };
  const double ref = e(64);
  const double d4 = std::abs(e(4) - ref), d8 = std::abs(e(8) - ref), d12 = std::abs(e(12) - ref);
  CHECK(d4 > 0.0);
  CHECK(d4 >= 10.0 * d8);
  CHECK(d8 >= 10.0 * d12);
}

TEST_CASE("group velocity") {
  const auto b = build_basis(line, 16);
  SUBCASE("even potential at k = 0") {
    const auto s = solve_cell(b, FourierPotential::cosine(line, 1.3), kvec(0.0));
    CHECK(std::abs(grad_E(s.pair(1), b)[0]) <= 1e-12);
  }
  SUBCASE("free particle") {
    const auto s = solve_cell(b, FourierPotential::zero(line), kvec(0.5));
    CHECK(grad_E(s.pair(1), b)[0] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("cosine potential against centered differences") {
    const auto v = FourierPotential::cosine(line, 1.0);
    const double d = 1e-4;
    const double fd = (band_energy(b, v, kvec(1.0 + d), 1) - band_energy(b, v, kvec(1.0 - d), 1)) / (2 * d);
    const auto s = solve_cell(b, v, kvec(1.0));
    CHECK(std::abs(grad_E(s.pair(1), b)[0] - fd) <= 1e-6);
  }
}

TEST_CASE("k-derivative of the Bloch wave") {
  const auto b = build_basis(line, 16);
  SUBCASE("free particle has a k-independent ground state") {
    const auto s = solve_cell(b, FourierPotential::zero(line), kvec(0.4));
    CHECK(dk_chi(s, 1, b)[0].norm() <= 1e-14);
  }
  SUBCASE("orthogonal to the Bloch wave") {
    for (unsigned seed = 0; seed < 5; ++seed) {
      const auto s = solve_cell(b, random_potential(seed), kvec(0.9));
      for (int n = 1; n <= 2; ++n) {
        const auto d = dk_chi(s, n, b);
        CHECK(std::abs(s.vectors.col(n - 1).dot(d[0])) <= 1e-12);
      }
    }
  }
  SUBCASE("cosine potential against phase-aligned finite differences") {
    const auto v = FourierPotential::cosine(line, 1.0);
    const auto s = solve_cell(b, v, kvec(0.0));
    const Eigen::VectorXcd chi = s.vectors.col(0);
    const double d = 1e-4;
    const Eigen::VectorXcd fd =
        (aligned_vector(b, v, kvec(d), 1, chi) - aligned_vector(b, v, kvec(-d), 1, chi)) / (2 * d);
    CHECK((dk_chi(s, 1, b)[0] - fd).norm() <= 1e-5);
  }
}

TEST_CASE("Hessian of the band") {
  SUBCASE("free particle") {
    const auto b = build_basis(line, 8);
    const auto d = band_derivatives(solve_cell(b, FourierPotential::zero(line), kvec(0.0)), 1, b);
    CHECK(d.hessian(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("cosine potential against second differences") {
    const auto b = build_basis(line, 16);
    const auto v = FourierPotential::cosine(line, 1.0);
    const double d = 1e-3;
    const double fd =
        (band_energy(b, v, kvec(d), 1) - 2 * band_energy(b, v, kvec(0), 1) + band_energy(b, v, kvec(-d), 1)) / (d * d);
    const auto der = band_derivatives(solve_cell(b, v, kvec(0.0)), 1, b);
    CHECK(std::abs(der.hessian(0, 0) - fd) <= 1e-5);
  }
  SUBCASE("separable square-lattice potential gives an isotropic diagonal Hessian") {
    const auto b = build_basis(square, 6);
    const auto der = band_derivatives(solve_cell(b, FourierPotential::cosine(square, 1.0), kvec(0.0, 0.0)), 1, b);
    CHECK(std::abs(der.hessian(0, 1)) <= 1e-12);
    CHECK(der.hessian(0, 0) == doctest::Approx(der.hessian(1, 1)).epsilon(1e-12));
    CHECK((der.hessian - der.hessian.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("random potentials against finite differences (property)") {
    const auto b = build_basis(line, 16);
    for (unsigned seed = 100; seed < 110; ++seed) {
      const auto v = random_potential(seed);
      const double d = 1e-3;
      const double fd =
          (band_energy(b, v, kvec(d), 1) - 2 * band_energy(b, v, kvec(0), 1) + band_energy(b, v, kvec(-d), 1)) /
          (d * d);
      const auto der = band_derivatives(solve_cell(b, v, kvec(0.0)), 1, b);
      CHECK(std::abs(der.hessian(0, 0) - fd) <= 1e-5);
    }
  }
  SUBCASE("two-dimensional random potential, full matrix") {
    const auto b = build_basis(square, 5);
    const auto v = random_potential(3, 2, 1, 1.0);
    const Eigen::VectorXd k0 = kvec(0.3, -0.2);
    const auto der = band_derivatives(solve_cell(b, v, k0), 1, b);
    const double d = 1e-3;
    for (int j = 0; j < 2; ++j) {
      for (int l = 0; l < 2; ++l) {
        Eigen::VectorXd ej = Eigen::VectorXd::Zero(2), el = Eigen::VectorXd::Zero(2);
        ej[j] = d;
        el[l] = d;
        const double fd = (band_energy(b, v, k0 + ej + el, 1) - band_energy(b, v, k0 + ej - el, 1) -
                           band_energy(b, v, k0 - ej + el, 1) + band_energy(b, v, k0 - ej - el, 1)) /
                          (4 * d * d);
        CHECK(std::abs(der.hessian(j, l) - fd) <= 1e-5);
      }
    }
  }
}

TEST_CASE("cell samples match direct Fourier summation") {
  const auto b = build_basis(square, 2);
  const auto s = solve_cell(b, random_potential(5, 2, 1, 1.0), kvec(0.1, 0.2));
  const Eigen::VectorXcd c = s.vectors.col(0);
  for (std::size_t pts : {3u, 8u}) {
    const auto vals = cell_samples(b, c, pts);
    for (std::size_t i = 0; i < pts; ++i) {
      for (std::size_t j = 0; j < pts; ++j) {
        cplx direct = 0.0;
        for (Eigen::Index q = 0; q < b.size(); ++q) {
          const auto& m = b.indices()[static_cast<std::size_t>(q)];
          direct += c[q] * std::polar(1.0, 2 * pi * (m[0] * double(i) + m[1] * double(j)) / double(pts));
        }
        CHECK(std::abs(vals[i * pts + j] - direct) <= 1e-13);
      }
    }
  }
}

TEST_CASE("potential JSON input") {
  const auto j = nlohmann::json::parse(R"({"type":"fourier","coefficients":{"1":[0.5,0],"-1":[0.5,0]}})");
  const auto v = potential_from_json(line, j);
  CHECK(v.coefficient({1, 0}) == cplx(0.5, 0.0));
  CHECK(v(Eigen::VectorXd::Constant(1, 0.25)) == doctest::Approx(0.0).epsilon(1e-15));
  const auto back = potential_from_json(line, potential_to_json(v));
  CHECK(back.coefficients() == v.coefficients());
  const auto laser = FourierPotential::laser(line, 2.0);
  CHECK(laser(Eigen::VectorXd::Constant(1, 0.5)) == doctest::Approx(2.0));
  CHECK(laser(Eigen::VectorXd::Constant(1, 0.0)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(potential_from_json(line, nlohmann::json::parse(R"({"type":"fourier","coefficients":{"1":[1,0]}})")),
                  Error);
  CHECK_THROWS_AS(parse_multi_index("1,x", 2), ConfigError);
  CHECK(parse_multi_index("-2,3", 2) == MultiIndex{-2, 3});
}
