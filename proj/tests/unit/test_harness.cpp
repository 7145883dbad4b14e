#include "effmass/errors.hpp"
#include "effmass/experiment.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace effmass;
using nlohmann::json;

namespace {
// Small, fast experiment: box 8, two eps values, a short time window.
ExperimentConfig quick_config() {
  ExperimentConfig c = ExperimentConfig::from_json(json::parse(R"({
    "potential": {"type": "cosine", "amplitude": 1.0},
    "eps": [0.25, 0.125],
    "box": 8.0,
    "K": 2, "N": 0,
    "time": {"t_final": 0.05, "snapshots": 2, "cell_step": 0.04, "effective_dt": 1e-3},
    "ys_orders": [0, 1]
  })"));
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("effmass_harness_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}
}  // namespace

TEST_CASE("order estimation") {
  SUBCASE("exact power laws") {
    for (double p : {1.0, 2.0, 0.5}) {
      std::vector<std::pair<double, double>> pts;
      for (double e : {0.1, 0.05, 0.025, 0.0125}) pts.emplace_back(e, 3.0 * std::pow(e, p));
      const auto fit = estimate_order(pts);
      CHECK(fit.slope == doctest::Approx(p).epsilon(1e-12));
      CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
      CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("noisy data lowers R squared") {
    const auto fit = estimate_order({{0.1, 1.0}, {0.05, 0.3}, {0.025, 0.4}, {0.0125, 0.05}});
    CHECK(fit.r2 < 0.98);
  }
  SUBCASE("degenerate input") {
    CHECK_THROWS_AS(estimate_order({{0.1, 1.0}, {0.05, 0.5}}), DegenerateFit);
    CHECK_THROWS_AS(estimate_order({{0.1, 1.0}, {0.1, 0.5}, {0.1, 0.2}}), DegenerateFit);
    CHECK_THROWS_AS(estimate_order({{0.1, 1.0}, {0.05, 0.0}, {0.025, 0.2}}), DegenerateFit);
  }
  SUBCASE("two-point exponent") {
    CHECK(fitted_exponent({{0.0625, 0.4}, {0.03125, 0.1}}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(fitted_exponent({{0.1, 1.0}}), DegenerateFit);
    CHECK_THROWS_AS(fitted_exponent({{0.1, 0.0}, {0.05, 0.0}}), DegenerateFit);
  }
}

TEST_CASE("configuration round trip, hash and validation") {
  const auto c = quick_config();
  CHECK_NOTHROW(c.validate());
  const auto back = ExperimentConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.hash() == c.hash());
  CHECK(c.hash().size() == 16);
  auto d = c;
  d.kappa = 2.0;
  CHECK(d.hash() != c.hash());
  CHECK(c.fine_dt(0.25) == doctest::Approx(0.04 / 16));

  const auto bad = [&](const char* key, const char* value) {
    json j = c.to_json();
    apply_override(j, std::string(key) + "=" + value);
    return ExperimentConfig::from_json(j);
  };
  CHECK_THROWS_AS(bad("K", "3").validate(), ConfigError);
  CHECK_THROWS_AS(bad("N", "3").validate(), ConfigError);
  CHECK_THROWS_AS(bad("k0", "[4.0]").validate(), ConfigError);
  CHECK_THROWS_AS(bad("eps", "[0.125, 0.25]").validate(), ConfigError);
  CHECK_THROWS_AS(bad("eps", "[0.3]").validate(), CommensurabilityError);
  CHECK_THROWS_AS(bad("envelope_points", "100").validate(), ConfigError);
  CHECK_THROWS_AS(bad("time.scheme", "euler"), ConfigError);
  CHECK_THROWS_AS(bad("sigma", "\"two\""), ConfigError);
  CHECK_THROWS_AS(bad("lattice", R"({"generators": [[1.0, 0.0], [0.5, 1.0]]})").validate(), ConfigError);
}

TEST_CASE("overrides") {
  json j = {{"time", {{"t_final", 0.5}}}};
  apply_override(j, "time.t_final=0.25");
  apply_override(j, "eps=[0.5,0.25]");
  apply_override(j, "output=runs/x");
  apply_override(j, "envelope.width=1");
  CHECK(j["time"]["t_final"] == 0.25);
  CHECK(j["eps"].size() == 2);
  CHECK(j["output"] == "runs/x");
  CHECK(j["envelope"]["width"] == 1);
  CHECK_THROWS_AS(apply_override(j, "no_value"), ConfigError);
  CHECK_THROWS_AS(apply_override(j, "=3"), ConfigError);
}

TEST_CASE("config files load, and parse errors are reported") {
  const auto dir = scratch("load");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "ok.json") << quick_config().to_json().dump();
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK(load_config(dir / "ok.json").hash() == quick_config().hash());
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("convergence run on a small configuration") {
  const auto c = quick_config();
  const auto rep = run_convergence(c);
  REQUIRE(rep.rows.size() == 2);
  for (const auto& r : rep.rows) {
    CHECK(r.ok);
    CHECK(r.max_mass_error <= 1e-10);
    CHECK(r.report.samples.size() == 3);
    CHECK(r.report.sup_l2 > 0.0);
    CHECK(r.report.sup_ys.size() == 2);
    CHECK(r.report.sup_ys[0] == doctest::Approx(r.report.sup_l2).epsilon(1e-14));
  }
  CHECK(rep.rows[1].report.sup_l2 < rep.rows[0].report.sup_l2);
  CHECK_FALSE(rep.fit.has_value());  // two points only
  CHECK(rep.effective_mass_error <= 1e-10);

  SUBCASE("threads do not change the numbers") {
    auto t = c;
    t.threads = 2;
    const auto rt = run_convergence(t);
    for (std::size_t i = 0; i < 2; ++i) CHECK(rt.rows[i].report.sup_l2 == rep.rows[i].report.sup_l2);
  }
  SUBCASE("run directory contents are deterministic") {
    const auto a = scratch("run_a"), b = scratch("run_b");
    write_convergence_run(a, c, rep);
    write_convergence_run(b, c, run_convergence(c));
    for (const char* f : {"config.json", "stamp.txt", "convergence.csv", "errors.csv", "mass_fine_0.csv",
                          "mass_fine_1.csv", "mass_effective.csv", "summary.json", "convergence.svg"}) {
      CHECK_MESSAGE(std::filesystem::exists(a / f), f);
    }
    for (const char* f : {"convergence.csv", "errors.csv", "mass_fine_0.csv", "config.json"}) {
      CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    }
    const auto header = slurp(a / "errors.csv").substr(0, 30);
    CHECK(header.rfind("t,eps,N,L2,Linf,Ys0,Ys1\n", 0) == 0);
    const auto summary = json::parse(slurp(a / "summary.json"));
    CHECK(summary.at("config_hash") == c.hash());
    CHECK(summary.at("slope").is_null());
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
  }
}

TEST_CASE("a failing eps is reported on its own row") {
  auto c = quick_config();
  c.eps = {0.25, 0.15, 0.125};  // 8 / 0.15 is not an integer
  CHECK_THROWS_AS(c.validate(), CommensurabilityError);
  const auto rep = run_convergence(c);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].ok);
  CHECK_FALSE(rep.rows[1].ok);
  CHECK(rep.rows[1].message.find("integer multiple") != std::string::npos);
  CHECK(rep.rows[2].ok);
  CHECK(rep.rows[2].report.sup_l2 == run_convergence(quick_config()).rows[1].report.sup_l2);
}

TEST_CASE("free lattice without coupling hits the floor and fits no slope") {
  auto c = quick_config();
  c.potential = {{"type", "zero"}};
  c.kappa = 0.0;
  c.eps = {0.25, 0.125, 0.0625};
  c.envelope_points = 128;
  const auto rep = run_convergence(c);
  CHECK(rep.floor);
  CHECK_FALSE(rep.fit.has_value());
  for (const auto& r : rep.rows) CHECK(r.report.sup_l2 < 1e-8);
  CHECK(convergence_to_json(rep).at("slope") == "floor");
}

TEST_CASE("non-elliptic band and unsupported combinations are rejected") {
  auto c = quick_config();
  c.band = 2;
  CHECK_THROWS_AS(run_convergence(c), ConfigError);
  auto d = quick_config();
  d.k0 = Eigen::VectorXd::Constant(1, 0.7);
  d.external = ExternalPotential::harmonic(1.0);
  CHECK_THROWS_AS(run_convergence(d), ConfigError);
}

TEST_CASE("preparation comparison") {
  auto c = quick_config();
  SUBCASE("equal orders give zero distance") {
    const auto rep = compare_preparation(c, 2, 2);
    for (const auto& r : rep.rows) {
      CHECK(r.initial_l2 == 0.0);
      CHECK(r.sup_l2 == 0.0);
    }
    CHECK_FALSE(rep.exponent_l2.has_value());
  }
  SUBCASE("distances shrink with eps") {
    const auto rep = compare_preparation(c, 0, 2);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].initial_l2 > 0.0);
    CHECK(rep.rows[1].sup_l2 < rep.rows[0].sup_l2);
    REQUIRE(rep.exponent_l2.has_value());
    CHECK(*rep.exponent_l2 > 0.5);
    const auto dir = scratch("prep");
    write_preparation_run(dir, c, rep);
    CHECK(std::filesystem::exists(dir / "preparation.csv"));
    CHECK(json::parse(slurp(dir / "summary.json")).at("k_high") == 2);
    std::filesystem::remove_all(dir);
  }
  CHECK_THROWS_AS(compare_preparation(c, 0, 3), ConfigError);
}
