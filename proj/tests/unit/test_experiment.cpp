#include <algorithm>
#include <cmath>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "gibbslab/error.hpp"
#include "gibbslab/experiment/config.hpp"
#include "gibbslab/experiment/convergence.hpp"
#include "gibbslab/experiment/report.hpp"
#include "gibbslab/experiment/selfcheck.hpp"
#include "helpers.hpp"
#include "oracles/oracles.hpp"

using namespace gibbslab;
using namespace gibbslab::experiment;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.operator_spec.grid_points = 256;
  c.temperatures = {2.0, 4.0, 8.0, 16.0};
  c.mc_samples = 4000;
  c.trial_samples = 300;
  c.bl_samples = 300;
  c.seed = 5;
  return c;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("config defaults") {
  const ExperimentConfig c;
  CHECK(c.modes == 2);
  CHECK(c.temperatures == std::vector<double>{5.0, 10.0, 20.0, 40.0});
  CHECK(c.coupling_rule == 1.0);
  CHECK(c.k_max == 2);
  CHECK(c.n_max_policy == 1e-8);
  CHECK(c.mc_samples == 100000);
  CHECK(c.kernel.type == KernelType::Delta);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config parsing") {
  const auto c = parse_config(R"(# desk run
operator.domain = interval
operator.boundary = periodic
operator.m = 2.5
operator.grid_points = 300

kernel.type = gaussian   # bounded
kernel.g = 0.5
kernel.width = 0.2
K = 3
T_schedule = 1, 2.5, 7
coupling_rule = 0.5
k_max = 3
mc_samples = 1234
seed = 42
n_max_policy = 1e-6
output_dir = out/run1
)");
  CHECK(c.operator_spec.mass == 2.5);
  CHECK(c.operator_spec.grid_points == 300);
  CHECK(std::get<spectral::Interval>(c.operator_spec.domain).boundary == spectral::Boundary::Periodic);
  CHECK(c.kernel.type == KernelType::Gaussian);
  CHECK(c.kernel.g == 0.5);
  CHECK(c.kernel.width == 0.2);
  CHECK(c.modes == 3);
  CHECK(c.temperatures == std::vector<double>{1.0, 2.5, 7.0});
  CHECK(c.coupling_rule == 0.5);
  CHECK(c.k_max == 3);
  CHECK(c.mc_samples == 1234);
  CHECK(c.seed == 42);
  CHECK(c.n_max_policy == 1e-6);
  CHECK(c.output_dir == "out/run1");

  const auto entries = config_entries(c);
  CHECK(entries.at("kernel.type") == "gaussian");
  CHECK(entries.at("K") == "3");
  CHECK(entries.at("operator.boundary") == "periodic");

  const auto l = parse_config("operator.domain = line\noperator.exponent = 4\noperator.m = 0\nK = 3\n");
  const auto spec = l.resolved_operator();
  const auto& line = std::get<spectral::AnharmonicLine>(spec.domain);
  CHECK(line.exponent == 4.0);
  CHECK(line.half_width == doctest::Approx(spectral::default_half_width(4.0, 0.0, 3)));
}

TEST_CASE("config errors") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("K = 2\nbogus = 1\n").find("line 2") != std::string::npos);
  CHECK(message("K = 2\nbogus = 1\n").find("bogus") != std::string::npos);
  CHECK(message("K 2\n").find("line 1") != std::string::npos);
  CHECK(message("K = two\n").find("line 1") != std::string::npos);
  CHECK(message("kernel.type = cubic\n") != "");
  CHECK(message("T_schedule = 5, 3\n") != "");
  CHECK(message("k_max = 4\n") != "");
  CHECK(message("coupling_rule = 0\n") != "");
  CHECK(message("n_max_policy = 2\n") != "");
  CHECK_THROWS_AS(load_config("/nonexistent/gibbslab.cfg"), IoError);
}

TEST_CASE("kernel config builds the requested kernel") {
  spectral::OneBodySpec spec;
  spec.grid_points = 128;
  const auto grid = spectral::build_operator(spec).grid;
  KernelConfig zero{KernelType::Zero, 1.0, 0.1};
  CHECK(zero.build(grid).is_zero());
  KernelConfig delta{KernelType::Delta, 0.0, 0.1};
  CHECK(delta.build(grid).is_zero());
  KernelConfig gaussian{KernelType::Gaussian, 1.0, 0.1};
  CHECK_FALSE(gaussian.build(grid).is_zero());
  CHECK_NOTHROW(gaussian.build(grid).validate(grid.size()));
  KernelConfig point{KernelType::PointMass, 1.0, 0.3};
  CHECK_NOTHROW(point.build(grid).validate(grid.size()));
}

TEST_CASE("free closed form of d_1") {
  CHECK(free_distance_k1({1.0}, 10.0) == doctest::Approx(std::abs(1.0 / (10.0 * std::expm1(0.1)) - 1.0)).epsilon(1e-12));
  CHECK(free_distance_k1({1.0}, 10.0) == doctest::Approx(0.0492).epsilon(2e-3));
  const double two = free_distance_k1({2.0, 5.0}, 20.0);
  double expected = 0.0;
  for (double l : {2.0, 5.0}) expected += std::abs(1.0 / (20.0 * std::expm1(l / 20.0)) - 1.0 / l);
  CHECK(two == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("single-mode quadrature helper") {
  CHECK(quartic_partition_quadrature(1.0) == doctest::Approx(oracle::quartic_z_r(1.0)).epsilon(1e-10));
  CHECK(quartic_partition_quadrature(0.3) == doctest::Approx(oracle::quartic_z_r(0.3)).epsilon(1e-10));
}

TEST_CASE("zero-kernel run") {
  auto c = small_config();
  c.kernel.type = KernelType::Zero;
  c.temperatures = {2.0, 4.0};
  RunOptions opts;
  opts.berezin_lieb = false;
  const auto r = run_convergence(c, opts);
  CHECK(r.exact_classical);
  CHECK(r.z_r.value == 1.0);
  CHECK(r.minus_log_z_r.value == 0.0);
  for (const auto& row : r.rows) {
    CHECK(row.coupling == doctest::Approx(1.0 / row.temperature));
    CHECK(row.free_energy_metric == doctest::Approx(0.0).scale(1.0));
    CHECK(row.distances[0].value ==
          doctest::Approx(free_distance_k1(r.basis.eigenvalues, row.temperature)).epsilon(1e-6));
    CHECK(row.tail_mass < c.n_max_policy);
  }
}

TEST_CASE("convergence run, properties and reports") {
  const auto c = small_config();
  RunOptions opts;
  opts.keep_states = true;
  const auto r = run_convergence(c, opts);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.classical_moments.size() == 2);
  for (const auto& row : r.rows) {
    CHECK(row.distances.size() == 2);
    for (const auto& d : row.distances) CHECK(d.value >= 0.0);
    CHECK(row.tail_mass < c.n_max_policy);
    REQUIRE(row.gibbs.has_value());
    CHECK(row.gibbs->validate().ok());
    // (F_lambda - F_0)/T from log Z agrees with the relative free-energy functional.
    CHECK(row.relative_free_energy_gibbs / row.temperature ==
          doctest::Approx(row.free_energy_metric).epsilon(1e-8));
    REQUIRE(row.relative_free_energy_trial.has_value());
    CHECK(*row.relative_free_energy_trial >= row.relative_free_energy_gibbs - 1e-8);
    REQUIRE(row.berezin_lieb.has_value());
  }
  CHECK(r.rows.back().distances[0].value < r.rows.front().distances[0].value);

  const auto props = evaluate_properties(r);
  for (const auto& p : props) {
    CAPTURE(p.name);
    CAPTURE(p.detail);
    CHECK(p.passed);
  }

  const auto dir = testutil::scratch_dir("report");
  const auto paths = emit_report(r, props, dir / "a");
  const auto csv = testutil::slurp(paths.csv);
  CHECK(csv.rfind("T,lambda,n_max,tail_mass,metric,k,value,std_error,target,target_std_error,aux_hs\n", 0) == 0);
  CHECK(line_count(csv) == 1 + 8 + 4);
  CHECK(line_count(testutil::slurp(paths.bl_gap)) == 1 + 4);
  const auto summary = nlohmann::json::parse(testutil::slurp(paths.summary));
  CHECK(summary["rows"].size() == 4);
  CHECK(summary["config"]["K"] == "2");

  // Same config and seed: byte-identical CSV.
  RunOptions quiet;
  const auto again = run_convergence(c, quiet);
  const auto paths2 = emit_report(again, evaluate_properties(again), dir / "b");
  CHECK(testutil::slurp(paths2.csv) == csv);
  CHECK(testutil::slurp(paths2.bl_gap) == testutil::slurp(paths.bl_gap));
}

TEST_CASE("report edge cases") {
  const auto dir = testutil::scratch_dir("report_empty");
  write_convergence_csv({}, nullptr, dir / "empty.csv");
  CHECK(testutil::slurp(dir / "empty.csv") ==
        "T,lambda,n_max,tail_mass,metric,k,value,std_error,target,target_std_error,aux_hs\n");
  write_bl_gap_csv({}, dir / "bl.csv");
  CHECK(line_count(testutil::slurp(dir / "bl.csv")) == 1);
  CHECK_THROWS_AS(write_convergence_csv({}, nullptr, "/proc/gibbslab/forbidden.csv"), IoError);
}

TEST_CASE("self-checks") {
  ExperimentConfig c;
  const auto checks = run_selfchecks(c);
  CHECK(checks.size() >= 10);
  for (const auto& check : checks) {
    CAPTURE(check.name);
    CAPTURE(check.detail);
    CHECK(check.passed);
    CHECK(check.measured <= check.tolerance);
  }

  SelfCheckOptions corrupt;
  corrupt.corrupt_seed_splitting = true;
  const auto bad = run_selfchecks(c, corrupt);
  const auto it = std::find_if(bad.begin(), bad.end(), [](const SelfCheck& s) { return s.name == "seed_determinism"; });
  REQUIRE(it != bad.end());
  CHECK_FALSE(it->passed);

  const auto dir = testutil::scratch_dir("selfcheck");
  write_selfcheck_json(checks, dir / "s.json");
  CHECK(nlohmann::json::parse(testutil::slurp(dir / "s.json")).size() == checks.size());
}
