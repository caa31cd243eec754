// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fpmix/cli.hpp"

using namespace fpmix;
using namespace fpmix::cli;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = FPMIX_CONFIG_DIR;
const std::string kData = FPMIX_TEST_DATA_DIR;

fs::path scratch(const std::string &name) {
  const auto p = fs::temp_directory_path() / "fpmix_test_cli" / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path &p) {
  std::ifstream is(p);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

json read_json(const fs::path &p) { return json::parse(slurp(p)); }

Options with_config(const std::string &path) {
  Options o;
  o.config_path = path;
  return o;
}

/// Explicit pair (m1 = 2, m2 = 1, eps = 0.5) for sweeps.
const char *kSweepConfig = R"([grid]
v_min = -10
v_max = 10
cells = 128

[species:h]
mass = 2
density = 1
velocity = 0.5
temperature = 1

[species:l]
mass = 1
density = 1
velocity = -0.5
temperature = 1

[pair:h:l]
c_ij = 0.5
c_ji = 1
delta = 0.5
alpha = 0.5
gamma = 0

[run]
dt = 0.01
t_end = 6
output_every = 5
stop_at_equilibrium = false
tier = positivity
)";

} // namespace

TEST_CASE("validate", "[cli][validate]") {
  std::ostringstream out, err;
  SECTION("h-theorem configuration") {
    auto o = with_config(kConfigs + "/h_theorem.ini");
    o.tier = Tier::h_theorem;
    CHECK(cmd_validate(o, out, err) == ok);
    CHECK(out.str().find("tier h-theorem [ok]") != std::string::npos);
    CHECK(out.str().find("result: ok") != std::string::npos);
  }
  SECTION("inadmissible pair reports violations as JSON") {
    CHECK(cmd_validate(with_config(kData + "/epsilon_too_large.ini"), out, err) == inadmissible);
    const auto text = err.str();
    const auto j = json::parse(text.substr(text.find('{')));
    bool found = false;
    for (const auto &v : j["violations"])
      found = found || v["id"] == "epsilon_le_one";
    CHECK(found);
    CHECK(out.str().find("result: FAIL") != std::string::npos);
  }
  SECTION("the tier flag raises the requirement") {
    auto o = with_config(kConfigs + "/two_species.ini");
    CHECK(cmd_validate(o, out, err) == ok);
    o.tier = Tier::h_theorem;
    std::ostringstream out2, err2;
    CHECK(cmd_validate(o, out2, err2) == inadmissible);
    CHECK(err2.str().find("gamma_ge_h_lower") != std::string::npos);
  }
  SECTION("configuration errors") {
    CHECK(cmd_validate(with_config(kData + "/typo.ini"), out, err) == bad_config);
    CHECK(err.str().find("unknown key") != std::string::npos);
    CHECK(cmd_validate(with_config(kData + "/missing.ini"), out, err) == bad_config);
  }
}

TEST_CASE("two-species demo run", "[cli][run]") {
  const auto dir = scratch("demo");
  auto o = with_config(kConfigs + "/two_species.ini");
  o.out_dir = dir.string();
  o.command_line = "fpmix run";
  std::ostringstream out, err;
  REQUIRE(cmd_run(o, out, err) == ok);
  for (const char *f : {"config.ini", "manifest.json", "series.csv", "snapshot_initial.csv",
                        "snapshot_final.csv", "diagnostics.json"})
    CHECK(fs::exists(dir / f));

  const auto manifest = read_json(dir / "manifest.json");
  CHECK(manifest["exit_code"] == 0);
  CHECK(manifest["version"] == std::string(version));
  CHECK(manifest["config_hash"] == hex64(fnv1a(slurp(dir / "config.ini"))));
  CHECK(manifest["command"] == "fpmix run");

  const auto series = slurp(dir / "series.csv");
  CHECK(series.rfind("# fpmix ", 0) == 0);
  CHECK(series.find("config_hash=" + manifest["config_hash"].get<std::string>()) !=
        std::string::npos);

  const auto diag = read_json(dir / "diagnostics.json");
  CHECK(diag["reached_equilibrium"] == true);
  CHECK(diag["conservation"]["momentum_max_drift"].get<double>() <= 1e-6);
  CHECK(diag["conservation"]["energy_max_relative_drift"].get<double>() <= 1e-6);
  CHECK(diag["conservation"]["mass_max_drift"].get<double>() <= 1e-13);
  CHECK(diag["entropy"]["max_increase_between_samples"].get<double>() <= 1e-10);
  const auto &pair = diag["pairs"][0];
  CHECK(pair["pair"] == "heavy:light");
  CHECK(pair["final_velocity_gap"].get<double>() < 1e-8);
  CHECK(pair["final_temperature_gap"].get<double>() < 1e-8);
  const auto &fit = pair["velocity_gap_rate"];
  CHECK(fit["fit"].get<double>() == Approx(fit["theory"].get<double>()).epsilon(0.02));
  for (const auto &[label, dist] : diag["distance_to_own_maxwellian"].items())
    CHECK(dist.get<double>() < 1e-6);

  // The saved configuration reproduces the run.
  const auto saved = load_config((dir / "config.ini").string());
  CHECK(saved == load_config(kConfigs + "/two_species.ini"));

  std::ifstream snap(dir / "snapshot_final.csv");
  const auto st = read_snapshot_csv(snap);
  REQUIRE(st.f.size() == 2);
}

TEST_CASE("correct-moments flag is recorded", "[cli][run]") {
  const auto dir = scratch("correct");
  auto o = with_config(kData + "/small_run.ini");
  o.out_dir = dir.string();
  o.correct_moments = true;
  std::ostringstream out, err;
  REQUIRE(cmd_run(o, out, err) == ok);
  CHECK(read_json(dir / "diagnostics.json")["correct_moments"] == true);
  CHECK(load_config((dir / "config.ini").string()).run.correct_moments);
}

TEST_CASE("spatial run", "[cli][run][spatial]") {
  const auto dir = scratch("spatial");
  auto o = with_config(kConfigs + "/transport_1x1v.ini");
  o.out_dir = dir.string();
  std::ostringstream out, err;
  REQUIRE(cmd_run(o, out, err) == ok);
  const auto diag = read_json(dir / "diagnostics.json");
  CHECK(diag["mass_drift"].get<double>() < 1e-12);
  CHECK(diag["momentum_final"].get<double>() ==
        Approx(diag["momentum_initial"].get<double>()).margin(1e-10));
  CHECK(diag["energy_final"].get<double>() ==
        Approx(diag["energy_initial"].get<double>()).epsilon(1e-10));
  CHECK(diag["entropy_change_collision"].get<double>() <= 1e-12);
  CHECK(slurp(dir / "snapshot_final.csv").find("# x-averaged") != std::string::npos);
}

TEST_CASE("run failures map to exit codes", "[cli][run]") {
  std::ostringstream out, err;
  SECTION("CFL violation") {
    const auto dir = scratch("cfl");
    auto o = with_config(kData + "/cfl_violation.ini");
    o.out_dir = dir.string();
    CHECK(cmd_run(o, out, err) == cfl_error);
    CHECK(err.str().find("step 1: CFL") != std::string::npos);
    const auto manifest = read_json(dir / "manifest.json");
    CHECK(manifest["exit_code"] == 4);
    CHECK(manifest["error"].get<std::string>().find("CFL") != std::string::npos);
  }
  SECTION("bad configuration") {
    auto o = with_config(kData + "/typo.ini");
    o.out_dir = scratch("typo").string();
    CHECK(cmd_run(o, out, err) == bad_config);
  }
}

TEST_CASE("sweep over delta", "[cli][sweep]") {
  const auto dir = scratch("sweep");
  fs::create_directories(dir);
  const auto cfg_path = dir / "sweep.ini";
  std::ofstream(cfg_path) << kSweepConfig;
  auto o = with_config(cfg_path.string());
  o.out_dir = (dir / "out").string();
  o.sweep_parameter = "delta";
  o.sweep_from = 0.2;
  o.sweep_to = 0.8;
  o.sweep_samples = 4;
  o.jobs = 3;
  std::ostringstream out, err;
  REQUIRE(cmd_sweep(o, out, err) == ok);

  const auto cfg = load_config(cfg_path.string());
  const auto rows = run_sweep(cfg, 0, "delta", sweep_values(0.2, 0.8, 4), 1);
  REQUIRE(rows.size() == 4);
  double slope = 0.0;
  for (const auto &r : rows) {
    REQUIRE(r.status == "ok");
    // c_ij (1 - delta)(n2 + (m1/m2) n1) with c_ij = 0.5, m1/m2 = 2.
    CHECK(r.lambda_u_theory == Approx(1.5 * (1.0 - r.value)));
    CHECK(r.lambda_u_fit == Approx(r.lambda_u_theory).epsilon(0.02));
    const double s = r.lambda_u_fit / (1.0 - r.value);
    if (slope == 0.0)
      slope = s;
    CHECK(s == Approx(slope).epsilon(0.02));
    CHECK(r.entropy_max_increase <= 1e-10);
  }
  // Threaded rows match the serial ones.
  const auto threaded = run_sweep(cfg, 0, "delta", sweep_values(0.2, 0.8, 4), 3);
  for (std::size_t k = 0; k < rows.size(); ++k)
    CHECK(threaded[k].lambda_u_fit == rows[k].lambda_u_fit);

  const auto csv = slurp(dir / "out" / "sweep.csv");
  CHECK(csv.find("index,parameter,value,status") != std::string::npos);
  CHECK(out.str().find("3,delta,0.80000000000000004,ok") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "manifest.json"));
}

TEST_CASE("sweep records inadmissible samples", "[cli][sweep]") {
  const auto dir = scratch("sweep_bad");
  fs::create_directories(dir);
  const auto cfg_path = dir / "sweep.ini";
  std::ofstream(cfg_path) << kSweepConfig;
  const auto cfg = load_config(cfg_path.string());
  const auto rows = run_sweep(cfg, 0, "gamma", {0.0, 5.0}, 2);
  CHECK(rows[0].status == "ok");
  CHECK(rows[1].status == "inadmissible");
  CHECK(rows[1].violations.find("gamma_le_positivity_bound") != std::string::npos);
  CHECK(std::isnan(rows[1].lambda_u_fit));

  auto o = with_config(cfg_path.string());
  o.out_dir = (dir / "out").string();
  o.sweep_parameter = "mass";
  std::ostringstream out, err;
  CHECK(cmd_sweep(o, out, err) == bad_config);
  o.sweep_parameter = "delta";
  o.sweep_pair = "h:x";
  CHECK(cmd_sweep(o, out, err) == bad_config);
}

TEST_CASE("sweep over a preset pair materializes its parameters", "[cli][sweep]") {
  const auto cfg = load_config(kConfigs + "/two_species.ini");
  const auto rows = run_sweep(cfg, 0, "alpha", {1.0 / 3.0}, 1);
  REQUIRE(rows[0].status == "ok");
  CHECK(rows[0].lambda_T_theory == Approx(8.0 / 3.0));
}

TEST_CASE("sweep values", "[cli][sweep]") {
  CHECK(sweep_values(0.0, 1.0, 0).empty());
  CHECK(sweep_values(0.3, 1.0, 1) == std::vector<double>{0.3});
  const auto v = sweep_values(0.0, 1.0, 5);
  REQUIRE(v.size() == 5);
  CHECK(v[2] == 0.5);
  CHECK(v.back() == 1.0);
}

TEST_CASE("presets table", "[cli][presets]") {
  Options o;
  o.preset_inputs = {2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1};
  std::ostringstream out, err;
  REQUIRE(cmd_presets(o, out, err) == ok);
  CHECK(out.str().find("symmetric7") != std::string::npos);
  CHECK(out.str().find("gorji") != std::string::npos);

  o.json_output = true;
  std::ostringstream jout, jerr;
  REQUIRE(cmd_presets(o, jout, jerr) == ok);
  const auto j = json::parse(jout.str());
  REQUIRE(j.size() == 3);
  CHECK(j[0]["preset"] == "symmetric7");
  CHECK(j[0]["parameters"]["epsilon"].get<double>() == Approx(0.5));
  CHECK(j[0]["tier"] == "positivity");

  o.preset_inputs.m1 = -1.0;
  CHECK(cmd_presets(o, out, err) == bad_config);
}
