#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coloc/config.hpp"

using namespace coloc;
using nlohmann::json;

TEST_CASE("scenario config round-trips exactly") {
  ScenarioConfig c = default_scenario();
  c.epochs = 123;
  c.dt = 0.5;
  c.range_noise_std = 4.75;
  c.gps_dropout_r2 = 0.37;
  c.r2_path.kind = PathKind::donut;
  c.r2_path.phase = 17.25;
  c.ut.alpha = 0.9;
  c.gps_variant = GpsSplitVariant::independent_rhs;
  c.seed = 0xDEADBEEFCAFEULL;
  const ScenarioConfig back = scenario_from_json(to_json(c));
  CHECK(to_json(back).dump() == to_json(c).dump());
}

TEST_CASE("sweep config round-trips exactly") {
  SweepConfig c;
  c.num_runs = 777;
  c.master_seed = 31337;
  c.gps_noise_ratio_r2 = 1.5;
  c.stratified = false;
  c.base.epochs = 55;
  const SweepConfig back = sweep_from_json(to_json(c));
  CHECK(to_json(back).dump() == to_json(c).dump());
}

TEST_CASE("config file round-trips and shares the scenario as sweep base") {
  ConfigFile f;
  f.scenario = default_scenario();
  f.scenario.epochs = 99;
  f.sweep.num_runs = 10;
  const ConfigFile back = config_from_json(to_json(f));
  CHECK(back.scenario.epochs == 99);
  CHECK(back.sweep.num_runs == 10);
  CHECK(back.sweep.base.epochs == 99);
  CHECK(to_json(back).dump() == to_json(f).dump());
}

TEST_CASE("unknown keys are rejected with their path") {
  json doc = {{"scenario", {{"epochz", 5}}}};
  CHECK_THROWS_WITH_AS(config_from_json(doc), "unknown key: scenario.epochz",
                       std::invalid_argument);
  json doc2 = {{"swep", json::object()}};
  CHECK_THROWS_WITH_AS(config_from_json(doc2), "unknown key: config.swep",
                       std::invalid_argument);
  json doc3 = {{"scenario", {{"r1_path", {{"radius", 5}, {"bogus", 1}}}}}};
  CHECK_THROWS_WITH_AS(config_from_json(doc3),
                       "unknown key: scenario.r1_path.bogus",
                       std::invalid_argument);
  json doc4 = {{"sweep", {{"base", json::object()}}}};
  CHECK_THROWS_AS(config_from_json(doc4), std::invalid_argument);
}

TEST_CASE("type mismatches are reported by field") {
  json doc = {{"scenario", {{"epochs", "four hundred"}}}};
  CHECK_THROWS_WITH_AS(config_from_json(doc),
                       "scenario.epochs must be an integer",
                       std::invalid_argument);
  json doc2 = {{"scenario", {{"gps_variant", "both"}}}};
  CHECK_THROWS_AS(config_from_json(doc2), std::invalid_argument);
}

TEST_CASE("defaults follow the published simulation parameters") {
  const ConfigFile f = config_from_json(json::object());
  CHECK(f.scenario.epochs == 400);
  CHECK(f.sweep.num_runs == 40000);
  CHECK(f.sweep.range_noise_sigma == 5.0);
  CHECK(f.sweep.gps_noise_sigma == 3.0);
  CHECK(f.sweep.vel_offset_sigma == 1.0);
  CHECK(f.sweep.pos_offset_max == 10);
  CHECK(f.scenario.r1_path.kind == PathKind::rectangle);
}

TEST_CASE("apply_override: dotted paths with typed values") {
  json doc = json::object();
  apply_override(doc, "scenario.epochs=250");
  apply_override(doc, "scenario.r2_path.kind=donut");
  apply_override(doc, "sweep.stratified=false");
  apply_override(doc, "scenario.dt=0.25");
  const ConfigFile f = config_from_json(doc);
  CHECK(f.scenario.epochs == 250);
  CHECK(f.scenario.r2_path.kind == PathKind::donut);
  CHECK(f.sweep.stratified == false);
  CHECK(f.scenario.dt == 0.25);

  CHECK_THROWS_AS(apply_override(doc, "no-equals-sign"),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_override(doc, "=5"), std::invalid_argument);
}

TEST_CASE("overridden unknown keys still fail strict parsing") {
  json doc = json::object();
  apply_override(doc, "scenario.not_a_field=1");
  CHECK_THROWS_AS(config_from_json(doc), std::invalid_argument);
}

TEST_CASE("manifest captures seed, scale, and a config hash") {
  SweepConfig c;
  c.num_runs = 321;
  c.master_seed = 99;
  const json m = sweep_manifest(c, 4);
  CHECK(m["master_seed"] == 99);
  CHECK(m["num_runs"] == 321);
  CHECK(m["workers"] == 4);
  CHECK(m["config_hash"] == sweep_config_hash(c));
  CHECK(m.contains("config"));
  // The embedded config reproduces the sweep exactly.
  const SweepConfig back = sweep_from_json(m["config"]);
  CHECK(sweep_config_hash(back) == sweep_config_hash(c));

  SweepConfig other = c;
  other.master_seed = 100;
  CHECK(sweep_config_hash(other) != sweep_config_hash(c));
}
