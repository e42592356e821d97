#include "coloc/config.hpp"

#include <fstream>
#include <stdexcept>

namespace coloc {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) {
    throw std::invalid_argument(where + " must be an object");
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument("unknown key: " + where + "." + item.key());
    }
  }
}

double get_num(const json& j, const char* key, double fallback,
               const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) {
    throw std::invalid_argument(where + "." + key + " must be a number");
  }
  return j[key].get<double>();
}

int get_int(const json& j, const char* key, int fallback,
            const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) {
    throw std::invalid_argument(where + "." + key + " must be an integer");
  }
  return j[key].get<int>();
}

std::uint64_t get_u64(const json& j, const char* key, std::uint64_t fallback,
                      const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) {
    throw std::invalid_argument(where + "." + key + " must be an integer");
  }
  return j[key].get<std::uint64_t>();
}

bool get_bool(const json& j, const char* key, bool fallback,
              const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) {
    throw std::invalid_argument(where + "." + key + " must be a boolean");
  }
  return j[key].get<bool>();
}

std::string get_str(const json& j, const char* key, const std::string& fallback,
                    const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) {
    throw std::invalid_argument(where + "." + key + " must be a string");
  }
  return j[key].get<std::string>();
}

}  // namespace

json to_json(const PathSpec& spec) {
  return json{{"kind", to_string(spec.kind)},
              {"center", {spec.center(0), spec.center(1)}},
              {"radius", spec.radius},
              {"width", spec.width},
              {"height", spec.height},
              {"r_inner", spec.r_inner},
              {"r_outer", spec.r_outer},
              {"speed", spec.speed},
              {"phase", spec.phase}};
}

PathSpec path_from_json(const json& j, const std::string& where) {
  check_keys(j, where,
             {"kind", "center", "radius", "width", "height", "r_inner",
              "r_outer", "speed", "phase"});
  PathSpec spec;
  if (j.contains("kind")) {
    spec.kind = path_kind_from_string(get_str(j, "kind", "circle", where));
  }
  if (j.contains("center")) {
    const auto& c = j["center"];
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() ||
        !c[1].is_number()) {
      throw std::invalid_argument(where + ".center must be [x, y]");
    }
    spec.center = PosVec(c[0].get<double>(), c[1].get<double>());
  }
  spec.radius = get_num(j, "radius", spec.radius, where);
  spec.width = get_num(j, "width", spec.width, where);
  spec.height = get_num(j, "height", spec.height, where);
  spec.r_inner = get_num(j, "r_inner", spec.r_inner, where);
  spec.r_outer = get_num(j, "r_outer", spec.r_outer, where);
  spec.speed = get_num(j, "speed", spec.speed, where);
  spec.phase = get_num(j, "phase", spec.phase, where);
  return spec;
}

json to_json(const ScenarioConfig& c) {
  return json{{"epochs", c.epochs},
              {"dt", c.dt},
              {"r1_path", to_json(c.r1_path)},
              {"r2_path", to_json(c.r2_path)},
              {"range_noise_std", c.range_noise_std},
              {"gps_noise_std_r1", c.gps_noise_std_r1},
              {"gps_noise_std_r2", c.gps_noise_std_r2},
              {"gps_period_r1", c.gps_period_r1},
              {"gps_period_r2", c.gps_period_r2},
              {"gps_dropout_r2", c.gps_dropout_r2},
              {"range_updates", c.range_updates},
              {"init_pos_offset", c.init_pos_offset},
              {"init_vel_offset_std", c.init_vel_offset_std},
              {"init_pos_prior_std", c.init_pos_prior_std},
              {"process_noise_q", c.process_noise_q},
              {"burn_in", c.burn_in},
              {"ut", {{"alpha", c.ut.alpha}, {"beta", c.ut.beta},
                      {"kappa", c.ut.kappa}}},
              {"gps_variant", c.gps_variant == GpsSplitVariant::gain_on_total
                                  ? "gain_on_total"
                                  : "independent_rhs"},
              {"seed", c.seed}};
}

ScenarioConfig scenario_from_json(const json& j) {
  const std::string where = "scenario";
  check_keys(j, where,
             {"epochs", "dt", "r1_path", "r2_path", "range_noise_std",
              "gps_noise_std_r1", "gps_noise_std_r2", "gps_period_r1",
              "gps_period_r2", "gps_dropout_r2", "range_updates",
              "init_pos_offset", "init_vel_offset_std", "init_pos_prior_std",
              "process_noise_q", "burn_in", "ut", "gps_variant", "seed"});
  ScenarioConfig c = default_scenario();
  c.epochs = get_int(j, "epochs", c.epochs, where);
  c.dt = get_num(j, "dt", c.dt, where);
  if (j.contains("r1_path")) {
    c.r1_path = path_from_json(j["r1_path"], where + ".r1_path");
  }
  if (j.contains("r2_path")) {
    c.r2_path = path_from_json(j["r2_path"], where + ".r2_path");
  }
  c.range_noise_std = get_num(j, "range_noise_std", c.range_noise_std, where);
  c.gps_noise_std_r1 =
      get_num(j, "gps_noise_std_r1", c.gps_noise_std_r1, where);
  c.gps_noise_std_r2 =
      get_num(j, "gps_noise_std_r2", c.gps_noise_std_r2, where);
  c.gps_period_r1 = get_int(j, "gps_period_r1", c.gps_period_r1, where);
  c.gps_period_r2 = get_int(j, "gps_period_r2", c.gps_period_r2, where);
  c.gps_dropout_r2 = get_num(j, "gps_dropout_r2", c.gps_dropout_r2, where);
  c.range_updates = get_bool(j, "range_updates", c.range_updates, where);
  c.init_pos_offset = get_num(j, "init_pos_offset", c.init_pos_offset, where);
  c.init_vel_offset_std =
      get_num(j, "init_vel_offset_std", c.init_vel_offset_std, where);
  c.init_pos_prior_std =
      get_num(j, "init_pos_prior_std", c.init_pos_prior_std, where);
  c.process_noise_q = get_num(j, "process_noise_q", c.process_noise_q, where);
  c.burn_in = get_int(j, "burn_in", c.burn_in, where);
  if (j.contains("ut")) {
    const auto& u = j["ut"];
    check_keys(u, where + ".ut", {"alpha", "beta", "kappa"});
    c.ut.alpha = get_num(u, "alpha", c.ut.alpha, where + ".ut");
    c.ut.beta = get_num(u, "beta", c.ut.beta, where + ".ut");
    c.ut.kappa = get_num(u, "kappa", c.ut.kappa, where + ".ut");
  }
  const std::string variant =
      get_str(j, "gps_variant", "gain_on_total", where);
  if (variant == "gain_on_total") {
    c.gps_variant = GpsSplitVariant::gain_on_total;
  } else if (variant == "independent_rhs") {
    c.gps_variant = GpsSplitVariant::independent_rhs;
  } else {
    throw std::invalid_argument(
        "scenario.gps_variant must be gain_on_total or independent_rhs");
  }
  c.seed = get_u64(j, "seed", c.seed, where);
  return c;
}

json to_json(const SweepConfig& c) {
  return json{{"num_runs", c.num_runs},
              {"base", to_json(c.base)},
              {"range_noise_sigma", c.range_noise_sigma},
              {"gps_noise_sigma", c.gps_noise_sigma},
              {"vel_offset_sigma", c.vel_offset_sigma},
              {"pos_offset_max", c.pos_offset_max},
              {"gps_noise_ratio_r2", c.gps_noise_ratio_r2},
              {"stratified", c.stratified},
              {"randomize_start", c.randomize_start},
              {"master_seed", c.master_seed}};
}

SweepConfig sweep_from_json(const json& j) {
  const std::string where = "sweep";
  check_keys(j, where,
             {"num_runs", "base", "range_noise_sigma", "gps_noise_sigma",
              "vel_offset_sigma", "pos_offset_max", "gps_noise_ratio_r2",
              "stratified", "randomize_start", "master_seed"});
  SweepConfig c;
  c.num_runs = get_int(j, "num_runs", c.num_runs, where);
  if (j.contains("base")) c.base = scenario_from_json(j["base"]);
  c.range_noise_sigma =
      get_num(j, "range_noise_sigma", c.range_noise_sigma, where);
  c.gps_noise_sigma = get_num(j, "gps_noise_sigma", c.gps_noise_sigma, where);
  c.vel_offset_sigma =
      get_num(j, "vel_offset_sigma", c.vel_offset_sigma, where);
  c.pos_offset_max = get_int(j, "pos_offset_max", c.pos_offset_max, where);
  c.gps_noise_ratio_r2 =
      get_num(j, "gps_noise_ratio_r2", c.gps_noise_ratio_r2, where);
  c.stratified = get_bool(j, "stratified", c.stratified, where);
  c.randomize_start = get_bool(j, "randomize_start", c.randomize_start, where);
  c.master_seed = get_u64(j, "master_seed", c.master_seed, where);
  return c;
}

ConfigFile config_from_json(const json& j) {
  check_keys(j, "config", {"scenario", "sweep"});
  ConfigFile file;
  if (j.contains("scenario")) {
    file.scenario = scenario_from_json(j["scenario"]);
  } else {
    file.scenario = default_scenario();
  }
  if (j.contains("sweep")) {
    if (j["sweep"].contains("base")) {
      throw std::invalid_argument(
          "unknown key: sweep.base (the scenario section is the sweep base)");
    }
    file.sweep = sweep_from_json(j["sweep"]);
  }
  file.sweep.base = file.scenario;
  return file;
}

json to_json(const ConfigFile& config) {
  json sweep = to_json(config.sweep);
  sweep.erase("base");
  return json{{"scenario", to_json(config.scenario)}, {"sweep", sweep}};
}

ConfigFile load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error in " + path + ": " +
                             e.what());
  }
  return config_from_json(doc);
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("override must look like section.key=value: " +
                                assignment);
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) {
      throw std::invalid_argument("bad override path: " + path);
    }
    if (dot == std::string::npos) {
      json value;
      try {
        value = json::parse(raw);
      } catch (const json::parse_error&) {
        value = raw;  // bare strings (e.g. path kinds) pass through
      }
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::string sweep_config_hash(const SweepConfig& config) {
  const std::string dump = to_json(config).dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

json sweep_manifest(const SweepConfig& config, int workers) {
  return json{{"version", kVersion},
              {"master_seed", config.master_seed},
              {"num_runs", config.num_runs},
              {"workers", workers},
              {"config_hash", sweep_config_hash(config)},
              {"config", to_json(config)}};
}

}  // namespace coloc
