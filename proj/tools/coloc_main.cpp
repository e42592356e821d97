// Command-line front end: single runs, Monte Carlo sweeps, and report
// generation over sweep outputs.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "coloc/config.hpp"
#include "coloc/montecarlo.hpp"
#include "coloc/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int default_workers() {
  if (const char* env = std::getenv("COLOC_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Builds the effective config document: file (if any), then dotted-path
// overrides in order. Throws UsageError on anything malformed.
json build_config_doc(const std::string& config_path,
                      const std::vector<std::string>& extras) {
  json doc = json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw UsageError("cannot open config file: " + config_path);
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw UsageError("config parse error in " + config_path + ": " +
                       e.what());
    }
  }
  for (const std::string& arg : extras) {
    if (arg.rfind("--", 0) != 0 || arg.find('=') == std::string::npos) {
      throw UsageError("unrecognized argument: " + arg +
                       " (overrides look like --section.key=value)");
    }
    try {
      coloc::apply_override(doc, arg.substr(2));
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  return doc;
}

coloc::ConfigFile parse_config_doc(const json& doc) {
  try {
    coloc::ConfigFile cfg = coloc::config_from_json(doc);
    cfg.scenario.validate();
    cfg.sweep.validate();
    return cfg;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

const std::vector<coloc::Axis> kAxes = {
    coloc::Axis::range_noise, coloc::Axis::gps_noise, coloc::Axis::pos_offset,
    coloc::Axis::vel_offset, coloc::Axis::path};

std::string summary_path(const fs::path& dir, coloc::Axis axis) {
  return (dir / ("summary_" + coloc::to_string(axis) + ".csv")).string();
}

int cmd_run(const std::string& config_path,
            const std::vector<std::string>& extras,
            const std::string& trace_out) {
  const coloc::ConfigFile cfg =
      parse_config_doc(build_config_doc(config_path, extras));

  const auto records = coloc::run_scenario(cfg.scenario);
  const coloc::RunStats stats =
      coloc::summarize_run(records, cfg.scenario.burn_in);

  if (!trace_out.empty()) {
    std::ofstream out(trace_out);
    if (!out) throw std::runtime_error("cannot write trace file: " + trace_out);
    coloc::write_trace_csv(out, records);
    std::cerr << "wrote " << trace_out << "\n";
  }
  std::printf("epochs=%d seed=%llu mean_error_m=%.9g rms_error_m=%.9g "
              "max_error_m=%.9g\n",
              cfg.scenario.epochs,
              static_cast<unsigned long long>(cfg.scenario.seed),
              stats.mean_error, stats.rms_error, stats.max_error);
  return kExitOk;
}

int cmd_sweep(const std::string& config_path,
              const std::vector<std::string>& extras, int workers,
              const std::string& out_dir) {
  const coloc::ConfigFile cfg =
      parse_config_doc(build_config_doc(config_path, extras));
  const coloc::SweepConfig& sweep = cfg.sweep;

  fs::create_directories(out_dir);

  std::cerr << "sweep: " << sweep.num_runs << " runs on " << workers
            << " workers\n";
  std::mutex progress_mutex;
  int last_decile = 0;
  const auto progress = [&](int done, int total) {
    std::lock_guard<std::mutex> lock(progress_mutex);
    const int decile = 10 * done / total;
    if (decile > last_decile) {
      last_decile = decile;
      std::cerr << "progress: " << done << "/" << total << " runs\n";
    }
  };
  const auto results = coloc::run_batch(sweep, workers, progress);

  for (coloc::Axis axis : kAxes) {
    const auto summaries = coloc::bin_and_summarize(
        results, axis, coloc::default_bin_edges(axis, sweep));
    const std::string path = summary_path(out_dir, axis);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    coloc::export_summary_csv(out, summaries);
    std::cerr << "wrote " << path << "\n";
  }

  json manifest = coloc::sweep_manifest(sweep, workers);
  const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
  {
    std::ofstream out(manifest_path);
    if (!out) throw std::runtime_error("cannot write " + manifest_path);
    out << manifest.dump(2) << "\n";
  }
  std::cerr << "wrote " << manifest_path << "\n";

  double sum = 0.0, sum_sq = 0.0;
  int ok = 0, diverged = 0;
  for (const auto& r : results) {
    if (r.diverged) ++diverged;
    if (r.failure.empty()) {
      sum += r.mean_error;
      sum_sq += r.mean_error * r.mean_error;
      ++ok;
    }
  }
  const double mean = ok > 0 ? sum / ok : 0.0;
  const double var = ok > 0 ? std::max(sum_sq / ok - mean * mean, 0.0) : 0.0;
  std::printf("runs=%d workers=%d overall_mean_m=%.4f overall_std_m=%.4f "
              "divergence_pct=%.4f\n",
              sweep.num_runs, workers, mean, std::sqrt(var),
              100.0 * diverged / sweep.num_runs);
  return kExitOk;
}

std::vector<std::string> sigma_axis_labels(std::size_t count) {
  static const char* kLabels[] = {"0σ",   "1/2σ", "σ",  "3/2σ",
                                  "2σ",   "5/2σ", "3σ"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(i < 7 ? kLabels[i] : "");
  }
  return out;
}

int cmd_report(const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::vector<std::pair<coloc::Axis, std::vector<coloc::BinSummary>>> tables;
  for (coloc::Axis axis : kAxes) {
    const std::string path = summary_path(dir, axis);
    std::ifstream in(path);
    if (!in) throw UsageError("missing sweep output: " + path);
    tables.emplace_back(axis, coloc::parse_summary_csv(in));
  }

  const char* kTitles[] = {
      "Localization Performance Metrics for Range Noise",
      "Localization Performance Metrics for GPS position solution uncertainty",
      "Localization Performance Metrics for Initial Position Offset",
      "Localization Performance Metrics for Velocity Offset",
      "Localization Performance Metrics for Paths"};

  char buf[64];
  auto cell = [&](double v) -> std::string {
    if (std::isnan(v)) return "";
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
  };

  for (std::size_t t = 0; t < tables.size(); ++t) {
    const auto& [axis, bins] = tables[t];
    std::vector<std::string> labels;
    const bool sigma_axis = axis == coloc::Axis::range_noise ||
                            axis == coloc::Axis::gps_noise ||
                            axis == coloc::Axis::vel_offset;
    if (sigma_axis && bins.size() == 7) {
      labels = sigma_axis_labels(bins.size());
    } else {
      for (const auto& b : bins) labels.push_back(b.label);
    }

    std::cout << "# " << kTitles[t] << "\n";
    std::cout << "Metric";
    for (const auto& l : labels) std::cout << "," << l;
    std::cout << "\n";
    auto row = [&](const std::string& name, auto getter) {
      std::cout << name;
      for (const auto& b : bins) std::cout << "," << getter(b);
      std::cout << "\n";
    };
    row("NumRuns", [](const coloc::BinSummary& b) {
      return std::to_string(b.num_runs);
    });
    row("Mean Error (m)",
        [&](const coloc::BinSummary& b) { return cell(b.mean); });
    row("Std Error (m)",
        [&](const coloc::BinSummary& b) { return cell(b.std_dev); });
    row("Median Error (m)",
        [&](const coloc::BinSummary& b) { return cell(b.median); });
    row("Max Error (m)",
        [&](const coloc::BinSummary& b) { return cell(b.max); });
    row("Min Error (m)",
        [&](const coloc::BinSummary& b) { return cell(b.min); });
    row("Divergence Percentage (%)",
        [&](const coloc::BinSummary& b) { return cell(b.divergence_pct); });
    std::cout << "\n";

    // Plot-ready long-format data: one row per bin.
    const std::string plot_path =
        (dir / ("plot_" + coloc::to_string(axis) + ".csv")).string();
    std::ofstream plot(plot_path);
    if (!plot) throw std::runtime_error("cannot write " + plot_path);
    plot << "axis_value,mean_m,std_m\n";
    for (const auto& b : bins) {
      plot << b.label << ',' << cell(b.mean) << ',' << cell(b.std_dev) << '\n';
    }
    std::cerr << "wrote " << plot_path << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative localization simulator: unscented-transform "
               "range fusion with split covariance intersection"};
  app.set_version_flag("--version", coloc::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string trace_out;
  std::string out_dir = "sweep_out";
  int runs = -1;
  int workers = default_workers();

  CLI::App* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--trace", trace_out, "Per-epoch trace CSV to write");
  run->add_option("--seed", "Scenario seed (shorthand override)");
  run->allow_extras();

  CLI::App* sweep = app.add_subcommand("sweep", "Run a Monte Carlo sweep");
  sweep->add_option("--config", config_path, "JSON config file");
  sweep->add_option("--runs", runs, "Number of runs (overrides config)");
  sweep->add_option("--workers", workers,
                    "Worker threads (default: COLOC_WORKERS or hardware)");
  sweep->add_option("--out-dir", out_dir, "Output directory");
  sweep->allow_extras();

  CLI::App* report = app.add_subcommand("report", "Render tables from a sweep");
  report->add_option("--out-dir", out_dir, "Sweep output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) {
      std::vector<std::string> extras = run->remaining();
      if (run->count("--seed") > 0) {
        extras.push_back("--scenario.seed=" +
                         run->get_option("--seed")->as<std::string>());
      }
      return cmd_run(config_path, extras, trace_out);
    }
    if (sweep->parsed()) {
      std::vector<std::string> extras = sweep->remaining();
      if (sweep->count("--runs") > 0) {
        if (runs <= 0) throw UsageError("num_runs must be > 0");
        extras.push_back("--sweep.num_runs=" + std::to_string(runs));
      }
      if (workers < 1) throw UsageError("workers must be >= 1");
      return cmd_sweep(config_path, extras, workers, out_dir);
    }
    return cmd_report(out_dir);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
