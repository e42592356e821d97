#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "coloc/scenario.hpp"

namespace coloc {

/// Batch of scenario runs with per-run sampled parameters:
///   range noise std  ~ |N(0, range_noise_sigma)|
///   gps noise std    ~ |N(0, gps_noise_sigma)|   (applied to both robots)
///   vel offset std   ~ |N(0, vel_offset_sigma)|
///   pos offset       ~ Uniform{0..pos_offset_max} meters
///   path kind        ~ Uniform{circle, rectangle, donut}
/// With `stratified` set, the axis quantiles come from a seeded
/// low-discrepancy (Kronecker) sequence instead of independent draws:
/// marginals still follow the distributions above, while every axis stays
/// balanced against every other, including inside small report bins.
/// Either way the draw for a run is a deterministic function of
/// (master_seed, run_index).
struct SweepConfig {
  int num_runs = 40000;
  ScenarioConfig base = default_scenario();
  double range_noise_sigma = 5.0;
  double gps_noise_sigma = 3.0;
  double vel_offset_sigma = 1.0;
  int pos_offset_max = 10;
  // R2's fixes are noisier than R1's by this factor ("reliable" vs
  // "sporadic and noisy"); the sampled scale applies to both.
  double gps_noise_ratio_r2 = 2.0;
  bool stratified = true;
  bool randomize_start = true;  // random phases along both paths per run
  std::uint64_t master_seed = 1;

  void validate() const;
};

struct RunResult {
  int run_index = 0;
  // Sampled parameters.
  double range_noise_std = 0.0;
  double gps_noise_std = 0.0;
  double vel_offset_std = 0.0;
  int pos_offset = 0;
  PathKind path = PathKind::circle;
  // Error statistics over post-burn-in epochs.
  double mean_error = 0.0;
  double rms_error = 0.0;
  double max_error = 0.0;
  bool diverged = false;
  std::string failure;  // non-empty when the run threw
};

/// Scenario for one run of the sweep.
ScenarioConfig sample_run(const SweepConfig& config, int run_index);

/// Runs the whole sweep on `workers` threads. Results are ordered by
/// run_index and identical for any worker count. A run that throws is
/// recorded as diverged with the failure reason; afterwards every run
/// with mean error above (global mean + 3 * global std) is also flagged
/// diverged. `progress(done, total)` is invoked after each run, possibly
/// from worker threads.
std::vector<RunResult> run_batch(
    const SweepConfig& config, int workers,
    const std::function<void(int, int)>& progress = {});

enum class Axis { range_noise, gps_noise, pos_offset, vel_offset, path };

std::string to_string(Axis axis);

struct BinSummary {
  std::string label;
  int num_runs = 0;
  // Statistics of run mean errors; NaN when the bin is empty.
  double mean = 0.0;
  double std_dev = 0.0;
  double median = 0.0;
  double max = 0.0;
  double min = 0.0;
  double divergence_pct = 0.0;
};

/// Lower edges of the default bins for a numeric axis: k*sigma/2 for
/// k = 0..6, the last bin open-ended (matching the 0σ..3σ table columns).
std::vector<double> default_bin_edges(Axis axis, const SweepConfig& config);

/// Partition results along one axis and summarize each bin. For the path
/// axis `edges` is ignored (categorical bins). Divergence percentage is
/// the share of runs in the bin flagged diverged by run_batch's global
/// 3-sigma rule.
std::vector<BinSummary> bin_and_summarize(const std::vector<RunResult>& results,
                                          Axis axis,
                                          const std::vector<double>& edges);

/// CSV with header bin,num_runs,mean_m,std_m,median_m,max_m,min_m,
/// divergence_pct; values at 2 decimal places. Empty bins render empty
/// statistic fields.
void export_summary_csv(std::ostream& os,
                        const std::vector<BinSummary>& summaries);

/// Inverse of export_summary_csv (at its 2-decimal precision).
std::vector<BinSummary> parse_summary_csv(std::istream& is);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace coloc
