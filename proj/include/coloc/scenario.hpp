#pragma once

#include <iosfwd>
#include <vector>

#include "coloc/kalman.hpp"
#include "coloc/paths.hpp"
#include "coloc/rng.hpp"
#include "coloc/sci.hpp"
#include "coloc/unscented.hpp"

namespace coloc {

/// One two-robot run: R1 follows r1_path with frequent GPS and a plain
/// Kalman filter; R2 follows r2_path and is estimated with the UT range
/// construction fused by split covariance intersection, with sporadic
/// GPS fixes of its own.
struct ScenarioConfig {
  int epochs = 400;
  double dt = 1.0;
  PathSpec r1_path;  // defaults to a rectangle, see default_scenario()
  PathSpec r2_path;  // defaults to a circle
  double range_noise_std = 5.0;
  double gps_noise_std_r1 = 3.0;
  double gps_noise_std_r2 = 3.0;
  int gps_period_r1 = 1;   // epochs between fixes; 0 disables GPS
  int gps_period_r2 = 4;
  double gps_dropout_r2 = 0.0;  // probability a scheduled R2 fix is missed
  bool range_updates = true;
  double init_pos_offset = 0.0;     // meters, random direction
  double init_vel_offset_std = 0.0; // m/s per axis
  double init_pos_prior_std = 0.8;  // filter's assumed initial position std
  double process_noise_q = 0.015;   // WNA spectral density, m^2/s^3
  int burn_in = 0;                  // epochs excluded from error statistics
  UtParams ut;
  GpsSplitVariant gps_variant = GpsSplitVariant::gain_on_total;
  std::uint64_t seed = 1;

  void validate() const;  // throws std::invalid_argument naming the field
};

ScenarioConfig default_scenario();

struct EpochRecord {
  int epoch = 0;
  StateVec r1_truth = StateVec::Zero();
  StateVec r2_truth = StateVec::Zero();
  SplitEstimate r2_estimate;
  double pos_error = 0.0;  // Euclidean, meters
  bool gps_r1_applied = false;
  bool gps_r2_applied = false;
  bool range_applied = false;
};

/// Euclidean distance plus Gaussian noise, clamped at zero.
double synth_range(const PosVec& p1, const PosVec& p2, double noise_std,
                   RngStream& rng);

/// True position plus isotropic Gaussian noise.
PosVec synth_gps(const StateVec& truth, double noise_std, RngStream& rng);

/// Per-epoch loop: predict both robots, apply R1 GPS on schedule, then for
/// R2 either its own GPS fix or the range-constrained UT + SCI update.
/// Returns epochs+1 records (index 0 is the initial state).
std::vector<EpochRecord> run_scenario(const ScenarioConfig& config);

struct RunStats {
  double mean_error = 0.0;
  double rms_error = 0.0;
  double max_error = 0.0;
};

/// Error statistics over records with epoch > burn_in.
RunStats summarize_run(const std::vector<EpochRecord>& records, int burn_in);

/// Per-epoch trace CSV (truth, estimate, error, positional covariance,
/// update flags). Values are printed with round-trip precision so equal
/// runs produce byte-identical files.
void write_trace_csv(std::ostream& os, const std::vector<EpochRecord>& records);

}  // namespace coloc
