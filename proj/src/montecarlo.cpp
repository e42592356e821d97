#include "coloc/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace coloc {

namespace {

constexpr std::uint64_t kShiftStream = 0xA7150000ULL;
constexpr std::uint64_t kPerRunStreamBase = 0x52000000ULL;
constexpr std::uint64_t kScenarioSeedSalt = 0x53454544ULL;

double radical_inverse(int base, int i) {
  double inv = 1.0 / base;
  double digit = inv;
  double out = 0.0;
  while (i > 0) {
    out += (i % base) * digit;
    i /= base;
    digit *= inv;
  }
  return out;
}

// Quantile position of axis j for run i. Stratified mode uses a seeded
// Halton set in pairwise-coprime bases. A report bin of the base-b axis
// selects indices in near-arithmetic progressions with spacing b^k, over
// which a radical inverse in a coprime base runs through its digit space
// with full period, so every bin (tail bins included) sees a balanced
// mix of the other axes.
double axis_quantile(const SweepConfig& config, int run_index, int axis,
                     RngStream& iid_rng) {
  if (!config.stratified) return iid_rng.uniform01();
  RngStream shift_rng(config.master_seed, kShiftStream);
  double shift = 0.0;
  for (int j = 0; j <= axis; ++j) shift = shift_rng.uniform01();
  double v = 0.0;
  switch (axis) {
    case 0: v = radical_inverse(2, run_index); break;   // range noise
    case 1: v = radical_inverse(3, run_index); break;   // gps noise
    case 2: v = radical_inverse(5, run_index); break;   // vel offset
    case 3: v = radical_inverse(7, run_index); break;   // pos offset
    case 4: v = radical_inverse(11, run_index); break;  // path
  }
  v += shift;
  return v - std::floor(v);
}

int quantile_choice(double q, int count) {
  return std::min(static_cast<int>(q * count), count - 1);
}

PathKind quantile_path(double q) {
  switch (quantile_choice(q, 3)) {
    case 0: return PathKind::circle;
    case 1: return PathKind::rectangle;
    default: return PathKind::donut;
  }
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

void SweepConfig::validate() const {
  if (num_runs <= 0) throw std::invalid_argument("num_runs must be > 0");
  base.validate();
  if (!(range_noise_sigma >= 0.0))
    throw std::invalid_argument("range_noise_sigma must be >= 0");
  if (!(gps_noise_sigma >= 0.0))
    throw std::invalid_argument("gps_noise_sigma must be >= 0");
  if (!(vel_offset_sigma >= 0.0))
    throw std::invalid_argument("vel_offset_sigma must be >= 0");
  if (pos_offset_max < 0)
    throw std::invalid_argument("pos_offset_max must be >= 0");
  if (!(gps_noise_ratio_r2 >= 0.0))
    throw std::invalid_argument("gps_noise_ratio_r2 must be >= 0");
}

ScenarioConfig sample_run(const SweepConfig& config, int run_index) {
  config.validate();
  if (run_index < 0 || run_index >= config.num_runs) {
    throw std::invalid_argument("run_index out of range");
  }
  RngStream rng(config.master_seed, kPerRunStreamBase + run_index);
  const double qr = axis_quantile(config, run_index, 0, rng);
  const double qg = axis_quantile(config, run_index, 1, rng);
  const double qv = axis_quantile(config, run_index, 2, rng);
  const double qp = axis_quantile(config, run_index, 3, rng);
  const double qk = axis_quantile(config, run_index, 4, rng);

  ScenarioConfig c = config.base;
  c.range_noise_std = half_normal_quantile(qr, config.range_noise_sigma);
  const double gps_std = half_normal_quantile(qg, config.gps_noise_sigma);
  c.gps_noise_std_r1 = gps_std;
  c.gps_noise_std_r2 = gps_std * config.gps_noise_ratio_r2;
  c.init_vel_offset_std = half_normal_quantile(qv, config.vel_offset_sigma);
  c.init_pos_offset = quantile_choice(qp, config.pos_offset_max + 1);
  c.r2_path.kind = quantile_path(qk);
  if (config.randomize_start) {
    c.r1_path.phase = rng.uniform(0.0, c.r1_path.perimeter());
    c.r2_path.phase = rng.uniform(0.0, c.r2_path.perimeter());
  }
  c.seed = derive_seed(config.master_seed,
                       kScenarioSeedSalt + static_cast<std::uint64_t>(run_index));
  return c;
}

std::vector<RunResult> run_batch(const SweepConfig& config, int workers,
                                 const std::function<void(int, int)>& progress) {
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  config.validate();
  const int n = config.num_runs;
  std::vector<RunResult> results(n);

  std::atomic<int> next{0};
  std::atomic<int> done{0};
  auto work = [&]() {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      RunResult& r = results[i];
      r.run_index = i;
      const ScenarioConfig sc = sample_run(config, i);
      r.range_noise_std = sc.range_noise_std;
      r.gps_noise_std = sc.gps_noise_std_r1;  // the sampled scale
      r.vel_offset_std = sc.init_vel_offset_std;
      r.pos_offset = static_cast<int>(std::lround(sc.init_pos_offset));
      r.path = sc.r2_path.kind;
      try {
        const auto records = run_scenario(sc);
        const RunStats stats = summarize_run(records, sc.burn_in);
        r.mean_error = stats.mean_error;
        r.rms_error = stats.rms_error;
        r.max_error = stats.max_error;
      } catch (const std::exception& e) {
        r.diverged = true;
        r.failure = e.what();
        r.mean_error = nan_value();
        r.rms_error = nan_value();
        r.max_error = nan_value();
      }
      if (progress) progress(done.fetch_add(1) + 1, n);
    }
  };

  const int thread_count = std::min(workers, n);
  if (thread_count <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  // Global 3-sigma divergence rule over the whole batch.
  double sum = 0.0, sum_sq = 0.0;
  int ok = 0;
  for (const auto& r : results) {
    if (r.failure.empty()) {
      sum += r.mean_error;
      sum_sq += r.mean_error * r.mean_error;
      ++ok;
    }
  }
  if (ok > 0) {
    const double mean = sum / ok;
    const double var = std::max(sum_sq / ok - mean * mean, 0.0);
    const double limit = mean + 3.0 * std::sqrt(var);
    for (auto& r : results) {
      if (r.failure.empty() && r.mean_error > limit) r.diverged = true;
    }
  }
  return results;
}

std::string to_string(Axis axis) {
  switch (axis) {
    case Axis::range_noise: return "range_noise";
    case Axis::gps_noise: return "gps_noise";
    case Axis::pos_offset: return "pos_offset";
    case Axis::vel_offset: return "vel_offset";
    case Axis::path: return "path";
  }
  return "range_noise";
}

std::vector<double> default_bin_edges(Axis axis, const SweepConfig& config) {
  double sigma = 0.0;
  switch (axis) {
    case Axis::range_noise: sigma = config.range_noise_sigma; break;
    case Axis::gps_noise: sigma = config.gps_noise_sigma; break;
    case Axis::vel_offset: sigma = config.vel_offset_sigma; break;
    case Axis::pos_offset: {
      std::vector<double> edges;
      for (int k = 0; k <= config.pos_offset_max; ++k) edges.push_back(k);
      return edges;
    }
    case Axis::path: return {};
  }
  std::vector<double> edges;
  for (int k = 0; k <= 6; ++k) edges.push_back(k * sigma / 2.0);
  return edges;
}

namespace {

double axis_value(const RunResult& r, Axis axis) {
  switch (axis) {
    case Axis::range_noise: return r.range_noise_std;
    case Axis::gps_noise: return r.gps_noise_std;
    case Axis::pos_offset: return r.pos_offset;
    case Axis::vel_offset: return r.vel_offset_std;
    case Axis::path: return static_cast<double>(static_cast<int>(r.path));
  }
  return 0.0;
}

std::string edge_label(double edge) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", edge);
  return buf;
}

BinSummary summarize_bin(const std::string& label,
                         const std::vector<const RunResult*>& runs) {
  BinSummary s;
  s.label = label;
  s.num_runs = static_cast<int>(runs.size());
  std::vector<double> errors;
  errors.reserve(runs.size());
  int diverged = 0;
  for (const RunResult* r : runs) {
    if (r->diverged) ++diverged;
    if (r->failure.empty()) errors.push_back(r->mean_error);
  }
  if (s.num_runs == 0) {
    s.mean = s.std_dev = s.median = s.max = s.min = nan_value();
    s.divergence_pct = nan_value();
    return s;
  }
  s.divergence_pct = 100.0 * diverged / s.num_runs;
  if (errors.empty()) {
    s.mean = s.std_dev = s.median = s.max = s.min = nan_value();
    return s;
  }
  std::sort(errors.begin(), errors.end());
  const std::size_t n = errors.size();
  const double sum = std::accumulate(errors.begin(), errors.end(), 0.0);
  s.mean = sum / n;
  double var = 0.0;
  for (double e : errors) var += (e - s.mean) * (e - s.mean);
  s.std_dev = std::sqrt(var / n);
  s.median = n % 2 == 1 ? errors[n / 2]
                        : 0.5 * (errors[n / 2 - 1] + errors[n / 2]);
  s.min = errors.front();
  s.max = errors.back();
  return s;
}

}  // namespace

std::vector<BinSummary> bin_and_summarize(const std::vector<RunResult>& results,
                                          Axis axis,
                                          const std::vector<double>& edges) {
  std::vector<std::string> labels;
  std::vector<std::vector<const RunResult*>> bins;

  if (axis == Axis::path) {
    // Categorical bins, reported circle / donut / rectangle.
    const PathKind kinds[] = {PathKind::circle, PathKind::donut,
                              PathKind::rectangle};
    for (PathKind k : kinds) {
      labels.push_back(to_string(k));
      bins.emplace_back();
      for (const auto& r : results) {
        if (r.path == k) bins.back().push_back(&r);
      }
    }
  } else {
    if (edges.empty()) throw std::invalid_argument("bin edges required");
    for (std::size_t k = 0; k < edges.size(); ++k) {
      labels.push_back(edge_label(edges[k]));
      bins.emplace_back();
    }
    for (const auto& r : results) {
      const double v = axis_value(r, axis);
      if (v < edges.front()) continue;  // below the first edge: not binned
      std::size_t k = edges.size() - 1;
      for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
        if (v >= edges[j] && v < edges[j + 1]) {
          k = j;
          break;
        }
      }
      bins[k].push_back(&r);
    }
  }

  std::vector<BinSummary> out;
  out.reserve(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    out.push_back(summarize_bin(labels[k], bins[k]));
  }
  return out;
}

void export_summary_csv(std::ostream& os,
                        const std::vector<BinSummary>& summaries) {
  os << "bin,num_runs,mean_m,std_m,median_m,max_m,min_m,divergence_pct\n";
  char buf[64];
  auto field = [&](double v) -> std::string {
    if (std::isnan(v)) return "";
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
  };
  for (const auto& s : summaries) {
    os << s.label << ',' << s.num_runs << ',' << field(s.mean) << ','
       << field(s.std_dev) << ',' << field(s.median) << ',' << field(s.max)
       << ',' << field(s.min) << ',' << field(s.divergence_pct) << '\n';
  }
}

std::vector<BinSummary> parse_summary_csv(std::istream& is) {
  std::vector<BinSummary> out;
  std::string line;
  if (!std::getline(is, line)) return out;
  if (line != "bin,num_runs,mean_m,std_m,median_m,max_m,min_m,divergence_pct") {
    throw std::runtime_error("unrecognized summary header: " + line);
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) fields.push_back(cur);
    while (fields.size() < 8) fields.emplace_back();
    auto num = [](const std::string& f) {
      return f.empty() ? nan_value() : std::stod(f);
    };
    BinSummary s;
    s.label = fields[0];
    s.num_runs = std::stoi(fields[1]);
    s.mean = num(fields[2]);
    s.std_dev = num(fields[3]);
    s.median = num(fields[4]);
    s.max = num(fields[5]);
    s.min = num(fields[6]);
    s.divergence_pct = num(fields[7]);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace coloc
