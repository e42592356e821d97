#pragma once

#include <array>
#include <cstdint>

namespace coloc {

/// Seeded, splittable random stream. Two streams with the same
/// (seed, stream_id) produce bit-identical sequences on any platform:
/// the generator (xoshiro256++) and the Gaussian transform (Box-Muller)
/// are fully specified here, unlike std::normal_distribution.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01();

  /// Uniform in [a, b).
  double uniform(double a, double b);

  /// Uniform integer in [0, n), unbiased (rejection). n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n);

  /// Standard normal draw (Box-Muller, second value cached).
  double normal();

 private:
  std::array<std::uint64_t, 4> s_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Draw from N(mean, stddev^2). stddev == 0 returns mean exactly.
/// Throws std::invalid_argument on stddev < 0.
double sample_gaussian(RngStream& rng, double mean, double stddev);

/// Deterministic 64-bit mix of (seed, salt) for deriving child seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

/// Inverse standard normal CDF (Acklam's method plus one Halley
/// refinement; accurate to ~1e-15 over (0, 1)).
double norm_quantile(double p);

/// Quantile of |N(0, sigma^2)| at probability p in [0, 1).
double half_normal_quantile(double p, double sigma);

}  // namespace coloc
