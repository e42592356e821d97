#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "coloc/core.hpp"

namespace coloc {

/// Scaled unscented transform parameters. lambda = alpha^2 (n + kappa) - n.
/// Defaults follow the usual Gaussian tuning with kappa = 3 - n.
struct UtParams {
  double alpha = 1.0;
  double beta = 2.0;
  double kappa = -1.0;
  int n = 4;

  double lambda() const { return alpha * alpha * (n + kappa) - n; }
};

/// 2n+1 sigma points over the 4-dimensional state with their mean and
/// covariance weights.
struct SigmaSet {
  std::array<StateVec, 9> points;
  std::array<double, 9> w_mean;
  std::array<double, 9> w_cov;
};

/// Weights of the scaled UT for arbitrary dimension params.n:
///   W0_m = lambda/(n+lambda), W0_c = W0_m + (1 - alpha^2 + beta),
///   Wi = 1/(2(n+lambda)) for i >= 1.
/// Throws "degenerate scaling" when n + lambda == 0.
std::pair<std::vector<double>, std::vector<double>> ut_weights(
    const UtParams& params);

/// Point 0 is x; points i and i+n sit at x +/- column i of the scaled
/// Cholesky factor sqrt((n+lambda) P).
SigmaSet make_sigma_points(const StateVec& x, const CovMat& p,
                           const UtParams& params);

struct RangePrediction {
  double d_hat = 0.0;  // predicted range, meters
  double s = 0.0;      // predicted range variance incl. sensor noise, m^2
};

/// UT mean/variance of the distance from the positional sub-state to
/// `anchor`, plus the range sensor variance.
RangePrediction predict_range(const StateVec& x_motion, const CovMat& p_motion,
                              const PosVec& anchor, double sensor_var,
                              const UtParams& params);

/// Range-constrained full-state estimate: the position moves from the
/// motion estimate along the anchor->motion unit vector by the range
/// innovation, the positional covariance becomes u S u^T plus the motion
/// positional block. Velocity mean/covariance pass through unchanged with
/// the position-velocity cross block zeroed.
std::pair<StateVec, CovMat> range_constrained_estimate(
    const StateVec& x_motion, const CovMat& p_motion, const PosVec& anchor,
    double r_meas, const RangePrediction& pred);

namespace detail {

template <typename T>
struct ut_dim : std::integral_constant<int, T::RowsAtCompileTime> {};
template <>
struct ut_dim<double> : std::integral_constant<int, 1> {};

inline double ut_as_vec(double v, int) { return v; }
template <typename T>
double ut_as_vec(const T& v, int i) {
  return v(i);
}

}  // namespace detail

/// Weighted mean and covariance of the sigma points mapped through f.
/// f may return double or a fixed-size Eigen column vector.
/// Throws "transform overflow" if f produces a non-finite value.
template <typename F>
auto unscented_transform(const SigmaSet& sigma, F&& f) {
  using Out = std::remove_cvref_t<decltype(f(sigma.points[0]))>;
  constexpr int M = detail::ut_dim<Out>::value;
  using MeanT = VecN<M>;
  using CovT = MatN<M>;

  std::array<MeanT, 9> mapped;
  for (int i = 0; i < 9; ++i) {
    const Out y = f(sigma.points[i]);
    for (int r = 0; r < M; ++r) mapped[i](r) = detail::ut_as_vec(y, r);
    if (!mapped[i].allFinite()) throw std::runtime_error("transform overflow");
  }
  MeanT mean = MeanT::Zero();
  for (int i = 0; i < 9; ++i) mean += sigma.w_mean[i] * mapped[i];
  CovT cov = CovT::Zero();
  for (int i = 0; i < 9; ++i) {
    const MeanT d = mapped[i] - mean;
    cov += sigma.w_cov[i] * (d * d.transpose());
  }
  return std::make_pair(mean, symmetrize<M>(cov));
}

}  // namespace coloc
