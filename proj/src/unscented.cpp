#include "coloc/unscented.hpp"

namespace coloc {

namespace {

// Below this separation the anchor->motion bearing is undefined.
constexpr double kMinSeparation = 1e-6;

}  // namespace

std::pair<std::vector<double>, std::vector<double>> ut_weights(
    const UtParams& params) {
  if (params.n <= 0) throw std::invalid_argument("ut_weights: n must be > 0");
  const double lambda = params.lambda();
  const double denom = params.n + lambda;
  if (denom == 0.0) throw std::invalid_argument("degenerate scaling");
  const int count = 2 * params.n + 1;
  std::vector<double> w_mean(count), w_cov(count);
  w_mean[0] = lambda / denom;
  w_cov[0] = w_mean[0] + (1.0 - params.alpha * params.alpha + params.beta);
  const double wi = 1.0 / (2.0 * denom);
  for (int i = 1; i < count; ++i) {
    w_mean[i] = wi;
    w_cov[i] = wi;
  }
  return {std::move(w_mean), std::move(w_cov)};
}

SigmaSet make_sigma_points(const StateVec& x, const CovMat& p,
                           const UtParams& params) {
  if (params.n != 4) {
    throw std::invalid_argument("make_sigma_points: state dimension is 4");
  }
  const double scaling = params.n + params.lambda();
  if (!(scaling > 0.0)) throw std::invalid_argument("degenerate scaling");
  if (!x.allFinite()) throw std::invalid_argument("non-finite matrix");

  const auto [w_mean, w_cov] = ut_weights(params);
  const Eigen::Matrix4d root = std::sqrt(scaling) * cholesky_psd<4>(p);

  SigmaSet set;
  set.points[0] = x;
  for (int i = 0; i < 4; ++i) {
    set.points[1 + i] = x + root.col(i);
    set.points[1 + i + 4] = x - root.col(i);
  }
  for (int i = 0; i < 9; ++i) {
    set.w_mean[i] = w_mean[i];
    set.w_cov[i] = w_cov[i];
  }
  return set;
}

RangePrediction predict_range(const StateVec& x_motion, const CovMat& p_motion,
                              const PosVec& anchor, double sensor_var,
                              const UtParams& params) {
  if (!anchor.allFinite()) throw std::invalid_argument("non-finite matrix");
  if (!(sensor_var >= 0.0)) {
    throw std::invalid_argument("predict_range: sensor_var must be >= 0");
  }
  const SigmaSet sigma = make_sigma_points(x_motion, p_motion, params);
  const auto [mean, cov] = unscented_transform(
      sigma, [&](const StateVec& pt) -> double {
        return (pt.head<2>() - anchor).norm();
      });
  RangePrediction pred;
  pred.d_hat = mean(0);
  pred.s = cov(0, 0) + sensor_var;
  return pred;
}

std::pair<StateVec, CovMat> range_constrained_estimate(
    const StateVec& x_motion, const CovMat& p_motion, const PosVec& anchor,
    double r_meas, const RangePrediction& pred) {
  if (!(r_meas >= 0.0)) throw std::invalid_argument("invalid range");
  const PosVec diff = x_motion.head<2>() - anchor;
  const double dist = diff.norm();
  if (!(dist > kMinSeparation)) {
    throw std::runtime_error("undefined bearing");
  }
  const PosVec u = diff / dist;

  StateVec x = x_motion;
  x.head<2>() += u * (r_meas - pred.d_hat);

  CovMat p = CovMat::Zero();
  p.topLeftCorner<2, 2>() =
      pred.s * (u * u.transpose()) + p_motion.topLeftCorner<2, 2>();
  p.bottomRightCorner<2, 2>() = p_motion.bottomRightCorner<2, 2>();
  return {x, symmetrize<4>(p)};
}

}  // namespace coloc
