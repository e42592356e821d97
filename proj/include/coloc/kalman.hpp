#pragma once

#include "coloc/core.hpp"

namespace coloc {

/// Constant-velocity transition model: x <- F x, P <- F P F^T + Q.
struct LinearModel {
  Eigen::Matrix4d F = Eigen::Matrix4d::Identity();
  CovMat Q = CovMat::Zero();
  double dt = 1.0;
};

/// Position-only GPS observation: z = H x + v, v ~ N(0, R).
struct GpsModel {
  Eigen::Matrix<double, 2, 4> H;
  Eigen::Matrix2d R;
};

struct Estimate {
  StateVec x = StateVec::Zero();
  CovMat p = CovMat::Zero();
};

/// Constant-velocity model with white-noise-acceleration process noise of
/// spectral density q (m^2/s^3) on each axis.
LinearModel cv_model(double dt, double q);

/// H = [I2 0], R = noise_std^2 * I2.
GpsModel gps_position_model(double noise_std);

Estimate kf_predict(const Estimate& est, const LinearModel& model);

/// Measurement update with the Joseph-form covariance
/// P <- (I - K H) P (I - K H)^T + K R K^T.
/// Throws "degenerate measurement update" when the innovation covariance
/// has condition number above 1e12.
Estimate kf_update(const Estimate& est, const PosVec& z,
                   const GpsModel& model);

}  // namespace coloc
