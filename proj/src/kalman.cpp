#include "coloc/kalman.hpp"

#include <stdexcept>

namespace coloc {

LinearModel cv_model(double dt, double q) {
  if (!(dt > 0.0)) throw std::invalid_argument("cv_model: dt must be > 0");
  if (!(q >= 0.0)) throw std::invalid_argument("cv_model: q must be >= 0");
  LinearModel m;
  m.dt = dt;
  m.F.setIdentity();
  m.F(0, 2) = dt;
  m.F(1, 3) = dt;
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  m.Q.setZero();
  m.Q(0, 0) = m.Q(1, 1) = q * dt3 / 3.0;
  m.Q(2, 2) = m.Q(3, 3) = q * dt;
  m.Q(0, 2) = m.Q(2, 0) = q * dt2 / 2.0;
  m.Q(1, 3) = m.Q(3, 1) = q * dt2 / 2.0;
  return m;
}

GpsModel gps_position_model(double noise_std) {
  if (!(noise_std >= 0.0)) {
    throw std::invalid_argument("negative standard deviation");
  }
  GpsModel m;
  m.H.setZero();
  m.H(0, 0) = 1.0;
  m.H(1, 1) = 1.0;
  m.R = noise_std * noise_std * Eigen::Matrix2d::Identity();
  return m;
}

Estimate kf_predict(const Estimate& est, const LinearModel& model) {
  Estimate out;
  out.x = model.F * est.x;
  out.p = symmetrize<4>(model.F * est.p * model.F.transpose() + model.Q);
  return out;
}

Estimate kf_update(const Estimate& est, const PosVec& z,
                   const GpsModel& model) {
  const Eigen::Matrix2d s =
      symmetrize<2>(model.H * est.p * model.H.transpose() + model.R);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(s);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12) {
    throw std::runtime_error("degenerate measurement update");
  }
  const Eigen::Matrix<double, 4, 2> k =
      est.p * model.H.transpose() * s.inverse();
  Estimate out;
  out.x = est.x + k * (z - model.H * est.x);
  const Eigen::Matrix4d ikh = Eigen::Matrix4d::Identity() - k * model.H;
  out.p = symmetrize<4>(ikh * est.p * ikh.transpose() +
                        k * model.R * k.transpose());
  return out;
}

}  // namespace coloc
