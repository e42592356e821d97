#include "coloc/sci.hpp"

namespace coloc {

SplitEstimate gps_split_update(const SplitEstimate& est, const PosVec& z,
                               const GpsModel& model,
                               GpsSplitVariant variant) {
  const CovMat p_total = est.total();
  const Eigen::Matrix2d s =
      symmetrize<2>(model.H * p_total * model.H.transpose() + model.R);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(s);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12) {
    throw std::runtime_error("degenerate measurement update");
  }
  const Eigen::Matrix<double, 4, 2> k =
      p_total * model.H.transpose() * s.inverse();
  const Eigen::Matrix4d ikh = Eigen::Matrix4d::Identity() - k * model.H;
  const CovMat krk = k * model.R * k.transpose();

  SplitEstimate out;
  out.state = est.state + k * (z - model.H * est.state);
  out.p_ind = symmetrize<4>(ikh * est.p_ind * ikh.transpose() + krk);
  const CovMat rhs =
      variant == GpsSplitVariant::gain_on_total ? p_total : est.p_ind;
  const CovMat total = symmetrize<4>(ikh * rhs * ikh.transpose() + krk);
  out.p_dep = symmetrize<4>(total - out.p_ind);
  return out;
}

}  // namespace coloc
