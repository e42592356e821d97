#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coloc/core.hpp"
#include "coloc/kalman.hpp"

namespace coloc {

/// Settings for the omega search. The objective is the (log) determinant
/// of the fused total covariance; when det_block > 0, only the leading
/// det_block x det_block block enters the determinant.
struct OmegaSearch {
  double lower = 0.0;
  double upper = 1.0;
  double tolerance = 1e-4;
  double clamp = 1e-3;  // evaluation interval is [clamp, 1 - clamp]
  int grid_points = 21;
  int det_block = 0;  // 0 = full matrix
};

namespace detail {

template <int N>
bool is_zero_mat(const MatN<N>& m) {
  return m.cwiseAbs().maxCoeff() == 0.0;
}

// CI-inflated covariances P1 = p_dep/w + p_ind with the w in {0,1} limit
// convention: a zero dependent part drops the division entirely.
template <int N>
MatN<N> inflate(const MatN<N>& p_dep, const MatN<N>& p_ind, double w) {
  if (is_zero_mat<N>(p_dep)) return p_ind;
  if (w <= 0.0) throw std::invalid_argument("invalid weight");
  return p_dep / w + p_ind;
}

template <int N>
double log_det_block(const MatN<N>& m, int block) {
  const int k = (block > 0 && block < N) ? block : N;
  const Eigen::MatrixXd sub = m.topLeftCorner(k, k);
  return std::log(std::max(sub.determinant(), 0.0) + 1e-300);
}

}  // namespace detail

/// Split covariance intersection of a and b at a fixed weight:
///   P1 = a.p_dep/w + a.p_ind,  P2 = b.p_dep/(1-w) + b.p_ind
///   K = P1 (P1 + P2)^-1
///   x = a.state + K (b.state - a.state)
///   P = (I - K) P1
///   P_ind = (I - K) a.p_ind (I - K)^T + K b.p_ind K^T
///   P_dep = P - P_ind
/// omega in {0, 1} is accepted only when the corresponding dependent part
/// is zero (the limit convention). Throws "degenerate fusion" when
/// P1 + P2 is singular.
template <int N>
SplitT<N> sci_fuse(const SplitT<N>& a, const SplitT<N>& b, double omega) {
  if (!(omega >= 0.0 && omega <= 1.0)) {
    throw std::invalid_argument("invalid weight");
  }
  const MatN<N> p1 = detail::inflate<N>(a.p_dep, a.p_ind, omega);
  const MatN<N> p2 = detail::inflate<N>(b.p_dep, b.p_ind, 1.0 - omega);

  const MatN<N> sum = symmetrize<N>(p1 + p2);
  Eigen::SelfAdjointEigenSolver<MatN<N>> eig(sum);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12) {
    throw std::runtime_error("degenerate fusion");
  }
  const MatN<N> k = p1 * sum.inverse();
  const MatN<N> ik = MatN<N>::Identity() - k;

  SplitT<N> out;
  out.state = a.state + k * (b.state - a.state);
  const MatN<N> total = symmetrize<N>(ik * p1);
  out.p_ind = symmetrize<N>(ik * a.p_ind * ik.transpose() +
                            k * b.p_ind * k.transpose());
  out.p_dep = symmetrize<N>(total - out.p_ind);
  return out;
}

namespace detail {

// Fused total covariance only, for the omega objective.
template <int N>
MatN<N> fused_total(const SplitT<N>& a, const SplitT<N>& b, double omega) {
  const MatN<N> p1 = inflate<N>(a.p_dep, a.p_ind, omega);
  const MatN<N> p2 = inflate<N>(b.p_dep, b.p_ind, 1.0 - omega);
  const MatN<N> sum = symmetrize<N>(p1 + p2);
  const MatN<N> k = p1 * sum.inverse();
  return symmetrize<N>((MatN<N>::Identity() - k) * p1);
}

}  // namespace detail

/// Argmin over omega of the fused-covariance log-determinant, evaluated on
/// [clamp, 1 - clamp]. A coarse grid seeds a golden-section refinement
/// (the matrix objective is not guaranteed unimodal globally). Grid ties
/// break toward 0.5 so symmetric inputs resolve to the symmetric weight.
template <int N>
double optimize_omega(const SplitT<N>& a, const SplitT<N>& b,
                      const OmegaSearch& search = {}) {
  const double lo = std::max(search.lower, search.clamp);
  const double hi = std::min(search.upper, 1.0 - search.clamp);
  if (!(lo < hi)) throw std::invalid_argument("invalid weight");
  const auto objective = [&](double w) {
    return detail::log_det_block<N>(detail::fused_total<N>(a, b, w),
                                    search.det_block);
  };

  const int grid = std::max(search.grid_points, 3);
  double best_w = lo;
  double best_f = objective(lo);
  for (int i = 1; i < grid; ++i) {
    const double w = lo + (hi - lo) * i / (grid - 1);
    const double f = objective(w);
    if (f < best_f - 1e-15 ||
        (std::abs(f - best_f) <= 1e-15 &&
         std::abs(w - 0.5) < std::abs(best_w - 0.5))) {
      best_f = f;
      best_w = w;
    }
  }

  const double cell = (hi - lo) / (grid - 1);
  double left = std::max(lo, best_w - cell);
  double right = std::min(hi, best_w + cell);

  // Golden-section refinement.
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = right - kInvPhi * (right - left);
  double x2 = left + kInvPhi * (right - left);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (right - left > search.tolerance) {
    if (f1 < f2) {
      right = x2;
      x2 = x1;
      f2 = f1;
      x1 = right - kInvPhi * (right - left);
      f1 = objective(x1);
    } else {
      left = x1;
      x1 = x2;
      f1 = f2;
      x2 = left + kInvPhi * (right - left);
      f2 = objective(x2);
    }
  }
  return 0.5 * (left + right);
}

/// sci_fuse at the optimized weight.
template <int N>
SplitT<N> fuse(const SplitT<N>& a, const SplitT<N>& b,
               const OmegaSearch& search = {}) {
  return sci_fuse<N>(a, b, optimize_omega<N>(a, b, search));
}

/// Which covariance the total-P Joseph update reads on its right-hand
/// side. gain_on_total updates the prior total covariance;
/// independent_rhs reproduces the printed form that feeds the independent
/// part into the total update (making P equal P_ind after every fix).
enum class GpsSplitVariant { gain_on_total, independent_rhs };

/// GPS measurement update of a split estimate. The gain is computed from
/// the total covariance; total and independent parts are both updated in
/// Joseph form with that one gain, and the dependent part is re-derived
/// as their difference.
SplitEstimate gps_split_update(
    const SplitEstimate& est, const PosVec& z, const GpsModel& model,
    GpsSplitVariant variant = GpsSplitVariant::gain_on_total);

}  // namespace coloc
