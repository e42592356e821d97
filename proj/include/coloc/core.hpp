#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace coloc {

// State layout: [x, y, vx, vy] in meters and meters/second.
using StateVec = Eigen::Vector4d;
using CovMat = Eigen::Matrix4d;
using PosVec = Eigen::Vector2d;

template <int N>
using VecN = Eigen::Matrix<double, N, 1>;
template <int N>
using MatN = Eigen::Matrix<double, N, N>;

inline PosVec position_of(const StateVec& x) { return x.head<2>(); }
inline Eigen::Vector2d velocity_of(const StateVec& x) { return x.tail<2>(); }

// Relative tolerance for the "symmetric PSD" covariance contract:
// eigenvalues >= -kPsdTol * trace are accepted.
inline constexpr double kPsdTol = 1e-9;

/// (m + m^T)/2. The result is exactly symmetric, and the operation is
/// exactly idempotent in floating point.
template <int N>
MatN<N> symmetrize(const MatN<N>& m) {
  if (!m.allFinite()) {
    throw std::invalid_argument("non-finite matrix");
  }
  MatN<N> out;
  for (int i = 0; i < N; ++i) {
    out(i, i) = m(i, i);
    for (int j = i + 1; j < N; ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

namespace detail {

// Cholesky of a symmetric matrix that tolerates zero pivots, so genuinely
// semi-definite inputs (zero covariance, rank-deficient blocks) factor
// cleanly. Returns false when a pivot or column residual is negative
// beyond `tol`, i.e. the matrix is indefinite at this tolerance.
template <int N>
bool psd_cholesky(const MatN<N>& a, MatN<N>& L, double tol) {
  L.setZero();
  for (int j = 0; j < N; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (d < -tol) return false;
    if (d <= tol) {
      // Zero pivot: the rest of the column must vanish for a PSD matrix.
      for (int i = j + 1; i < N; ++i) {
        double r = a(i, j);
        for (int k = 0; k < j; ++k) r -= L(i, k) * L(j, k);
        if (std::abs(r) > tol) return false;
        L(i, j) = 0.0;
      }
      L(j, j) = 0.0;
      continue;
    }
    L(j, j) = std::sqrt(d);
    for (int i = j + 1; i < N; ++i) {
      double r = a(i, j);
      for (int k = 0; k < j; ++k) r -= L(i, k) * L(j, k);
      L(i, j) = r / L(j, j);
    }
  }
  return true;
}

}  // namespace detail

/// Lower-triangular factor L with L*L^T == m (PSD Cholesky).
///
/// If the factorization fails, a jitter ladder eps*trace(m)/N*I with
/// eps in {1e-12, 1e-10, 1e-8} is tried before giving up.
template <int N>
MatN<N> cholesky_psd(const MatN<N>& m) {
  if (!m.allFinite()) {
    throw std::invalid_argument("non-finite matrix");
  }
  const MatN<N> sym = symmetrize<N>(m);
  const double scale = std::max(sym.trace(), 0.0);
  const double tol = 1e-12 * scale;
  constexpr double kJitter[] = {0.0, 1e-12, 1e-10, 1e-8};
  MatN<N> L;
  for (double eps : kJitter) {
    MatN<N> a = sym;
    a.diagonal().array() += eps * scale / N;
    if (detail::psd_cholesky<N>(a, L, tol)) return L;
  }
  throw std::runtime_error("covariance not PSD");
}

/// Symmetric within `rel_tol` and eigenvalues >= -kPsdTol*trace.
template <int N>
bool is_symmetric_psd(const MatN<N>& m, double rel_tol = 1e-9) {
  if (!m.allFinite()) return false;
  const double scale = std::max({m.cwiseAbs().maxCoeff(), 1.0});
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      if (std::abs(m(i, j) - m(j, i)) > rel_tol * scale) return false;
  Eigen::SelfAdjointEigenSolver<MatN<N>> eig(symmetrize<N>(m));
  return eig.eigenvalues().minCoeff() >= -kPsdTol * std::max(m.trace(), 1.0);
}

/// State estimate split into dependent/independent covariance parts for
/// split covariance intersection. Total covariance is p_dep + p_ind.
template <int N>
struct SplitT {
  VecN<N> state = VecN<N>::Zero();
  MatN<N> p_dep = MatN<N>::Zero();
  MatN<N> p_ind = MatN<N>::Zero();

  MatN<N> total() const { return p_dep + p_ind; }
};

using SplitEstimate = SplitT<4>;

}  // namespace coloc
