#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coloc/rng.hpp"
#include "coloc/sci.hpp"

using namespace coloc;

namespace {

template <int N>
MatN<N> random_spd(RngStream& rng, double floor = 0.1) {
  MatN<N> a;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) a(i, j) = rng.uniform(-1.5, 1.5);
  return MatN<N>(a * a.transpose() + floor * MatN<N>::Identity());
}

template <int N>
VecN<N> random_vec(RngStream& rng, double scale = 10.0) {
  VecN<N> v;
  for (int i = 0; i < N; ++i) v(i) = rng.uniform(-scale, scale);
  return v;
}

template <int N>
SplitT<N> random_split(RngStream& rng) {
  SplitT<N> s;
  s.state = random_vec<N>(rng);
  s.p_dep = random_spd<N>(rng);
  s.p_ind = random_spd<N>(rng);
  return s;
}

// Brute-force argmin of the fused determinant over a 1e-4 grid.
template <int N>
double grid_omega_oracle(const SplitT<N>& a, const SplitT<N>& b,
                         int det_block = 0) {
  double best_w = 1e-3;
  double best_det = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 9980; ++i) {
    const double w = 1e-3 + i * 1e-4;
    const SplitT<N> fused = sci_fuse<N>(a, b, w);
    const MatN<N> total = fused.total();
    const int k = det_block > 0 ? det_block : N;
    const double det = total.topLeftCorner(k, k).determinant();
    if (det < best_det) {
      best_det = det;
      best_w = w;
    }
  }
  return best_w;
}

}  // namespace

TEST_CASE("sci_fuse: identical fully independent inputs halve the covariance") {
  SplitT<4> a;
  a.state << 1.0, 2.0, 3.0, 4.0;
  a.p_ind = CovMat::Identity();
  const SplitT<4> fused = fuse<4>(a, a);
  CHECK((fused.state - a.state).norm() <= 1e-12);
  CHECK((fused.total() - 0.5 * CovMat::Identity()).norm() <= 1e-10);
}

TEST_CASE("sci_fuse: equal states give zero innovation for any weight") {
  RngStream rng(53, 0);
  SplitT<4> a = random_split<4>(rng);
  SplitT<4> b = random_split<4>(rng);
  b.state = a.state;
  for (double w : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const SplitT<4> fused = sci_fuse<4>(a, b, w);
    CHECK((fused.state - a.state).norm() <= 1e-10);
  }
}

TEST_CASE("sci_fuse: scalar fully dependent example") {
  SplitT<1> a, b;
  a.state(0) = 0.0;
  a.p_dep(0, 0) = 4.0;
  b.state(0) = 0.0;
  b.p_dep(0, 0) = 1.0;
  const SplitT<1> fused = sci_fuse<1>(a, b, 0.5);
  // P1 = 8, P2 = 2, K = 0.8, fused P = 0.2 * 8 = 1.6.
  CHECK(fused.total()(0, 0) == doctest::Approx(1.6).epsilon(1e-12));
  CHECK(fused.p_ind(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fused.p_dep(0, 0) == doctest::Approx(1.6).epsilon(1e-12));
}

TEST_CASE("sci_fuse: weight domain") {
  RngStream rng(59, 0);
  const SplitT<4> a = random_split<4>(rng);
  const SplitT<4> b = random_split<4>(rng);
  CHECK_THROWS_WITH_AS(sci_fuse<4>(a, b, -0.1), "invalid weight",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(sci_fuse<4>(a, b, 1.1), "invalid weight",
                       std::invalid_argument);
  // omega = 0 divides the (nonzero) dependent part of a.
  CHECK_THROWS_WITH_AS(sci_fuse<4>(a, b, 0.0), "invalid weight",
                       std::invalid_argument);
  // ...but is the stated limit convention when that part vanishes.
  SplitT<4> a0 = a;
  a0.p_dep.setZero();
  CHECK_NOTHROW(sci_fuse<4>(a0, b, 0.0));
}

TEST_CASE("sci_fuse: fully degenerate pair is rejected") {
  SplitT<4> a, b;  // all covariances zero
  CHECK_THROWS_WITH_AS(sci_fuse<4>(a, b, 0.5), "degenerate fusion",
                       std::runtime_error);
}

TEST_CASE("optimize_omega: scalar fully dependent pair clamps low") {
  SplitT<1> a, b;
  a.p_dep(0, 0) = 4.0;
  b.p_dep(0, 0) = 1.0;
  const double w = optimize_omega<1>(a, b);
  const double oracle = grid_omega_oracle<1>(a, b);
  CHECK(std::abs(w - oracle) <= 1e-3);
  CHECK(w <= 2e-3);  // lower clamp: full trust in the tighter estimate
  const SplitT<1> fused = sci_fuse<1>(a, b, w);
  CHECK(fused.total()(0, 0) == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("optimize_omega: symmetric inputs settle at one half") {
  RngStream rng(61, 0);
  SplitT<4> a = random_split<4>(rng);
  const double w = optimize_omega<4>(a, a);
  CHECK(w == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("optimize_omega: monotone objective when b is fully independent") {
  RngStream rng(67, 0);
  SplitT<4> a = random_split<4>(rng);
  SplitT<4> b = random_split<4>(rng);
  b.p_dep.setZero();
  // Oracle: evaluate the objective on a grid and verify monotonicity.
  // P1 = p_dep/w + p_ind shrinks as w grows while P2 stays fixed, so the
  // objective decreases toward the upper clamp.
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 99; ++i) {
    const double w = i / 100.0;
    const double det = sci_fuse<4>(a, b, w).total().determinant();
    CHECK(det < prev);
    prev = det;
  }
  const double w = optimize_omega<4>(a, b);
  const double oracle = grid_omega_oracle<4>(a, b);
  CHECK(std::abs(w - oracle) <= 1e-3);
  CHECK(w >= 1.0 - 2e-3);
}

TEST_CASE("optimize_omega: matches the grid oracle on random pairs") {
  RngStream rng(71, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const SplitT<2> a = random_split<2>(rng);
    const SplitT<2> b = random_split<2>(rng);
    const double w = optimize_omega<2>(a, b);
    const double oracle = grid_omega_oracle<2>(a, b);
    // Compare objectives, not arguments: near-flat objectives can have
    // distant near-ties, what matters is matching the oracle's minimum.
    const double f_w = sci_fuse<2>(a, b, w).total().determinant();
    const double f_o = sci_fuse<2>(a, b, oracle).total().determinant();
    CHECK(f_w <= f_o * (1.0 + 1e-6) + 1e-12);
    CHECK(w >= 1e-3);
    CHECK(w <= 1.0 - 1e-3);
  }
}

TEST_CASE("optimize_omega: argmin invariant under uniform covariance scaling") {
  RngStream rng(73, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const SplitT<4> a = random_split<4>(rng);
    const SplitT<4> b = random_split<4>(rng);
    SplitT<4> as = a, bs = b;
    const double c = 37.5;
    as.p_dep *= c;
    as.p_ind *= c;
    bs.p_dep *= c;
    bs.p_ind *= c;
    CHECK(std::abs(optimize_omega<4>(a, b) - optimize_omega<4>(as, bs)) <=
          1e-3);
  }
}

TEST_CASE("fuse: gain form equals information form for independent pairs") {
  RngStream rng(79, 0);
  for (int trial = 0; trial < 100; ++trial) {
    SplitT<4> a, b;
    a.state = random_vec<4>(rng);
    b.state = random_vec<4>(rng);
    a.p_ind = random_spd<4>(rng);
    b.p_ind = random_spd<4>(rng);

    const SplitT<4> fused = fuse<4>(a, b);
    const CovMat info =
        (a.p_ind.inverse() + b.p_ind.inverse()).inverse();
    const StateVec x_info =
        info * (a.p_ind.inverse() * a.state + b.p_ind.inverse() * b.state);
    CHECK((fused.total() - info).norm() <= 1e-8 * info.norm());
    CHECK((fused.state - x_info).norm() <= 1e-8 * (1.0 + x_info.norm()));
  }
}

TEST_CASE("fuse: first-epoch configuration keeps a valid split") {
  RngStream rng(83, 0);
  for (int trial = 0; trial < 50; ++trial) {
    SplitT<4> motion, range;
    motion.state = random_vec<4>(rng);
    motion.p_ind = random_spd<4>(rng);  // P_dep = 0 at t = 0
    range.state = random_vec<4>(rng);
    range.p_dep = random_spd<4>(rng);  // fully dependent by construction

    const SplitT<4> fused = fuse<4>(motion, range);
    CHECK(is_symmetric_psd<4>(fused.p_ind));
    CHECK(is_symmetric_psd<4>(fused.p_dep));
    CHECK(is_symmetric_psd<4>(fused.total()));

    // Fused covariance never exceeds the motion input (P1 = p_ind here).
    Eigen::SelfAdjointEigenSolver<CovMat> eig(
        CovMat(motion.p_ind - fused.total()));
    CHECK(eig.eigenvalues().minCoeff() >= -1e-9 * motion.p_ind.trace());
  }
}

TEST_CASE("fuse: monotone information at the chosen weight") {
  RngStream rng(89, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const SplitT<4> a = random_split<4>(rng);
    const SplitT<4> b = random_split<4>(rng);
    const double w = optimize_omega<4>(a, b);
    const CovMat p1 = a.p_dep / w + a.p_ind;
    const CovMat p2 = b.p_dep / (1.0 - w) + b.p_ind;
    const double det = sci_fuse<4>(a, b, w).total().determinant();
    CHECK(det <= p1.determinant() * (1.0 + 1e-9));
    CHECK(det <= p2.determinant() * (1.0 + 1e-9));
  }
}

TEST_CASE("split closure: fuse totals agree with the information route") {
  RngStream rng(97, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const SplitT<4> a = random_split<4>(rng);
    const SplitT<4> b = random_split<4>(rng);
    const double w = rng.uniform(0.05, 0.95);
    const SplitT<4> fused = sci_fuse<4>(a, b, w);

    const CovMat p1 = a.p_dep / w + a.p_ind;
    const CovMat p2 = b.p_dep / (1.0 - w) + b.p_ind;
    const CovMat ref = (p1.inverse() + p2.inverse()).inverse();
    const double scale = std::max(ref.norm(), 1.0);
    CHECK((fused.total() - ref).norm() <= 1e-9 * scale);
    CHECK(is_symmetric_psd<4>(fused.p_ind));
    CHECK(is_symmetric_psd<4>(fused.p_dep));
  }
}

TEST_CASE("gps_split_update: zero dependent part reduces to the plain KF") {
  RngStream rng(101, 0);
  const GpsModel gps = gps_position_model(1.7);
  for (int trial = 0; trial < 20; ++trial) {
    SplitEstimate est;
    est.state = random_vec<4>(rng);
    est.p_ind = random_spd<4>(rng);
    const PosVec z(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0));

    const SplitEstimate out = gps_split_update(est, z, gps);
    Estimate kf;
    kf.x = est.state;
    kf.p = est.p_ind;
    const Estimate ref = kf_update(kf, z, gps);
    CHECK((out.state - ref.x).norm() <= 1e-10 * (1.0 + ref.x.norm()));
    CHECK((out.total() - ref.p).norm() <= 1e-10 * ref.p.norm());
    CHECK(out.p_dep.norm() <= 1e-10 * ref.p.norm());
  }
}

TEST_CASE("gps_split_update: singular innovation covariance is rejected") {
  SplitEstimate est;  // all covariances zero
  const GpsModel gps = gps_position_model(0.0);
  CHECK_THROWS_WITH_AS(gps_split_update(est, PosVec(0.0, 0.0), gps),
                       "degenerate measurement update", std::runtime_error);
}

TEST_CASE("gps_split_update: uninformative GPS is a no-op") {
  RngStream rng(103, 0);
  SplitEstimate est;
  est.state = random_vec<4>(rng);
  est.p_dep = random_spd<4>(rng);
  est.p_ind = random_spd<4>(rng);
  const GpsModel gps = gps_position_model(1e6);
  const SplitEstimate out = gps_split_update(est, PosVec(1000.0, 1000.0), gps);
  CHECK((out.state - est.state).norm() <= 1e-6);
  CHECK((out.total() - est.total()).norm() <= 1e-5);
}

TEST_CASE("gps_split_update: scalar analogue") {
  SplitEstimate est;
  est.state.setZero();
  est.p_ind = CovMat::Identity();
  const GpsModel gps = gps_position_model(1.0);
  const SplitEstimate out = gps_split_update(est, PosVec(0.0, 0.0), gps);
  CHECK(out.total()(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out.p_ind(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(out.p_dep(0, 0)) <= 1e-12);
}

TEST_CASE("gps_split_update: printed-form variant collapses the split") {
  RngStream rng(107, 0);
  SplitEstimate est;
  est.state = random_vec<4>(rng);
  est.p_dep = random_spd<4>(rng);
  est.p_ind = random_spd<4>(rng);
  const GpsModel gps = gps_position_model(2.0);

  const SplitEstimate main =
      gps_split_update(est, PosVec(0.0, 0.0), gps,
                       GpsSplitVariant::gain_on_total);
  const SplitEstimate printed =
      gps_split_update(est, PosVec(0.0, 0.0), gps,
                       GpsSplitVariant::independent_rhs);
  // With the printed right-hand side, total == independent after the fix.
  CHECK(printed.p_dep.norm() <= 1e-10 * printed.total().norm());
  // The default keeps the dependent part Joseph-propagated instead.
  CHECK(main.p_dep.norm() > 1e-3);
  const Eigen::Matrix4d ikh_ref = main.p_dep - printed.p_dep;
  CHECK(ikh_ref.norm() > 1e-3);
}

TEST_CASE("split closure survives mixed fuse/update sequences") {
  RngStream rng(109, 0);
  const GpsModel gps = gps_position_model(1.5);
  SplitEstimate est;
  est.state = random_vec<4>(rng);
  est.p_ind = random_spd<4>(rng);

  for (int step = 0; step < 3000; ++step) {
    if (rng.uniform01() < 0.5) {
      SplitT<4> other;
      other.state = est.state + random_vec<4>(rng, 2.0);
      if (rng.uniform01() < 0.5) {
        other.p_dep = random_spd<4>(rng);  // fully dependent partner
      } else {
        other.p_dep = random_spd<4>(rng);
        other.p_ind = random_spd<4>(rng);
      }
      est = fuse<4>(est, other);
    } else {
      const PosVec z = est.state.head<2>() + PosVec(rng.normal(), rng.normal());
      est = gps_split_update(est, z, gps);
    }
    CHECK(is_symmetric_psd<4>(est.p_ind));
    CHECK(is_symmetric_psd<4>(est.p_dep));
    CHECK(is_symmetric_psd<4>(est.total()));
    // Keep the recursion healthy: mimic a prediction with process noise.
    est.p_ind += 0.05 * CovMat::Identity();
  }
}

TEST_CASE("consistency: fused covariance dominates the empirical MSE") {
  // Correlated estimate pairs with a known shared component. The splits
  // are exact, so the fusion must stay conservative.
  RngStream rng(113, 0);
  const int trials = 2000;
  for (double rho : {0.0, 0.5, 0.9}) {
    const MatN<2> base = random_spd<2>(rng, 0.3);
    const MatN<2> shared = rho * base;
    const MatN<2> ind_a = (1.0 - rho) * random_spd<2>(rng, 0.3);
    const MatN<2> ind_b = (1.0 - rho) * random_spd<2>(rng, 0.3);
    const MatN<2> l_shared = cholesky_psd<2>(shared);
    const MatN<2> l_a = cholesky_psd<2>(ind_a);
    const MatN<2> l_b = cholesky_psd<2>(ind_b);

    MatN<2> mse = MatN<2>::Zero();
    MatN<2> fused_cov = MatN<2>::Zero();
    for (int t = 0; t < trials; ++t) {
      const VecN<2> c = l_shared * VecN<2>(rng.normal(), rng.normal());
      SplitT<2> a, b;
      a.state = c + l_a * VecN<2>(rng.normal(), rng.normal());
      a.p_dep = shared;
      a.p_ind = ind_a;
      b.state = c + l_b * VecN<2>(rng.normal(), rng.normal());
      b.p_dep = shared;
      b.p_ind = ind_b;
      const SplitT<2> fused = fuse<2>(a, b);
      mse += fused.state * fused.state.transpose();
      fused_cov = fused.total();
    }
    mse /= trials;
    const double standard_error =
        mse.diagonal().maxCoeff() * std::sqrt(2.0 / trials);
    Eigen::SelfAdjointEigenSolver<MatN<2>> eig(MatN<2>(fused_cov - mse));
    CHECK(eig.eigenvalues().minCoeff() >= -3.0 * standard_error);
  }
}
