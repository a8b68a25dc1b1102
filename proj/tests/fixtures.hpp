// Shared games and independent reference computations for the tests.
// Nothing here calls into the bellman, update_laws or lq_oracle code paths.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "clnash/game_model.hpp"

namespace fixtures {

using clnash::Mat;
using clnash::Vec;

inline Mat M1(double v) { return Mat::Constant(1, 1, v); }

/// x' = a x + b u, r = q x^2 + r u^2.
inline clnash::LinearQuadraticGame ScalarGame(double a, double b, double q, double r) {
  return {M1(a), {M1(b)}, {M1(q)}, {{M1(r)}}};
}

/// Two identical scalar players: a = -1, b = 1, Q = 1, R_ii = 1, R_ij = r12.
inline clnash::LinearQuadraticGame TwoPlayerScalarGame(double r12 = 1.0) {
  return {M1(-1), {M1(1), M1(1)}, {M1(1), M1(1)}, {{M1(1), M1(r12)}, {M1(r12), M1(1)}}};
}

/// The n = 2 two-player benchmark, same numbers as configs/two_player_benchmark.json.
inline clnash::LinearQuadraticGame TwoPlayerBenchmark() {
  clnash::LinearQuadraticGame g;
  g.A = (Mat(2, 2) << -1, 0.5, 0.2, -1.5).finished();
  g.B = {(Mat(2, 1) << 1, 0).finished(), (Mat(2, 1) << 0.3, 1).finished()};
  g.Q = {Mat::Identity(2, 2), (Mat(2, 2) << 2, 0.2, 0.2, 1).finished()};
  g.R = {{M1(1), M1(0.5)}, {M1(0.5), M1(1)}};
  return g;
}

/// p = r (a + sqrt(a^2 + q b^2 / r)) / b^2.
inline double ScalarAreClosedForm(double a, double b, double q, double r) {
  return r * (a + std::sqrt(a * a + q * b * b / r)) / (b * b);
}

/// Residual of the symmetric two-player scalar game at p1 = p2 = p:
/// q + 2 (a - 2 b^2 p / r) p + p^2 b^2 (1 + r12) / r.
inline double SymmetricScalarResidual(double p, double r12 = 1.0) {
  const double acl = -1.0 - 2.0 * p;
  return 1.0 + 2.0 * acl * p + p * p * (1.0 + r12);
}

/// Root of SymmetricScalarResidual in [0, 1] by dense scan then bisection.
inline double SymmetricScalarRootByScan(double r12 = 1.0) {
  double lo = 0.0, hi = 1.0;
  const int steps = 100000;
  for (int k = 0; k < steps; ++k) {
    const double a = k / double(steps), b = (k + 1) / double(steps);
    if (SymmetricScalarResidual(a, r12) * SymmetricScalarResidual(b, r12) <= 0) {
      lo = a;
      hi = b;
      break;
    }
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (SymmetricScalarResidual(lo, r12) * SymmetricScalarResidual(mid, r12) <= 0) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

/// Quadratic-basis weights of a symmetric matrix, rebuilt here by hand.
inline Vec WeightsOf(const Mat& P) {
  const int n = static_cast<int>(P.rows());
  Vec w(n * (n + 1) / 2);
  int k = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) w(k++) = (a == b ? 1.0 : 2.0) * P(a, b);
  return w;
}

inline Mat MatrixOf(const Vec& w, int n) {
  Mat P(n, n);
  int k = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      const double v = (a == b ? 1.0 : 0.5) * w(k++);
      P(a, b) = P(b, a) = v;
    }
  return P;
}

inline Mat Gj(const clnash::LinearQuadraticGame& g, int j) {
  return g.B[j] * g.R[j][j].inverse() * g.B[j].transpose();
}
inline Mat Gij(const clnash::LinearQuadraticGame& g, int i, int j) {
  const Mat BR = g.B[j] * g.R[j][j].inverse();
  return BR * g.R[i][j] * BR.transpose();
}

/// Measurable Bellman error written with matrices: with V_c = x^T Pc x and
/// actor matrices Pa_j,
///   2 x^T Pc_i (A x - sum_j G_j Pa_j x) + x^T Q_i x + sum_j x^T Pa_j G_ij Pa_j x.
inline double MatrixBellmanError(const clnash::LinearQuadraticGame& g, int i, const Vec& x,
                                 const Mat& Pc_i, const std::vector<Mat>& Pa) {
  Vec xdot = g.A * x;
  for (std::size_t j = 0; j < Pa.size(); ++j) xdot -= Gj(g, int(j)) * Pa[j] * x;
  double d = 2.0 * x.dot(Pc_i * xdot) + x.dot(g.Q[i] * x);
  for (std::size_t j = 0; j < Pa.size(); ++j) d += x.dot(Pa[j] * Gij(g, i, int(j)) * Pa[j] * x);
  return d;
}

/// Coupled Riccati residual evaluated from scratch.
inline Mat CoupledResidual(const clnash::LinearQuadraticGame& g, const std::vector<Mat>& P, int i) {
  Mat Acl = g.A;
  for (std::size_t j = 0; j < P.size(); ++j) Acl -= Gj(g, int(j)) * P[j];
  Mat r = g.Q[i] + Acl.transpose() * P[i] + P[i] * Acl;
  for (std::size_t j = 0; j < P.size(); ++j) r += P[j] * Gij(g, i, int(j)) * P[j];
  return r;
}

/// A^T X + X A = -C through the n^2 Kronecker system.
inline Mat KroneckerLyapunov(const Mat& A, const Mat& C) {
  const int n = static_cast<int>(A.rows());
  const Mat I = Mat::Identity(n, n);
  const Mat K = Eigen::kroneckerProduct(I, A.transpose()) + Eigen::kroneckerProduct(A.transpose(), I);
  const Vec c = Eigen::Map<const Vec>(C.data(), n * n);
  const Vec x = K.fullPivLu().solve(-c);
  return Eigen::Map<const Mat>(x.data(), n, n);
}

inline Vec RandomVec(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Vec v(n);
  for (int k = 0; k < n; ++k) v(k) = d(rng);
  return v;
}

}  // namespace fixtures
