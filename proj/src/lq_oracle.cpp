#include "clnash/lq_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clnash {

namespace {

Mat Inverse(const Mat& R) { return R.llt().solve(Mat::Identity(R.rows(), R.cols())); }

// B_j R_jj^-1 B_j^T.
Mat InputGramian(const LinearQuadraticGame& g, int j) {
  return g.B[j] * Inverse(g.R[j][j]) * g.B[j].transpose();
}

// B_j R_jj^-1 R_ij R_jj^-1 B_j^T.
Mat CrossGramian(const LinearQuadraticGame& g, int i, int j) {
  const Mat BRinv = g.B[j] * Inverse(g.R[j][j]);
  return BRinv * g.R[i][j] * BRinv.transpose();
}

Mat ClosedLoop(const LinearQuadraticGame& g, std::span<const Mat> P) {
  Mat Acl = g.A;
  for (std::size_t j = 0; j < P.size(); ++j) Acl -= InputGramian(g, int(j)) * P[j];
  return Acl;
}

}  // namespace

Mat CoupledRiccatiResidual(const LinearQuadraticGame& game, std::span<const Mat> P, int i) {
  const Mat Acl = ClosedLoop(game, P);
  Mat r = game.Q[i] + Acl.transpose() * P[i] + P[i] * Acl;
  for (std::size_t j = 0; j < P.size(); ++j) r += P[j] * CrossGramian(game, i, int(j)) * P[j];
  return r;
}

Mat SolveSymmetricLyapunov(const Mat& A, const Mat& C) {
  const int n = static_cast<int>(A.rows());
  const int m = n * (n + 1) / 2;
  // Column k of the operator is vech(A^T E + E A) for the k-th symmetric unit E.
  Mat op(m, m);
  int k = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      Mat E = Mat::Zero(n, n);
      E(a, b) = E(b, a) = 1.0;
      const Mat image = A.transpose() * E + E * A;
      int r = 0;
      for (int c = 0; c < n; ++c)
        for (int d = c; d < n; ++d) op(r++, k) = image(c, d);
      ++k;
    }
  }
  Vec rhs(m);
  int r = 0;
  for (int c = 0; c < n; ++c)
    for (int d = c; d < n; ++d) rhs(r++) = -0.5 * (C(c, d) + C(d, c));
  const Vec sol = op.fullPivLu().solve(rhs);
  Mat X(n, n);
  k = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      X(a, b) = X(b, a) = sol(k);
      ++k;
    }
  return X;
}

Mat SolveContinuousRiccati(const Mat& A, const Mat& B, const Mat& Q, const Mat& R) {
  const Eigen::Index n = A.rows();
  Mat H(2 * n, 2 * n);
  H << A, B * Inverse(R) * B.transpose(), Q, -A.transpose();

  Mat Z = H;
  const double p = static_cast<double>(Z.rows());
  for (int it = 0; it < 100; ++it) {
    const Mat Z_old = Z;
    const double ck = std::pow(std::abs(Z.determinant()), -1.0 / p);
    Z *= ck;
    Z = Z - 0.5 * (Z - Z.inverse());
    if ((Z - Z_old).norm() <= 1e-12 * std::max(1.0, Z.norm())) break;
  }
  const Mat W11 = Z.block(0, 0, n, n), W12 = Z.block(0, n, n, n);
  const Mat W21 = Z.block(n, 0, n, n), W22 = Z.block(n, n, n, n);
  Mat lhs(2 * n, n), rhs(2 * n, n);
  const Mat eye = Mat::Identity(n, n);
  lhs << W12, W22 + eye;
  rhs << W11 + eye, W21;
  const Mat P = lhs.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
  return 0.5 * (P + P.transpose());
}

RiccatiSolution SolveCoupledRiccati(const LinearQuadraticGame& game, double tol, int max_iter) {
  const int N = static_cast<int>(game.B.size());
  RiccatiSolution sol;
  for (int i = 0; i < N; ++i)
    sol.P.push_back(SolveContinuousRiccati(game.A, game.B[i], game.Q[i], game.R[i][i]));

  double change = std::numeric_limits<double>::infinity();
  int it = 0;
  while (it < max_iter && change > tol) {
    ++it;
    const Mat Acl = ClosedLoop(game, sol.P);
    std::vector<Mat> next(N);
    for (int i = 0; i < N; ++i) {
      Mat C = game.Q[i];
      for (int j = 0; j < N; ++j) C += sol.P[j] * CrossGramian(game, i, j) * sol.P[j];
      next[i] = SolveSymmetricLyapunov(Acl, C);
    }
    change = 0.0;
    for (int i = 0; i < N; ++i) {
      if (!next[i].allFinite())
        throw NoConvergenceError("coupled Riccati iteration diverged", it, change);
      change = std::max(change, (next[i] - sol.P[i]).norm());
    }
    if (change > 1e12) throw NoConvergenceError("coupled Riccati iteration diverged", it, change);
    sol.P = std::move(next);
  }
  sol.iterations = it;
  if (change > tol)
    throw NoConvergenceError("coupled Riccati iteration did not converge in " +
                                 std::to_string(max_iter) + " sweeps",
                             it, change);
  sol.converged = true;
  sol.closed_loop = ClosedLoop(game, sol.P);
  sol.closed_loop_eigenvalues = sol.closed_loop.eigenvalues();
  sol.hurwitz = (sol.closed_loop_eigenvalues.real().array() < 0.0).all();
  for (int i = 0; i < N; ++i) sol.residuals.push_back(CoupledRiccatiResidual(game, sol.P, i).norm());
  return sol;
}

std::vector<Vec> OracleWeights(const RiccatiSolution& solution, const BasisSet& basis) {
  if (!basis.all_quadratic()) throw ConfigError("oracle weights require the quadratic basis");
  if (basis.num_players() != static_cast<int>(solution.P.size()))
    throw DimensionError("basis and solution disagree on player count");
  std::vector<Vec> W;
  for (const Mat& P : solution.P) {
    if (P.rows() != basis.map(0).state_dim)
      throw DimensionError("basis state dimension does not match the solution");
    W.push_back(QuadraticWeightsFromMatrix(P));
  }
  return W;
}

double VerifyHjResidual(const GameDefinition& game, const BasisSet& basis,
                        std::span<const Vec> weights, std::span<const Vec> sample_states) {
  const int N = game.num_players();
  if (static_cast<int>(weights.size()) != N) throw DimensionError("expected weights per player");
  double worst = 0.0;
  for (const Vec& x : sample_states) {
    std::vector<Vec> u(N);
    std::vector<Mat> g(N);
    for (int j = 0; j < N; ++j) {
      g[j] = game.InputMap(j, x);
      const Vec grad = basis.Jacobian(j, x).transpose() * weights[j];
      u[j] = -0.5 * game.RInverse(j) * (g[j].transpose() * grad);
    }
    Vec xdot = game.Drift(x);
    for (int j = 0; j < N; ++j) xdot += g[j] * u[j];
    for (int i = 0; i < N; ++i) {
      const Vec grad = basis.Jacobian(i, x).transpose() * weights[i];
      double r = x.dot(game.Q(i) * x) + grad.dot(xdot);
      for (int j = 0; j < N; ++j) r += u[j].dot(game.R(i, j) * u[j]);
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

}  // namespace clnash
