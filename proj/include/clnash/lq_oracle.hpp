#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "clnash/basis.hpp"
#include "clnash/game_model.hpp"

namespace clnash {

/// Coupled algebraic Riccati solution P_1..P_N of
///   0 = Q_i + A_cl^T P_i + P_i A_cl + sum_j P_j B_j R_jj^-1 R_ij R_jj^-1 B_j^T P_j,
///   A_cl = A - sum_j B_j R_jj^-1 B_j^T P_j,
/// so that V_i*(x) = x^T P_i x and u_i* = -R_ii^-1 B_i^T P_i x.
struct RiccatiSolution {
  std::vector<Mat> P;
  Mat closed_loop;
  Eigen::VectorXcd closed_loop_eigenvalues;
  std::vector<double> residuals;  // Frobenius norm of each player's equation
  bool converged = false;
  bool hurwitz = false;
  int iterations = 0;
};

class NoConvergenceError : public std::runtime_error {
 public:
  NoConvergenceError(const std::string& what, int iterations, double last_change)
      : std::runtime_error(what), iterations_(iterations), last_change_(last_change) {}
  int iterations() const { return iterations_; }
  double last_change() const { return last_change_; }

 private:
  int iterations_;
  double last_change_;
};

/// Residual matrix of player i's coupled equation at the given P's.
Mat CoupledRiccatiResidual(const LinearQuadraticGame& game, std::span<const Mat> P, int i);

/// Solves A^T X + X A = -C for symmetric X via the n(n+1)/2 symmetric
/// vectorization and a dense pivoted LU.
Mat SolveSymmetricLyapunov(const Mat& A, const Mat& C);

/// Single-player continuous ARE A^T P + P A - P B R^-1 B^T P + Q = 0 by the
/// matrix sign function of the Hamiltonian.
Mat SolveContinuousRiccati(const Mat& A, const Mat& B, const Mat& Q, const Mat& R);

/// Lyapunov fixed-point iteration: hold A_cl and the cross sum from the current
/// P's, solve each player's linear equation, repeat until max_i ||dP_i|| <= tol.
/// Warm-started from each player's own Riccati solution with the others idle.
/// Throws NoConvergenceError after max_iter sweeps or on divergence; a
/// non-Hurwitz closed loop is reported through `hurwitz`, not thrown.
RiccatiSolution SolveCoupledRiccati(const LinearQuadraticGame& game, double tol = 1e-10,
                                    int max_iter = 500);

/// Quadratic-basis weights with W_i^T sigma(x) = x^T P_i x.
std::vector<Vec> OracleWeights(const RiccatiSolution& solution, const BasisSet& basis);

/// Max over samples and players of the open-loop HJ residual
///   x^T Q_i x + sum_j u_j^T R_ij u_j + dV_i (f + sum_j g_j u_j),
/// with V_i = W_i^T sigma_i and u_j = -1/2 R_jj^-1 g_j^T sigma_j'^T W_j.
double VerifyHjResidual(const GameDefinition& game, const BasisSet& basis,
                        std::span<const Vec> weights, std::span<const Vec> sample_states);

}  // namespace clnash
