#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "clnash/types.hpp"

namespace clnash {

using DriftFn = std::function<Vec(const Vec&)>;
using InputMapFn = std::function<Mat(const Vec&)>;

/// Linear dynamics x' = A x + sum_i B_i u_i with quadratic costs.
struct LinearQuadraticGame {
  Mat A;
  std::vector<Mat> B;
  std::vector<Mat> Q;
  std::vector<std::vector<Mat>> R;  // R[i][j] is m_j x m_j
};

/// G_j(x) = g_j R_jj^-1 g_j^T and G_ij(x) = g_j R_jj^-1 R_ij R_jj^-1 g_j^T.
struct CouplingPair {
  Mat G_j;
  Mat G_ij;
};

/// An N-player control-affine nonzero-sum game
///
///   x' = f(x) + sum_i g_i(x) u_i,   r_i = x^T Q_i x + sum_j u_j^T R_ij u_j.
///
/// The drift and input maps are opaque callables. Global Lipschitz continuity
/// and uniform boundedness of g_i are assumed, not verified; only f(0) = 0 is
/// checked at construction. Q_i and R_ij are symmetrized on construction.
/// Immutable once built.
class GameDefinition {
 public:
  GameDefinition(int state_dim, std::vector<int> control_dims, DriftFn drift,
                 std::vector<InputMapFn> input_maps, std::vector<Mat> state_weights,
                 std::vector<std::vector<Mat>> control_weights);

  static GameDefinition FromLinear(const LinearQuadraticGame& lq);

  int state_dim() const { return n_; }
  int num_players() const { return static_cast<int>(m_.size()); }
  int control_dim(int i) const { return m_.at(i); }

  const Mat& Q(int i) const { return Q_.at(i); }
  const Mat& R(int i, int j) const { return R_.at(i).at(j); }
  const Mat& RInverse(int j) const { return R_inv_.at(j); }
  double QMinEigenvalue(int i) const { return q_min_.at(i); }

  /// True if any supplied Q_i or R_ij was asymmetric by more than 1e-10.
  bool asymmetry_corrected() const { return asymmetry_corrected_; }

  /// Present only when the game was built from a LinearQuadraticGame.
  const std::optional<LinearQuadraticGame>& linear() const { return linear_; }

  Vec Drift(const Vec& x) const;
  Mat InputMap(int i, const Vec& x) const;

  /// f(x) + sum_i g_i(x) u_i.
  Vec EvaluateDynamics(const Vec& x, std::span<const Vec> controls) const;

  /// x^T Q_i x + sum_j u_j^T R_ij u_j.
  double InstantaneousCost(const Vec& x, std::span<const Vec> controls, int player) const;

  CouplingPair Coupling(const Vec& x, int i, int j) const;
  /// G_j(x) alone.
  Mat InputCoupling(const Vec& x, int j) const;

 private:
  void CheckState(const Vec& x) const;
  void CheckPlayer(int i) const;

  int n_;
  std::vector<int> m_;
  DriftFn drift_;
  std::vector<InputMapFn> input_maps_;
  std::vector<Mat> Q_;
  std::vector<std::vector<Mat>> R_;
  std::vector<Mat> R_inv_;
  std::vector<double> q_min_;
  bool asymmetry_corrected_ = false;
  std::optional<LinearQuadraticGame> linear_;
};

}  // namespace clnash
