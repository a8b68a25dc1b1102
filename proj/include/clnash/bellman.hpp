#pragma once

#include <span>
#include <vector>

#include "clnash/basis.hpp"
#include "clnash/game_model.hpp"

namespace clnash {

/// Quantities at one state that every player's regressor and Bellman error
/// needs: f(x), each player's sigma_j'(x), G_j(x) and G_ij(x).
struct StateTerms {
  Vec x;
  Vec f;
  std::vector<Mat> jac;                  // jac[j] = sigma_j'(x)
  std::vector<Mat> G;                    // G[j] = G_j(x)
  std::vector<std::vector<Mat>> G_pair;  // G_pair[i][j] = G_ij(x)
};

StateTerms EvaluateStateTerms(const GameDefinition& game, const BasisSet& basis, const Vec& x);

/// omega_i, rho_i = 1 + nu omega^T Gamma omega, and omega_i / rho_i.
struct RegressorSample {
  Vec omega;
  double rho = 1.0;
  Vec normalized;
};

/// A regressor together with the Bellman error evaluated at the same point.
struct BellmanSample {
  RegressorSample regressor;
  double delta = 0.0;
};

/// u_i = -1/2 R_ii^-1 g_i(x)^T sigma_i'(x)^T W_ai.
Vec ApproximatePolicy(const GameDefinition& game, const BasisSet& basis, int i, const Vec& x,
                      const Vec& actor_weights_i);

/// omega_i = sigma_i' f - 1/2 sum_j sigma_i' G_j sigma_j'^T W_aj.
RegressorSample Regressor(const GameDefinition& game, const BasisSet& basis, int i, const Vec& x,
                          std::span<const Vec> actor_weights, const Mat& gamma_i, double nu_i);
RegressorSample RegressorAt(const StateTerms& terms, int i, std::span<const Vec> actor_weights,
                            const Mat& gamma_i, double nu_i);

/// Measurable Bellman error
///   omega_i^T W_ci + x^T Q_i x + 1/4 sum_j W_aj^T sigma_j' G_ij sigma_j'^T W_aj.
/// `sample` must have been computed at the same state and actor weights; this
/// is not detectable and is the caller's responsibility.
double BellmanError(const GameDefinition& game, const BasisSet& basis, int i, const Vec& x,
                    const Vec& critic_weights_i, std::span<const Vec> actor_weights,
                    const RegressorSample& sample);
double BellmanErrorAt(const GameDefinition& game, const StateTerms& terms, int i,
                      const Vec& critic_weights_i, std::span<const Vec> actor_weights,
                      const RegressorSample& sample);

/// Preselected off-trajectory points, per player, with f, sigma' and the
/// coupling matrices cached. Only the actor weights change between steps, so
/// regressors are still recomputed every evaluation.
class ExtrapolationGrid {
 public:
  ExtrapolationGrid(const GameDefinition& game, const BasisSet& basis,
                    std::vector<std::vector<Vec>> points_per_player);

  int num_players() const { return static_cast<int>(terms_.size()); }
  int size(int i) const { return static_cast<int>(terms_.at(i).size()); }
  std::span<const StateTerms> points(int i) const { return terms_.at(i); }

  /// Axis-aligned lattice over [lower, upper] with counts[a] points on axis a
  /// (a single point sits at the box midpoint).
  static std::vector<Vec> Lattice(const Vec& lower, const Vec& upper,
                                  const std::vector<int>& counts, bool exclude_origin = true);
  /// First `count` Halton points mapped into [lower, upper].
  static std::vector<Vec> Scatter(const Vec& lower, const Vec& upper, int count,
                                  bool exclude_origin = true);

 private:
  std::vector<std::vector<StateTerms>> terms_;
};

/// Regressors and Bellman errors at every grid point of player i using the
/// current weights.
std::vector<BellmanSample> ExtrapolatedBellmanErrors(const GameDefinition& game,
                                                     const ExtrapolationGrid& grid, int i,
                                                     const Vec& critic_weights_i,
                                                     std::span<const Vec> actor_weights,
                                                     const Mat& gamma_i, double nu_i);

/// The Bellman error written in terms of the estimation errors W~ = W - W^,
/// valid when the basis represents the value functions exactly:
///   -omega_i^T W~_ci + 1/4 sum_j W~_aj^T sigma_j' G_ij sigma_j'^T W~_aj
///   + 1/2 sum_j (W_i^T sigma_i' G_j - W_j^T sigma_j' G_ij) sigma_j'^T W~_aj,
/// with omega_i evaluated at W^_aj = W_j - W~_aj.
double AnalyticBellmanError(const GameDefinition& game, const BasisSet& basis, int i,
                            const Vec& x, std::span<const Vec> true_weights,
                            const Vec& critic_error_i, std::span<const Vec> actor_errors);

}  // namespace clnash
