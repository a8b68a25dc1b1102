#pragma once

#include <span>
#include <vector>

#include "clnash/bellman.hpp"

namespace clnash {

/// Least-squares critic gains for one player.
struct CriticConfig {
  double eta_c1 = 1.0;
  double eta_c2 = 1.0;
  double beta = 0.1;  // forgetting factor
  double nu = 1.0;    // regressor normalization
  double gamma_bar = 10.0;
  Mat gamma_init;

  /// Throws ConfigError unless every gain is positive, gamma_init is symmetric
  /// positive definite of size `feature_count`, and ||gamma_init|| <= gamma_bar.
  void Validate(int feature_count) const;
};

struct ActorConfig {
  double eta_a1 = 1.0;
  double eta_a2 = 0.1;
  void Validate() const;
};

struct PlayerGains {
  CriticConfig critic;
  ActorConfig actor;
};

/// Critic weights, actor weights and least-squares gain matrix for every player.
struct LearnerState {
  std::vector<Vec> critic;
  std::vector<Vec> actor;
  std::vector<Mat> gamma;
};

/// -eta_c1 Gamma (omega/rho) delta - (eta_c2 Gamma / M) sum_k (omega_k/rho_k) delta_k.
Vec CriticDerivative(const BellmanSample& current, std::span<const BellmanSample> extrapolated,
                     const Mat& gamma, const CriticConfig& cfg);

/// beta Gamma - eta_c1 Gamma (omega omega^T / rho^2) Gamma while the saturation
/// indicator is on, otherwise zero. The indicator is ||Gamma|| <= gamma_bar.
Mat GammaDerivative(const RegressorSample& sample, const Mat& gamma, const CriticConfig& cfg);
/// Same flow with the indicator supplied by the caller (held over an integration step).
Mat GammaDerivative(const RegressorSample& sample, const Mat& gamma, const CriticConfig& cfg,
                    bool indicator_on);

/// Everything the actor law needs about the current instant, for all players.
struct ActorInputs {
  const StateTerms& at_state;                             // terms at the plant state
  std::span<const BellmanSample> current;                 // current[j]
  std::span<const std::vector<BellmanSample>> extrapolated;  // extrapolated[j][k]
  const ExtrapolationGrid& grid;
};

/// -eta_a1 (W_ai - W_ci) - eta_a2 W_ai plus the cancellation cross terms
///   1/4 sum_j eta_c1j (sigma_i' G_ji sigma_i'^T W_ai) (W_cj^T omega_j / rho_j)
///   + 1/4 sum_j sum_k (eta_c2j / M_j) (sigma_i' G_ji sigma_i'^T W_ai)|_{x_jk}
///                                      (W_cj^T omega_j^k / rho_j^k).
Vec ActorDerivative(int i, const ActorInputs& in, const LearnerState& state,
                    std::span<const PlayerGains> gains);

struct RankReport {
  double min_eigenvalue = 0.0;  // lambda_min(sum_k omega_k omega_k^T / rho_k)
  double c_lower = 0.0;         // min_eigenvalue / M
  bool satisfied = false;       // min_eigenvalue > tolerance
};

inline constexpr double kDefaultRankTolerance = 1e-8;

RankReport RankMonitor(const ExtrapolationGrid& grid, int i, std::span<const Vec> actor_weights,
                       const Mat& gamma_i, double nu_i,
                       double rank_tolerance = kDefaultRankTolerance);

}  // namespace clnash
