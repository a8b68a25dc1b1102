#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clnash/update_laws.hpp"

namespace clnash {

/// The closed loop: plant, critic, actor and gain-matrix flows for all players.
struct CoupledSystem {
  const GameDefinition& game;
  const BasisSet& basis;
  const ExtrapolationGrid& grid;
  std::span<const PlayerGains> gains;
};

/// Packed layout [x | W_c1..W_cN | W_a1..W_aN | vec(Gamma_1)..vec(Gamma_N)],
/// Gamma stored column-major.
Vec PackState(const Vec& x, const LearnerState& learner);
void UnpackState(const Vec& packed, const BasisSet& basis, Vec& x, LearnerState& learner);

/// Time derivative of the packed state. `gamma_indicator[i]` switches player
/// i's Gamma flow on or off; pass an empty span to evaluate the indicator at
/// the given state.
Vec CoupledDerivative(const CoupledSystem& sys, const Vec& packed,
                      std::span<const bool> gamma_indicator = {});

struct SimulationConfig {
  double t_final = 20.0;
  double dt = 1e-3;
  int record_every = 1;
  Vec x0;
  LearnerState initial;
  std::vector<PlayerGains> gains;
  std::vector<std::vector<Vec>> grid_points;  // per player
  double rank_tolerance = kDefaultRankTolerance;
  /// Ideal weights W_i, when known, enable the Z-norm diagnostics.
  std::optional<std::vector<Vec>> reference_weights;

  void Validate(const GameDefinition& game, const BasisSet& basis) const;
};

/// Ŵ_ci = Ŵ_ai with components drawn uniformly from [low, high] by a
/// generator seeded with `seed`; Gamma_i = gamma_init.
LearnerState SeededInitialState(const BasisSet& basis, std::span<const PlayerGains> gains,
                                std::uint64_t seed, double low = 0.1, double high = 1.0);

struct PlayerTrace {
  std::vector<Vec> critic;
  std::vector<Vec> actor;
  std::vector<Vec> control;
  std::vector<double> delta;
  std::vector<double> gamma_min_eig;
  std::vector<double> gamma_norm;
  std::vector<double> rank_min_eig;     // lambda_min of the grid information matrix
  std::vector<double> normalized_norm;  // ||omega / rho|| on the trajectory
};

enum class AbortKind { kNone, kNonFinite, kGammaCollapse };

struct RunRecord {
  std::vector<double> t;
  std::vector<Vec> x;
  std::vector<PlayerTrace> players;
  std::vector<double> z_norm;  // empty unless reference weights were supplied

  // Run-level diagnostics, per player.
  std::vector<double> observed_c_lower;  // min over recorded samples of lambda_min / M
  std::vector<double> gamma_lower;       // min lambda_min(Gamma) over recorded samples
  std::vector<double> gamma_upper;       // max ||Gamma|| over recorded samples
  std::vector<bool> rank_satisfied_throughout;
  std::vector<int> corridor_violations;         // lambda_min <= 0 or ||Gamma|| > bar + 1e-6
  std::vector<int> regressor_bound_violations;  // ||omega/rho|| > 1/(2 sqrt(nu lambda_min))

  std::optional<double> max_z_norm;
  std::optional<double> ultimate_z_norm;  // max over the last 10% of the horizon

  AbortKind abort = AbortKind::kNone;
  double abort_time = 0.0;
  std::string abort_component;

  LearnerState final_state;
  Vec final_x;

  std::size_t size() const { return t.size(); }
  bool aborted() const { return abort != AbortKind::kNone; }
};

/// Fixed-step RK4 integration of the coupled flows. The Gamma saturation
/// indicator is frozen over each step; afterwards Gamma is symmetrized and
/// rescaled onto ||Gamma|| = gamma_bar if it overshoots by more than 1e-9
/// relative. A non-finite state or lambda_min(Gamma) < 1e-12 ends the run
/// early: the record then holds every sample up to the last good step and
/// `abort` names the cause.
RunRecord Simulate(const GameDefinition& game, const BasisSet& basis,
                   const SimulationConfig& config);

struct PolicyGap {
  std::vector<std::vector<double>> actor_error;  // ||W_i - W^_ai(t)|| per player
  std::vector<std::vector<double>> bound;        // factor_i * actor_error (empty without factors)
};

/// Actor-weight error series and the policy-error bound
/// ||u_i* - u^_i|| <= 1/2 ||R_ii|| g_bar_i sigma_bar'_i ||W~_ai|| (exact basis).
/// `bound_factors[i]` is 1/2 ||R_ii|| g_bar_i sigma_bar'_i; may be empty.
PolicyGap ComputePolicyGap(const RunRecord& record, std::span<const Vec> oracle_weights,
                           std::span<const double> bound_factors = {});

}  // namespace clnash
