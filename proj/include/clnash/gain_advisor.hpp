#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clnash/update_laws.hpp"

namespace clnash {

/// A compact set in Z-space, Z = [x | W~_c1..W~_cN | W~_a1..W~_aN]. Either a
/// box (per-coordinate bounds) or a centered ball.
///
/// None of the bound constants depend on the critic errors W~_c, so suprema
/// are sampled over the (x, W~_a) coordinates only. For a ball this is exact:
/// its projection onto a coordinate subspace is the ball of the same radius.
struct CompactSet {
  Vec lower;
  Vec upper;
  std::optional<double> ball_radius;
  int sample_count = 1000;

  static CompactSet Box(Vec lower, Vec upper, int sample_count = 1000);
  static CompactSet Ball(int dim, double radius, int sample_count = 1000);
  /// [-state_radius, state_radius]^n x [-weight_radius, weight_radius]^(2 sum p).
  static CompactSet FromRadii(int state_dim, int total_features, double state_radius,
                              double weight_radius, int sample_count = 1000);

  int dim() const { return static_cast<int>(lower.size()); }
  double Diameter() const;
  void Validate() const;
};

/// User-supplied bounds on the reconstruction errors eps_i and eps_i'. Zero
/// for bases that represent the value functions exactly.
struct EpsilonBounds {
  std::vector<double> eps_bar;
  std::vector<double> eps_bar_prime;
  static EpsilonBounds Zero(int num_players);
};

/// What the ledger needs beyond game, basis and gains.
struct AdvisorInputs {
  std::vector<Vec> reference_weights;         // ideal weights W_i
  std::vector<std::vector<Vec>> grid_points;  // extrapolation grid per player
  std::vector<double> gamma_lower;            // lower bound on lambda_min(Gamma_i); empty = lambda_min(gamma_init)
  double kappa_v = 1.0;                       // sum_i V_i*(x) <= kappa_v ||x||^2
  double zeta = 1.0;
  double z0_norm = 0.0;  // ||Z(t0)|| for the Z_bar bound
};

struct ConditionVerdict {
  bool ok = false;
  double margin = 0.0;  // left side minus right side
};

/// Per player: [q_i > 2 iota5_i,
///              eta_c2 c_x > 2 iota5_i + iota2 zeta N + eta_a1,
///              2 eta_a1 + eta_a2 > 4 iota8 + 2 iota2 N / zeta].
using PlayerConditions = std::array<ConditionVerdict, 3>;

struct GainBoundsReport {
  // Constants indexed as in the stability analysis; iota6 and iota7 do not exist there.
  double iota1 = 0, iota2 = 0, iota3 = 0, iota4 = 0;
  std::vector<double> iota5;
  double iota8 = 0;
  std::vector<double> iota9, iota10;
  double v_l = 0;
  double iota = 0;
  double radius = 0;  // sqrt(iota / v_l)
  double z_bar = 0;
  double zeta = 1;
  double lipschitz_f = 0;  // max ||f(x)|| / ||x|| over the samples

  std::vector<double> eps_bar, eps_bar_prime;
  std::vector<double> w_bar, sigma_bar, sigma_bar_prime, g_bar;
  std::vector<double> q_lower;      // lambda_min(Q_i)
  std::vector<double> c_lower;      // sampled lower bound of lambda_min(sum_k w w^T/rho)/M
  std::vector<double> gamma_lower;  // the Gamma_i lower bound used

  std::vector<PlayerConditions> conditions;
  std::array<bool, 3> conditions_ok{};  // each condition across all players
  bool diameter_ok = false;             // radius <= diam(Z) / 2
  double diameter = 0;

  bool all_conditions_ok() const {
    return conditions_ok[0] && conditions_ok[1] && conditions_ok[2];
  }
};

/// 1/2 min_i(q_i / 2, eta_c2i c_i / 4, (2 eta_a1i + eta_a2i) / 8).
double DecayConstant(std::span<const double> q_lower, std::span<const double> c_lower,
                     std::span<const PlayerGains> gains);

/// Samples every supremum in the bound constants over `set` and evaluates the
/// gain conditions. Requires nonempty samples; a zero c_lower yields a report
/// with the second condition false and an infinite iota.
GainBoundsReport EstimateConstants(const GameDefinition& game, const BasisSet& basis,
                                   std::span<const PlayerGains> gains, const CompactSet& set,
                                   const AdvisorInputs& inputs, const EpsilonBounds& eps);

std::vector<PlayerConditions> CheckGainConditions(const GainBoundsReport& report,
                                                  std::span<const PlayerGains> gains);

/// v_lower(r) = c_lo r^2 and v_upper(r) = c_hi r^2; returns v_lower^-1(v_upper(r)).
double ClassKEnvelope(double r, std::span<const PlayerGains> gains,
                      std::span<const double> gamma_lower, double kappa_v);

struct GainSelectionResult {
  CompactSet set;
  GainBoundsReport report;
  int iterations = 1;
  bool needs_richer_basis = false;
  std::vector<double> radii;  // sqrt(iota / v_l) per completed iteration
};

using EpsilonSchedule = std::function<EpsilonBounds(int iteration)>;

/// The three-step compact-set selection. Iteration 3 only flags that the basis
/// must be enriched; it returns the iteration-2 set.
GainSelectionResult SelectCompactSet(double z_init, const GameDefinition& game,
                                     const BasisSet& basis, std::span<const PlayerGains> gains,
                                     const AdvisorInputs& inputs, const EpsilonSchedule& eps,
                                     int sample_count = 1000);

std::string FormatReportText(const GainBoundsReport& report);
/// One `key=value` line per constant, 17 significant digits.
std::string FormatReportKeyValue(const GainBoundsReport& report);

}  // namespace clnash
