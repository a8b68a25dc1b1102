#include "clnash/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

namespace clnash {

namespace {

constexpr double kGammaCollapse = 1e-12;
constexpr double kProjectionSlack = 1e-9;
constexpr double kCorridorSlack = 1e-6;

// Everything computed from one packed state: current samples, grid samples
// and the resulting flows.
struct FlowEvaluation {
  StateTerms at_state;
  std::vector<Vec> control;
  std::vector<BellmanSample> current;
  std::vector<std::vector<BellmanSample>> extrapolated;
  Vec x_dot;
  std::vector<Vec> critic_dot;
  std::vector<Vec> actor_dot;
  std::vector<Mat> gamma_dot;
};

FlowEvaluation EvaluateFlows(const CoupledSystem& sys, const Vec& x, const LearnerState& s,
                             std::span<const bool> indicator) {
  const int N = sys.game.num_players();
  FlowEvaluation e;
  e.at_state = EvaluateStateTerms(sys.game, sys.basis, x);
  for (int j = 0; j < N; ++j)
    e.control.push_back(ApproximatePolicy(sys.game, sys.basis, j, x, s.actor[j]));
  e.x_dot = sys.game.EvaluateDynamics(x, e.control);

  for (int i = 0; i < N; ++i) {
    const CriticConfig& c = sys.gains[i].critic;
    BellmanSample b;
    b.regressor = RegressorAt(e.at_state, i, s.actor, s.gamma[i], c.nu);
    b.delta = BellmanErrorAt(sys.game, e.at_state, i, s.critic[i], s.actor, b.regressor);
    e.current.push_back(std::move(b));
    e.extrapolated.push_back(
        ExtrapolatedBellmanErrors(sys.game, sys.grid, i, s.critic[i], s.actor, s.gamma[i], c.nu));
  }

  const ActorInputs inputs{e.at_state, e.current, e.extrapolated, sys.grid};
  for (int i = 0; i < N; ++i) {
    const CriticConfig& c = sys.gains[i].critic;
    e.critic_dot.push_back(CriticDerivative(e.current[i], e.extrapolated[i], s.gamma[i], c));
    const bool on = indicator.empty() ? SpectralNorm(s.gamma[i]) <= c.gamma_bar : indicator[i];
    e.gamma_dot.push_back(GammaDerivative(e.current[i].regressor, s.gamma[i], c, on));
    e.actor_dot.push_back(ActorDerivative(i, inputs, s, sys.gains));
  }
  return e;
}

Vec PackDerivative(const FlowEvaluation& e) {
  LearnerState d{e.critic_dot, e.actor_dot, e.gamma_dot};
  return PackState(e.x_dot, d);
}

bool AllFinite(const Vec& x, const LearnerState& s, std::string& component) {
  if (!x.allFinite()) {
    component = "x";
    return false;
  }
  for (std::size_t i = 0; i < s.critic.size(); ++i) {
    const std::string tag = "[" + std::to_string(i) + "]";
    if (!s.critic[i].allFinite()) component = "W_c" + tag;
    else if (!s.actor[i].allFinite()) component = "W_a" + tag;
    else if (!s.gamma[i].allFinite()) component = "Gamma" + tag;
    else continue;
    return false;
  }
  return true;
}

}  // namespace

Vec PackState(const Vec& x, const LearnerState& learner) {
  Eigen::Index size = x.size();
  for (std::size_t i = 0; i < learner.critic.size(); ++i)
    size += learner.critic[i].size() + learner.actor[i].size() + learner.gamma[i].size();
  Vec packed(size);
  Eigen::Index at = 0;
  auto put = [&](const auto& block) {
    packed.segment(at, block.size()) = block.reshaped();
    at += block.size();
  };
  put(x);
  for (const Vec& w : learner.critic) put(w);
  for (const Vec& w : learner.actor) put(w);
  for (const Mat& g : learner.gamma) put(g);
  return packed;
}

void UnpackState(const Vec& packed, const BasisSet& basis, Vec& x, LearnerState& learner) {
  const int N = basis.num_players();
  const int n = basis.map(0).state_dim;
  Eigen::Index expected = n;
  for (int i = 0; i < N; ++i) {
    const int p = basis.feature_count(i);
    expected += 2 * p + p * p;
  }
  if (packed.size() != expected) throw DimensionError("packed state has wrong length");
  Eigen::Index at = 0;
  x = packed.segment(at, n);
  at += n;
  learner.critic.resize(N);
  learner.actor.resize(N);
  learner.gamma.resize(N);
  for (int i = 0; i < N; ++i) {
    const int p = basis.feature_count(i);
    learner.critic[i] = packed.segment(at, p);
    at += p;
  }
  for (int i = 0; i < N; ++i) {
    const int p = basis.feature_count(i);
    learner.actor[i] = packed.segment(at, p);
    at += p;
  }
  for (int i = 0; i < N; ++i) {
    const int p = basis.feature_count(i);
    learner.gamma[i] = packed.segment(at, p * p).reshaped(p, p);
    at += p * p;
  }
}

Vec CoupledDerivative(const CoupledSystem& sys, const Vec& packed,
                      std::span<const bool> gamma_indicator) {
  Vec x;
  LearnerState s;
  UnpackState(packed, sys.basis, x, s);
  return PackDerivative(EvaluateFlows(sys, x, s, gamma_indicator));
}

void SimulationConfig::Validate(const GameDefinition& game, const BasisSet& basis) const {
  if (!(dt > 0)) throw ConfigError("simulation.dt must be positive");
  if (!(t_final >= 0)) throw ConfigError("simulation.t_final must be nonnegative");
  if (record_every < 1) throw ConfigError("simulation.record_every must be at least 1");
  if (x0.size() != game.state_dim()) throw ConfigError("simulation.x0 must have length n");
  const int N = game.num_players();
  if (basis.num_players() != N) throw ConfigError("basis must have one entry per player");
  if (static_cast<int>(gains.size()) != N) throw ConfigError("gains must have one entry per player");
  if (static_cast<int>(grid_points.size()) != N)
    throw ConfigError("grid must have one point list per player");
  if (static_cast<int>(initial.critic.size()) != N || static_cast<int>(initial.actor.size()) != N ||
      static_cast<int>(initial.gamma.size()) != N)
    throw ConfigError("initial learner state must cover every player");
  for (int i = 0; i < N; ++i) {
    const int p = basis.feature_count(i);
    if (basis.map(i).state_dim != game.state_dim())
      throw ConfigError("basis state dimension does not match the game");
    gains[i].critic.Validate(p);
    gains[i].actor.Validate();
    if (grid_points[i].empty())
      throw ConfigError("player " + std::to_string(i) + ": extrapolation grid is empty");
    if (initial.critic[i].size() != p || initial.actor[i].size() != p ||
        initial.gamma[i].rows() != p || initial.gamma[i].cols() != p)
      throw ConfigError("player " + std::to_string(i) + ": initial weights have wrong size");
  }
  if (reference_weights) {
    if (static_cast<int>(reference_weights->size()) != N)
      throw ConfigError("reference weights must cover every player");
    for (int i = 0; i < N; ++i)
      if ((*reference_weights)[i].size() != basis.feature_count(i))
        throw ConfigError("reference weights have wrong length");
  }
}

LearnerState SeededInitialState(const BasisSet& basis, std::span<const PlayerGains> gains,
                                std::uint64_t seed, double low, double high) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> spread(low, high);
  LearnerState s;
  for (int i = 0; i < basis.num_players(); ++i) {
    Vec w(basis.feature_count(i));
    for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = spread(rng);
    s.critic.push_back(w);
    s.actor.push_back(w);
    s.gamma.push_back(gains[i].critic.gamma_init);
  }
  return s;
}

RunRecord Simulate(const GameDefinition& game, const BasisSet& basis,
                   const SimulationConfig& config) {
  config.Validate(game, basis);
  const int N = game.num_players();
  const ExtrapolationGrid grid(game, basis, config.grid_points);
  const CoupledSystem sys{game, basis, grid, config.gains};

  RunRecord rec;
  rec.players.resize(N);
  rec.observed_c_lower.assign(N, std::numeric_limits<double>::infinity());
  rec.gamma_lower.assign(N, std::numeric_limits<double>::infinity());
  rec.gamma_upper.assign(N, 0.0);
  rec.rank_satisfied_throughout.assign(N, true);
  rec.corridor_violations.assign(N, 0);
  rec.regressor_bound_violations.assign(N, 0);

  auto record = [&](double t, const Vec& x, const LearnerState& s) {
    // Evaluate everything before touching the record so a throw leaves it intact.
    const FlowEvaluation e = EvaluateFlows(sys, x, s, {});
    std::vector<RankReport> ranks;
    for (int i = 0; i < N; ++i)
      ranks.push_back(RankMonitor(grid, i, s.actor, s.gamma[i], config.gains[i].critic.nu,
                                  config.rank_tolerance));
    rec.t.push_back(t);
    rec.x.push_back(x);
    for (int i = 0; i < N; ++i) {
      const CriticConfig& c = config.gains[i].critic;
      PlayerTrace& tr = rec.players[i];
      const double lam = MinEigenvalue(s.gamma[i]);
      const double norm = SpectralNorm(s.gamma[i]);
      const double reg = e.current[i].regressor.normalized.norm();
      const RankReport& rank = ranks[i];
      tr.critic.push_back(s.critic[i]);
      tr.actor.push_back(s.actor[i]);
      tr.control.push_back(e.control[i]);
      tr.delta.push_back(e.current[i].delta);
      tr.gamma_min_eig.push_back(lam);
      tr.gamma_norm.push_back(norm);
      tr.rank_min_eig.push_back(rank.min_eigenvalue);
      tr.normalized_norm.push_back(reg);

      rec.observed_c_lower[i] = std::min(rec.observed_c_lower[i], rank.c_lower);
      rec.gamma_lower[i] = std::min(rec.gamma_lower[i], lam);
      rec.gamma_upper[i] = std::max(rec.gamma_upper[i], norm);
      if (!rank.satisfied) rec.rank_satisfied_throughout[i] = false;
      if (!(lam > 0) || norm > c.gamma_bar + kCorridorSlack) ++rec.corridor_violations[i];
      if (lam > 0 && reg > 1.0 / (2.0 * std::sqrt(c.nu * lam)) * (1.0 + 1e-12))
        ++rec.regressor_bound_violations[i];
    }
    if (config.reference_weights) {
      const auto& W = *config.reference_weights;
      double sq = x.squaredNorm();
      for (int i = 0; i < N; ++i)
        sq += (W[i] - s.critic[i]).squaredNorm() + (W[i] - s.actor[i]).squaredNorm();
      rec.z_norm.push_back(std::sqrt(sq));
    }
  };

  Vec x = config.x0;
  LearnerState s = config.initial;
  for (int i = 0; i < N; ++i) s.gamma[i] = 0.5 * (s.gamma[i] + s.gamma[i].transpose());
  record(0.0, x, s);

  const long steps = std::lround(config.t_final / config.dt);
  const double h = config.dt;
  const auto indicator = std::make_unique<bool[]>(N);
  const std::span<const bool> ind(indicator.get(), static_cast<std::size_t>(N));
  for (long k = 1; k <= steps; ++k) {
    // Freeze the saturation indicator over the step.
    for (int i = 0; i < N; ++i)
      indicator[i] = SpectralNorm(s.gamma[i]) <= config.gains[i].critic.gamma_bar;

    const Vec y = PackState(x, s);
    Vec next;
    std::string component;
    try {
      const Vec k1 = CoupledDerivative(sys, y, ind);
      const Vec k2 = CoupledDerivative(sys, y + 0.5 * h * k1, ind);
      const Vec k3 = CoupledDerivative(sys, y + 0.5 * h * k2, ind);
      const Vec k4 = CoupledDerivative(sys, y + h * k3, ind);
      next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const NonFiniteError& err) {
      rec.abort = AbortKind::kNonFinite;
      rec.abort_time = k * h;
      rec.abort_component = err.what();
      break;
    }

    Vec xn;
    LearnerState sn;
    UnpackState(next, basis, xn, sn);
    if (!AllFinite(xn, sn, component)) {
      rec.abort = AbortKind::kNonFinite;
      rec.abort_time = k * h;
      rec.abort_component = component;
      break;
    }
    bool collapsed = false;
    for (int i = 0; i < N; ++i) {
      Mat& G = sn.gamma[i];
      G = 0.5 * (G + G.transpose());
      const double bar = config.gains[i].critic.gamma_bar;
      const double norm = SpectralNorm(G);
      if (norm > bar * (1.0 + kProjectionSlack)) G *= bar / norm;
      if (MinEigenvalue(G) < kGammaCollapse) {
        rec.abort = AbortKind::kGammaCollapse;
        rec.abort_time = k * h;
        rec.abort_component = "Gamma[" + std::to_string(i) + "]";
        collapsed = true;
      }
    }
    if (collapsed) break;

    if (k % config.record_every == 0 || k == steps) {
      try {
        record(k * h, xn, sn);
      } catch (const NonFiniteError& err) {
        rec.abort = AbortKind::kNonFinite;
        rec.abort_time = k * h;
        rec.abort_component = err.what();
        break;
      }
    }
    x = std::move(xn);
    s = std::move(sn);
  }

  if (!rec.z_norm.empty()) {
    rec.max_z_norm = *std::max_element(rec.z_norm.begin(), rec.z_norm.end());
    const double tail_start = 0.9 * rec.t.back();
    double tail = 0.0;
    for (std::size_t k = 0; k < rec.t.size(); ++k)
      if (rec.t[k] >= tail_start) tail = std::max(tail, rec.z_norm[k]);
    rec.ultimate_z_norm = tail;
  }
  rec.final_state = s;
  rec.final_x = x;
  return rec;
}

PolicyGap ComputePolicyGap(const RunRecord& record, std::span<const Vec> oracle_weights,
                           std::span<const double> bound_factors) {
  PolicyGap gap;
  const std::size_t N = record.players.size();
  if (oracle_weights.size() != N) throw DimensionError("expected oracle weights per player");
  gap.actor_error.resize(N);
  if (!bound_factors.empty()) {
    if (bound_factors.size() != N) throw DimensionError("expected one bound factor per player");
    gap.bound.resize(N);
  }
  for (std::size_t i = 0; i < N; ++i) {
    for (const Vec& wa : record.players[i].actor) {
      const double err = (oracle_weights[i] - wa).norm();
      gap.actor_error[i].push_back(err);
      if (!bound_factors.empty()) gap.bound[i].push_back(bound_factors[i] * err);
    }
  }
  return gap;
}

}  // namespace clnash
