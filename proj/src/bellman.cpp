#include "clnash/bellman.hpp"

#include <cmath>

#include "clnash/sampling.hpp"

namespace clnash {

namespace {

void RequireFinite(const Eigen::Ref<const Mat>& v, int player, const char* term) {
  if (!v.allFinite())
    throw NonFiniteError("player " + std::to_string(player) + ": " + term + " is not finite");
}

void CheckActorWeights(const StateTerms& terms, std::span<const Vec> actor_weights) {
  if (actor_weights.size() != terms.jac.size())
    throw DimensionError("expected one actor weight vector per player");
  for (std::size_t j = 0; j < actor_weights.size(); ++j) {
    if (actor_weights[j].size() != terms.jac[j].rows())
      throw DimensionError("actor weights of player " + std::to_string(j) + " have wrong length",
                           int(j));
  }
}

// omega_i without the Gamma-dependent normalization.
Vec RawRegressor(const StateTerms& terms, int i, std::span<const Vec> actor_weights) {
  const Mat& Ji = terms.jac[i];
  Vec omega = Ji * terms.f;
  RequireFinite(omega, i, "sigma' f");
  for (std::size_t j = 0; j < actor_weights.size(); ++j)
    omega.noalias() -= 0.5 * (Ji * (terms.G[j] * (terms.jac[j].transpose() * actor_weights[j])));
  RequireFinite(omega, i, "omega");
  return omega;
}

}  // namespace

StateTerms EvaluateStateTerms(const GameDefinition& game, const BasisSet& basis, const Vec& x) {
  const int N = game.num_players();
  if (basis.num_players() != N) throw DimensionError("basis and game disagree on player count");
  StateTerms t;
  t.x = x;
  t.f = game.Drift(x);
  t.jac.reserve(N);
  t.G.reserve(N);
  t.G_pair.assign(N, std::vector<Mat>(N));
  for (int j = 0; j < N; ++j) {
    t.jac.push_back(basis.Jacobian(j, x));
    t.G.push_back(game.InputCoupling(x, j));
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) t.G_pair[i][j] = game.Coupling(x, i, j).G_ij;
  return t;
}

Vec ApproximatePolicy(const GameDefinition& game, const BasisSet& basis, int i, const Vec& x,
                      const Vec& actor_weights_i) {
  const Mat J = basis.Jacobian(i, x);
  if (actor_weights_i.size() != J.rows())
    throw DimensionError("actor weights have wrong length", i);
  const Mat g = game.InputMap(i, x);
  return -0.5 * game.RInverse(i) * (g.transpose() * (J.transpose() * actor_weights_i));
}

RegressorSample RegressorAt(const StateTerms& terms, int i, std::span<const Vec> actor_weights,
                            const Mat& gamma_i, double nu_i) {
  CheckActorWeights(terms, actor_weights);
  RegressorSample s;
  s.omega = RawRegressor(terms, i, actor_weights);
  if (gamma_i.rows() != s.omega.size() || gamma_i.cols() != s.omega.size())
    throw DimensionError("gain matrix has wrong shape", i);
  s.rho = 1.0 + nu_i * s.omega.dot(gamma_i * s.omega);
  if (!std::isfinite(s.rho)) throw NonFiniteError("player " + std::to_string(i) + ": rho");
  s.normalized = s.omega / s.rho;
  return s;
}

RegressorSample Regressor(const GameDefinition& game, const BasisSet& basis, int i, const Vec& x,
                          std::span<const Vec> actor_weights, const Mat& gamma_i, double nu_i) {
  return RegressorAt(EvaluateStateTerms(game, basis, x), i, actor_weights, gamma_i, nu_i);
}

double BellmanErrorAt(const GameDefinition& game, const StateTerms& terms, int i,
                      const Vec& critic_weights_i, std::span<const Vec> actor_weights,
                      const RegressorSample& sample) {
  CheckActorWeights(terms, actor_weights);
  if (critic_weights_i.size() != sample.omega.size())
    throw DimensionError("critic weights have wrong length", i);
  double delta = sample.omega.dot(critic_weights_i) + terms.x.dot(game.Q(i) * terms.x);
  for (std::size_t j = 0; j < actor_weights.size(); ++j) {
    const Vec v = terms.jac[j].transpose() * actor_weights[j];
    delta += 0.25 * v.dot(terms.G_pair[i][j] * v);
  }
  if (!std::isfinite(delta))
    throw NonFiniteError("player " + std::to_string(i) + ": Bellman error is not finite");
  return delta;
}

double BellmanError(const GameDefinition& game, const BasisSet& basis, int i, const Vec& x,
                    const Vec& critic_weights_i, std::span<const Vec> actor_weights,
                    const RegressorSample& sample) {
  return BellmanErrorAt(game, EvaluateStateTerms(game, basis, x), i, critic_weights_i,
                        actor_weights, sample);
}

ExtrapolationGrid::ExtrapolationGrid(const GameDefinition& game, const BasisSet& basis,
                                     std::vector<std::vector<Vec>> points_per_player) {
  if (static_cast<int>(points_per_player.size()) != game.num_players())
    throw ConfigError("extrapolation grid needs one point list per player");
  terms_.resize(points_per_player.size());
  for (std::size_t i = 0; i < points_per_player.size(); ++i) {
    if (points_per_player[i].empty())
      throw ConfigError("player " + std::to_string(i) + ": extrapolation grid is empty");
    for (const Vec& p : points_per_player[i]) {
      if (p.size() != game.state_dim())
        throw DimensionError("grid point has wrong length", int(i));
      terms_[i].push_back(EvaluateStateTerms(game, basis, p));
    }
  }
}

std::vector<Vec> ExtrapolationGrid::Lattice(const Vec& lower, const Vec& upper,
                                            const std::vector<int>& counts, bool exclude_origin) {
  const int n = static_cast<int>(lower.size());
  if (upper.size() != n || static_cast<int>(counts.size()) != n)
    throw DimensionError("lattice bounds and counts must have length n");
  std::vector<Vec> out;
  std::vector<int> idx(n, 0);
  for (int c : counts)
    if (c < 1) throw ConfigError("lattice counts must be positive");
  while (true) {
    Vec p(n);
    for (int a = 0; a < n; ++a) {
      p(a) = counts[a] == 1 ? 0.5 * (lower(a) + upper(a))
                            : lower(a) + (upper(a) - lower(a)) * idx[a] / (counts[a] - 1);
    }
    if (!(exclude_origin && p.cwiseAbs().maxCoeff() < 1e-15)) out.push_back(p);
    int a = n - 1;
    while (a >= 0 && ++idx[a] == counts[a]) idx[a--] = 0;
    if (a < 0) break;
  }
  return out;
}

std::vector<Vec> ExtrapolationGrid::Scatter(const Vec& lower, const Vec& upper, int count,
                                            bool exclude_origin) {
  const int n = static_cast<int>(lower.size());
  if (upper.size() != n) throw DimensionError("scatter bounds must have length n");
  std::vector<Vec> out;
  for (std::uint64_t k = 1; static_cast<int>(out.size()) < count; ++k) {
    Vec p(n);
    for (int a = 0; a < n; ++a) p(a) = lower(a) + (upper(a) - lower(a)) * Halton(k, a);
    if (exclude_origin && p.cwiseAbs().maxCoeff() < 1e-15) continue;
    out.push_back(p);
  }
  return out;
}

std::vector<BellmanSample> ExtrapolatedBellmanErrors(const GameDefinition& game,
                                                     const ExtrapolationGrid& grid, int i,
                                                     const Vec& critic_weights_i,
                                                     std::span<const Vec> actor_weights,
                                                     const Mat& gamma_i, double nu_i) {
  std::vector<BellmanSample> out;
  out.reserve(grid.size(i));
  for (const StateTerms& t : grid.points(i)) {
    BellmanSample s;
    s.regressor = RegressorAt(t, i, actor_weights, gamma_i, nu_i);
    s.delta = BellmanErrorAt(game, t, i, critic_weights_i, actor_weights, s.regressor);
    out.push_back(std::move(s));
  }
  return out;
}

double AnalyticBellmanError(const GameDefinition& game, const BasisSet& basis, int i,
                            const Vec& x, std::span<const Vec> true_weights,
                            const Vec& critic_error_i, std::span<const Vec> actor_errors) {
  const StateTerms t = EvaluateStateTerms(game, basis, x);
  const int N = game.num_players();
  if (static_cast<int>(true_weights.size()) != N || static_cast<int>(actor_errors.size()) != N)
    throw DimensionError("expected one weight vector per player");
  std::vector<Vec> actor(N);
  for (int j = 0; j < N; ++j) actor[j] = true_weights[j] - actor_errors[j];
  const Vec omega = RawRegressor(t, i, actor);

  double value = -omega.dot(critic_error_i);
  const Mat& Ji = t.jac[i];
  for (int j = 0; j < N; ++j) {
    const Vec v = t.jac[j].transpose() * actor_errors[j];
    value += 0.25 * v.dot(t.G_pair[i][j] * v);
    // (W_i^T sigma_i' G_j - W_j^T sigma_j' G_ij) as a row vector, transposed.
    // Plus sign: subtracting the HJ equation term by term gives +1/2 here.
    const Vec row = t.G[j] * (Ji.transpose() * true_weights[i]) -
                    t.G_pair[i][j] * (t.jac[j].transpose() * true_weights[j]);
    value += 0.5 * row.dot(v);
  }
  return value;
}

}  // namespace clnash
