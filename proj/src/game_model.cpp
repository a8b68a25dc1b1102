#include "clnash/game_model.hpp"

#include <cstdio>
#include <sstream>

namespace clnash {

std::string FormatVector(const Vec& v) {
  std::ostringstream os;
  os << "[";
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v(k));
    os << (k ? ", " : "") << buf;
  }
  os << "]";
  return os.str();
}

namespace {

constexpr double kAsymmetryTolerance = 1e-10;
constexpr double kDriftOriginTolerance = 1e-12;

Mat Symmetrize(const Mat& m, bool& corrected) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kAsymmetryTolerance) corrected = true;
  return 0.5 * (m + m.transpose());
}

std::string PlayerTag(int i) { return "player " + std::to_string(i); }

}  // namespace

GameDefinition::GameDefinition(int state_dim, std::vector<int> control_dims, DriftFn drift,
                               std::vector<InputMapFn> input_maps,
                               std::vector<Mat> state_weights,
                               std::vector<std::vector<Mat>> control_weights)
    : n_(state_dim), m_(std::move(control_dims)), drift_(std::move(drift)),
      input_maps_(std::move(input_maps)) {
  if (n_ < 1) throw ConfigError("state dimension must be positive");
  const int N = static_cast<int>(m_.size());
  if (N < 1) throw ConfigError("a game needs at least one player");
  if (static_cast<int>(input_maps_.size()) != N || static_cast<int>(state_weights.size()) != N ||
      static_cast<int>(control_weights.size()) != N) {
    throw ConfigError("input maps, Q and R tables must have one entry per player");
  }
  if (!drift_) throw ConfigError("drift function is empty");

  for (int i = 0; i < N; ++i) {
    if (m_[i] < 1) throw ConfigError(PlayerTag(i) + ": control dimension must be positive");
    if (!input_maps_[i]) throw ConfigError(PlayerTag(i) + ": input map is empty");
    const Mat& Qi = state_weights[i];
    if (Qi.rows() != n_ || Qi.cols() != n_)
      throw DimensionError(PlayerTag(i) + ": Q must be n x n", i);
    Q_.push_back(Symmetrize(Qi, asymmetry_corrected_));
    q_min_.push_back(MinEigenvalue(Q_.back()));
    if (!(q_min_.back() > 0.0))
      throw ConfigError(PlayerTag(i) + ": Q must be positive definite");
  }

  R_.resize(N);
  for (int i = 0; i < N; ++i) {
    if (static_cast<int>(control_weights[i].size()) != N)
      throw ConfigError(PlayerTag(i) + ": R row must have one entry per player");
    for (int j = 0; j < N; ++j) {
      const Mat& Rij = control_weights[i][j];
      if (Rij.rows() != m_[j] || Rij.cols() != m_[j])
        throw DimensionError("R(" + std::to_string(i) + "," + std::to_string(j) +
                                 ") must be m_j x m_j",
                             j);
      R_[i].push_back(Symmetrize(Rij, asymmetry_corrected_));
    }
  }
  for (int j = 0; j < N; ++j) {
    if (!(MinEigenvalue(R_[j][j]) > 0.0))
      throw ConfigError(PlayerTag(j) + ": R_jj must be positive definite");
    R_inv_.push_back(R_[j][j].llt().solve(Mat::Identity(m_[j], m_[j])));
  }

  const Vec f0 = drift_(Vec::Zero(n_));
  if (f0.size() != n_) throw DimensionError("drift must return a length-n vector");
  if (f0.cwiseAbs().maxCoeff() > kDriftOriginTolerance)
    throw ConfigError("drift must vanish at the origin, got f(0) = " + FormatVector(f0));
}

GameDefinition GameDefinition::FromLinear(const LinearQuadraticGame& lq) {
  const int n = static_cast<int>(lq.A.rows());
  if (lq.A.cols() != n) throw DimensionError("A must be square");
  std::vector<int> dims;
  std::vector<InputMapFn> maps;
  for (std::size_t i = 0; i < lq.B.size(); ++i) {
    const Mat& B = lq.B[i];
    if (B.rows() != n) throw DimensionError(PlayerTag(int(i)) + ": B must have n rows", int(i));
    dims.push_back(static_cast<int>(B.cols()));
    maps.push_back([B](const Vec&) { return B; });
  }
  const Mat A = lq.A;
  GameDefinition game(n, dims, [A](const Vec& x) -> Vec { return A * x; }, std::move(maps), lq.Q,
                      lq.R);
  // Keep the symmetrized weights so the oracle sees exactly what the learner sees.
  LinearQuadraticGame stored = lq;
  stored.Q = game.Q_;
  stored.R = game.R_;
  game.linear_ = std::move(stored);
  return game;
}

void GameDefinition::CheckState(const Vec& x) const {
  if (x.size() != n_)
    throw DimensionError("state has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(n_));
}

void GameDefinition::CheckPlayer(int i) const {
  if (i < 0 || i >= num_players())
    throw DimensionError("player index " + std::to_string(i) + " out of range", i);
}

Vec GameDefinition::Drift(const Vec& x) const {
  CheckState(x);
  return drift_(x);
}

Mat GameDefinition::InputMap(int i, const Vec& x) const {
  CheckPlayer(i);
  CheckState(x);
  Mat g = input_maps_[i](x);
  if (g.rows() != n_ || g.cols() != m_[i])
    throw DimensionError(PlayerTag(i) + ": input map returned wrong shape", i);
  return g;
}

Vec GameDefinition::EvaluateDynamics(const Vec& x, std::span<const Vec> controls) const {
  CheckState(x);
  if (static_cast<int>(controls.size()) != num_players())
    throw DimensionError("expected one control per player");
  Vec xdot = drift_(x);
  for (int i = 0; i < num_players(); ++i) {
    if (controls[i].size() != m_[i])
      throw DimensionError(PlayerTag(i) + ": control has wrong length", i);
    xdot.noalias() += InputMap(i, x) * controls[i];
  }
  return xdot;
}

double GameDefinition::InstantaneousCost(const Vec& x, std::span<const Vec> controls,
                                         int player) const {
  CheckPlayer(player);
  CheckState(x);
  if (static_cast<int>(controls.size()) != num_players())
    throw DimensionError("expected one control per player");
  double cost = x.dot(Q_[player] * x);
  for (int j = 0; j < num_players(); ++j) {
    if (controls[j].size() != m_[j])
      throw DimensionError(PlayerTag(j) + ": control has wrong length", j);
    cost += controls[j].dot(R_[player][j] * controls[j]);
  }
  return cost;
}

Mat GameDefinition::InputCoupling(const Vec& x, int j) const {
  const Mat g = InputMap(j, x);
  Mat G = g * R_inv_[j] * g.transpose();
  return 0.5 * (G + G.transpose());
}

CouplingPair GameDefinition::Coupling(const Vec& x, int i, int j) const {
  CheckPlayer(i);
  const Mat g = InputMap(j, x);
  const Mat gRinv = g * R_inv_[j];
  Mat G_j = gRinv * g.transpose();
  Mat G_ij = gRinv * R_[i][j] * gRinv.transpose();
  return {0.5 * (G_j + G_j.transpose()), 0.5 * (G_ij + G_ij.transpose())};
}

}  // namespace clnash
