#include "clnash/update_laws.hpp"

namespace clnash {

void CriticConfig::Validate(int feature_count) const {
  if (!(eta_c1 > 0 && eta_c2 > 0 && beta > 0 && nu > 0 && gamma_bar > 0))
    throw ConfigError("critic gains eta_c1, eta_c2, beta, nu, gamma_bar must be positive");
  if (gamma_init.rows() != feature_count || gamma_init.cols() != feature_count)
    throw ConfigError("gamma_init must be " + std::to_string(feature_count) + " x " +
                      std::to_string(feature_count));
  if ((gamma_init - gamma_init.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw ConfigError("gamma_init must be symmetric");
  if (!(MinEigenvalue(gamma_init) > 0)) throw ConfigError("gamma_init must be positive definite");
  if (SpectralNorm(gamma_init) > gamma_bar) throw ConfigError("||gamma_init|| exceeds gamma_bar");
}

void ActorConfig::Validate() const {
  if (!(eta_a1 > 0 && eta_a2 > 0)) throw ConfigError("actor gains eta_a1, eta_a2 must be positive");
}

Vec CriticDerivative(const BellmanSample& current, std::span<const BellmanSample> extrapolated,
                     const Mat& gamma, const CriticConfig& cfg) {
  if (extrapolated.empty()) throw ConfigError("critic update needs at least one grid point");
  Vec sum = Vec::Zero(current.regressor.omega.size());
  for (const BellmanSample& s : extrapolated) sum += s.regressor.normalized * s.delta;
  const Vec direction = cfg.eta_c1 * current.regressor.normalized * current.delta +
                        (cfg.eta_c2 / static_cast<double>(extrapolated.size())) * sum;
  return -(gamma * direction);
}

Mat GammaDerivative(const RegressorSample& sample, const Mat& gamma, const CriticConfig& cfg,
                    bool indicator_on) {
  if (!indicator_on) return Mat::Zero(gamma.rows(), gamma.cols());
  const Vec gw = gamma * sample.omega;
  const double rho2 = sample.rho * sample.rho;
  // Gamma w w^T Gamma is symmetric when Gamma is; form it as an outer product.
  return cfg.beta * gamma - (cfg.eta_c1 / rho2) * gw * gw.transpose();
}

Mat GammaDerivative(const RegressorSample& sample, const Mat& gamma, const CriticConfig& cfg) {
  return GammaDerivative(sample, gamma, cfg, SpectralNorm(gamma) <= cfg.gamma_bar);
}

Vec ActorDerivative(int i, const ActorInputs& in, const LearnerState& state,
                    std::span<const PlayerGains> gains) {
  const int N = static_cast<int>(state.actor.size());
  const Vec& Wa = state.actor[i];
  const Vec& Wc = state.critic[i];
  const ActorConfig& a = gains[i].actor;
  Vec d = -a.eta_a1 * (Wa - Wc) - a.eta_a2 * Wa;

  // sigma_i' G_ji sigma_i'^T W_ai at the given terms.
  auto shaped = [&](const StateTerms& t, int j) -> Vec {
    const Mat& Ji = t.jac[i];
    return Ji * (t.G_pair[j][i] * (Ji.transpose() * Wa));
  };

  for (int j = 0; j < N; ++j) {
    const CriticConfig& cj = gains[j].critic;
    const double scale = state.critic[j].dot(in.current[j].regressor.normalized);
    d += 0.25 * cj.eta_c1 * scale * shaped(in.at_state, j);

    const auto points = in.grid.points(j);
    const auto& extrap = in.extrapolated[j];
    const double weight = cj.eta_c2 / static_cast<double>(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
      const double sk = state.critic[j].dot(extrap[k].regressor.normalized);
      d += 0.25 * weight * sk * shaped(points[k], j);
    }
  }
  return d;
}

RankReport RankMonitor(const ExtrapolationGrid& grid, int i, std::span<const Vec> actor_weights,
                       const Mat& gamma_i, double nu_i, double rank_tolerance) {
  const auto points = grid.points(i);
  const int p = static_cast<int>(gamma_i.rows());
  Mat sum = Mat::Zero(p, p);
  for (const StateTerms& t : points) {
    const RegressorSample s = RegressorAt(t, i, actor_weights, gamma_i, nu_i);
    sum.noalias() += s.omega * s.omega.transpose() / s.rho;
  }
  RankReport r;
  r.min_eigenvalue = MinEigenvalue(0.5 * (sum + sum.transpose()));
  r.c_lower = r.min_eigenvalue / static_cast<double>(points.size());
  r.satisfied = r.min_eigenvalue > rank_tolerance;
  return r;
}

}  // namespace clnash
