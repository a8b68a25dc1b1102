#include "clnash/gain_advisor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "clnash/sampling.hpp"

namespace clnash {

namespace {

constexpr int kMaxVertexDim = 12;
constexpr double kInf = std::numeric_limits<double>::infinity();

int TotalFeatures(const BasisSet& basis) {
  int total = 0;
  for (int i = 0; i < basis.num_players(); ++i) total += basis.feature_count(i);
  return total;
}

// Points of `set` restricted to `coords`, as vectors of length coords.size().
std::vector<Vec> SampleCoordinates(const CompactSet& set, const std::vector<int>& coords) {
  const int d = static_cast<int>(coords.size());
  std::vector<Vec> pts;
  if (set.ball_radius) {
    const double r = *set.ball_radius;
    pts.push_back(Vec::Zero(d));
    for (int a = 0; a < d; ++a) {
      Vec e = Vec::Zero(d);
      e(a) = r;
      pts.push_back(e);
      pts.push_back(-e);
    }
    // Cube [-1,1]^d onto the ball by rescaling along rays.
    auto to_ball = [r](Vec c) -> Vec {
      const double two = c.norm();
      if (two == 0.0) return c;
      return r * c * (c.cwiseAbs().maxCoeff() / two);
    };
    if (d <= kMaxVertexDim) {
      for (long mask = 0; mask < (1L << d); ++mask) {
        Vec c(d);
        for (int a = 0; a < d; ++a) c(a) = (mask >> a) & 1 ? 1.0 : -1.0;
        pts.push_back(to_ball(c));
      }
    }
    for (int k = 1; k <= set.sample_count; ++k) {
      Vec c(d);
      for (int a = 0; a < d; ++a) c(a) = 2.0 * Halton(k, a) - 1.0;
      pts.push_back(to_ball(c));
    }
    return pts;
  }

  Vec lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    lo(a) = set.lower(coords[a]);
    hi(a) = set.upper(coords[a]);
  }
  pts.push_back(0.5 * (lo + hi));
  if (d <= kMaxVertexDim) {
    for (long mask = 0; mask < (1L << d); ++mask) {
      Vec c(d);
      for (int a = 0; a < d; ++a) c(a) = (mask >> a) & 1 ? hi(a) : lo(a);
      pts.push_back(c);
    }
  }
  for (int k = 1; k <= set.sample_count; ++k) {
    Vec c(d);
    for (int a = 0; a < d; ++a) c(a) = lo(a) + (hi(a) - lo(a)) * Halton(k, a);
    pts.push_back(c);
  }
  return pts;
}

Vec RawOmega(const StateTerms& t, int i, std::span<const Vec> actor) {
  Vec omega = t.jac[i] * t.f;
  for (std::size_t j = 0; j < actor.size(); ++j)
    omega -= 0.5 * (t.jac[i] * (t.G[j] * (t.jac[j].transpose() * actor[j])));
  return omega;
}

// Row vector (3 W_j^T s_j' G_ij - 2 W_i^T s_i' G_j) s_j'^T, returned as a column.
Vec CrossRow(const StateTerms& t, int i, int j, std::span<const Vec> W) {
  const Vec a = t.G_pair[i][j] * (t.jac[j].transpose() * W[j]);
  const Vec b = t.G[j] * (t.jac[i].transpose() * W[i]);
  return t.jac[j] * (3.0 * a - 2.0 * b);
}

// Bound on |Delta_i| at one state from the eps' bounds.
double DeltaBound(const StateTerms& t, int i, std::span<const Vec> W, std::span<const double> ep) {
  const int N = static_cast<int>(W.size());
  double bound = 0.0;
  for (int j = 0; j < N; ++j) {
    const Vec row = t.G[j] * (t.jac[i].transpose() * W[i]) -
                    t.G_pair[i][j] * (t.jac[j].transpose() * W[j]);
    bound += 0.5 * row.norm() * ep[j];
    bound += 0.5 * (t.G[j] * (t.jac[j].transpose() * W[j])).norm() * ep[i];
    bound += 0.5 * SpectralNorm(t.G[j]) * ep[i] * ep[j];
    bound += 0.25 * SpectralNorm(t.G_pair[i][j]) * ep[j] * ep[j];
  }
  return bound;
}

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

CompactSet CompactSet::Box(Vec lower, Vec upper, int sample_count) {
  CompactSet s;
  s.lower = std::move(lower);
  s.upper = std::move(upper);
  s.sample_count = sample_count;
  s.Validate();
  return s;
}

CompactSet CompactSet::Ball(int dim, double radius, int sample_count) {
  CompactSet s;
  s.lower = Vec::Constant(dim, -radius);
  s.upper = Vec::Constant(dim, radius);
  s.ball_radius = radius;
  s.sample_count = sample_count;
  s.Validate();
  return s;
}

CompactSet CompactSet::FromRadii(int state_dim, int total_features, double state_radius,
                                 double weight_radius, int sample_count) {
  const int dim = state_dim + 2 * total_features;
  Vec hi(dim);
  hi.head(state_dim).setConstant(state_radius);
  hi.tail(2 * total_features).setConstant(weight_radius);
  return Box(-hi, hi, sample_count);
}

double CompactSet::Diameter() const {
  if (ball_radius) return 2.0 * *ball_radius;
  return (upper - lower).norm();
}

void CompactSet::Validate() const {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw ConfigError("compact set bounds must be nonempty and of equal length");
  if (!((upper - lower).array() > 0.0).all())
    throw ConfigError("compact set needs lower < upper in every coordinate");
  if (ball_radius && !(*ball_radius > 0)) throw ConfigError("ball radius must be positive");
  if (sample_count < 1000) throw ConfigError("compact set needs at least 1000 samples");
}

EpsilonBounds EpsilonBounds::Zero(int num_players) {
  return {std::vector<double>(num_players, 0.0), std::vector<double>(num_players, 0.0)};
}

double DecayConstant(std::span<const double> q_lower, std::span<const double> c_lower,
                     std::span<const PlayerGains> gains) {
  double m = kInf;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    const auto& g = gains[i];
    m = std::min({m, q_lower[i] / 2.0, g.critic.eta_c2 * c_lower[i] / 4.0,
                  (2.0 * g.actor.eta_a1 + g.actor.eta_a2) / 8.0});
  }
  return 0.5 * m;
}

double ClassKEnvelope(double r, std::span<const PlayerGains> gains,
                      std::span<const double> gamma_lower, double kappa_v) {
  double lo = 1.0, hi_inv = 0.0;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    lo = std::min(lo, 1.0 / gains[i].critic.gamma_bar);
    hi_inv = std::max(hi_inv, 1.0 / gamma_lower[i]);
  }
  const double c_lo = 0.5 * lo;
  const double c_hi = kappa_v + 0.5 * hi_inv + 0.5;
  return r * std::sqrt(c_hi / c_lo);
}

GainBoundsReport EstimateConstants(const GameDefinition& game, const BasisSet& basis,
                                   std::span<const PlayerGains> gains, const CompactSet& set,
                                   const AdvisorInputs& inputs, const EpsilonBounds& eps) {
  const int N = game.num_players();
  const int n = game.state_dim();
  const int P = TotalFeatures(basis);
  set.Validate();
  if (set.dim() != n + 2 * P)
    throw ConfigError("compact set must have dimension n + 2 sum p = " + std::to_string(n + 2 * P));
  if (!(inputs.zeta > 0)) throw ConfigError("zeta must be positive");
  if (static_cast<int>(gains.size()) != N || static_cast<int>(inputs.reference_weights.size()) != N ||
      static_cast<int>(inputs.grid_points.size()) != N)
    throw ConfigError("advisor inputs must cover every player");
  if (static_cast<int>(eps.eps_bar.size()) != N || static_cast<int>(eps.eps_bar_prime.size()) != N)
    throw ConfigError("epsilon bounds must cover every player");
  for (int i = 0; i < N; ++i)
    if (eps.eps_bar[i] < 0 || eps.eps_bar_prime[i] < 0)
      throw ConfigError("epsilon bounds must be nonnegative");

  const std::span<const Vec> W = inputs.reference_weights;
  GainBoundsReport r;
  r.zeta = inputs.zeta;
  r.eps_bar = eps.eps_bar;
  r.eps_bar_prime = eps.eps_bar_prime;
  r.gamma_lower = inputs.gamma_lower;
  if (r.gamma_lower.empty())
    for (int i = 0; i < N; ++i) r.gamma_lower.push_back(MinEigenvalue(gains[i].critic.gamma_init));
  for (int i = 0; i < N; ++i) {
    if (!(r.gamma_lower[i] > 0)) throw ConfigError("Gamma lower bound must be positive");
    r.w_bar.push_back(W[i].norm());
    r.q_lower.push_back(game.QMinEigenvalue(i));
  }
  r.sigma_bar.assign(N, 0.0);
  r.sigma_bar_prime.assign(N, 0.0);
  r.g_bar.assign(N, 0.0);
  r.c_lower.assign(N, kInf);
  std::vector<double> delta_sup(N, 0.0), delta_grid(N, 0.0);

  const ExtrapolationGrid grid(game, basis, inputs.grid_points);
  const auto& ep = eps.eps_bar_prime;
  for (int i = 0; i < N; ++i)
    for (const StateTerms& t : grid.points(i))
      delta_grid[i] = std::max(delta_grid[i], ep[i] * t.f.norm() + DeltaBound(t, i, W, ep));

  // Sampled coordinates: x and every player's actor error.
  std::vector<int> coords(n);
  std::iota(coords.begin(), coords.end(), 0);
  for (int k = 0; k < P; ++k) coords.push_back(n + P + k);
  const std::vector<Vec> samples = SampleCoordinates(set, coords);
  if (samples.empty()) throw ConfigError("compact set produced no samples");

  std::vector<Vec> actor(N);
  for (const Vec& z : samples) {
    const Vec x = z.head(n);
    int at = n;
    for (int j = 0; j < N; ++j) {
      const int p = basis.feature_count(j);
      actor[j] = W[j] - z.segment(at, p);
      at += p;
    }
    const StateTerms t = EvaluateStateTerms(game, basis, x);

    const double xn = x.norm();
    if (xn > 1e-12) r.lipschitz_f = std::max(r.lipschitz_f, t.f.norm() / xn);

    for (int i = 0; i < N; ++i) {
      r.sigma_bar[i] = std::max(r.sigma_bar[i], basis.Features(i, x).norm());
      r.sigma_bar_prime[i] = std::max(r.sigma_bar_prime[i], SpectralNorm(t.jac[i]));
      r.g_bar[i] = std::max(r.g_bar[i], SpectralNorm(game.InputMap(i, x)));
      delta_sup[i] = std::max(delta_sup[i], DeltaBound(t, i, W, ep));
    }

    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const Vec row1 = t.jac[j] * (t.G[j] * (t.jac[i].transpose() * W[i]));
        const double i1 = 0.5 * row1.norm() + 0.5 * ep[i] * SpectralNorm(t.G[j] * t.jac[j].transpose());
        r.iota1 = std::max(r.iota1, i1);
        r.iota4 = std::max(r.iota4,
                           SpectralNorm(t.jac[j] * t.G_pair[i][j] * t.jac[j].transpose()));
      }
    // Both sums enter with their norms.
    {
      double mag = 0.0;
      for (int i = 0; i < N; ++i) {
        const double wsi = (t.jac[i].transpose() * W[i]).norm();
        for (int j = 0; j < N; ++j) {
          const double wsj = (t.jac[j].transpose() * W[j]).norm();
          mag += 0.5 * (wsi + ep[i]) * SpectralNorm(t.G[j]) * ep[j] +
                 0.25 * (2.0 * wsj + ep[j]) * SpectralNorm(t.G_pair[i][j]) * ep[j];
        }
      }
      r.iota3 = std::max(r.iota3, mag);
    }

    for (int i = 0; i < N; ++i) {
      const CriticConfig& c = gains[i].critic;
      const double g_lo = r.gamma_lower[i];
      const Vec omega = RawOmega(t, i, actor);
      const double rho = 1.0 + c.nu * g_lo * omega.squaredNorm();
      const auto points = grid.points(i);
      const double M = static_cast<double>(points.size());

      std::vector<Vec> grid_omega;
      Mat info = Mat::Zero(omega.size(), omega.size());
      for (const StateTerms& tk : points) {
        grid_omega.push_back(RawOmega(tk, i, actor));
        const Vec& wk = grid_omega.back();
        info += wk * wk.transpose() / (1.0 + c.nu * c.gamma_bar * wk.squaredNorm());
      }
      r.c_lower[i] = std::min(r.c_lower[i], std::max(0.0, MinEigenvalue(info)) / M);

      for (int j = 0; j < N; ++j) {
        Mat m = (c.eta_c1 / (4.0 * rho)) * omega * CrossRow(t, i, j, W).transpose();
        for (std::size_t k = 0; k < points.size(); ++k) {
          const Vec& wk = grid_omega[k];
          const double rho_k = 1.0 + c.nu * g_lo * wk.squaredNorm();
          m += (c.eta_c2 / (4.0 * M * rho_k)) * wk * CrossRow(points[k], i, j, W).transpose();
        }
        r.iota2 = std::max(r.iota2, SpectralNorm(m));
      }
    }
  }

  r.iota5.resize(N);
  r.iota9.resize(N);
  r.iota10.resize(N);
  for (int i = 0; i < N; ++i) {
    const CriticConfig& c = gains[i].critic;
    const double root = std::sqrt(c.nu * r.gamma_lower[i]);
    r.iota5[i] = c.eta_c1 * r.lipschitz_f * ep[i] / (4.0 * root);
    r.iota8 += (c.eta_c1 + c.eta_c2) * r.w_bar[i] * r.iota4 / (8.0 * root);
    r.iota10[i] = (c.eta_c1 * delta_sup[i] + c.eta_c2 * delta_grid[i]) / (2.0 * root);
  }
  for (int i = 0; i < N; ++i)
    r.iota9[i] = r.iota1 * N + (gains[i].actor.eta_a2 + r.iota8) * r.w_bar[i];

  r.v_l = DecayConstant(r.q_lower, r.c_lower, gains);
  r.iota = r.iota3;
  for (int i = 0; i < N; ++i) {
    const double actor_sum = 2.0 * gains[i].actor.eta_a1 + gains[i].actor.eta_a2;
    const double critic_rate = gains[i].critic.eta_c2 * r.c_lower[i];
    r.iota += 2.0 * r.iota9[i] * r.iota9[i] / actor_sum;
    if (r.iota10[i] > 0) r.iota += critic_rate > 0 ? r.iota10[i] * r.iota10[i] / critic_rate : kInf;
  }
  r.radius = r.v_l > 0 ? std::sqrt(r.iota / r.v_l) : kInf;
  r.z_bar = ClassKEnvelope(std::max(inputs.z0_norm, r.radius), gains, r.gamma_lower, inputs.kappa_v);
  r.diameter = set.Diameter();
  r.diameter_ok = r.radius <= 0.5 * r.diameter;

  r.conditions = CheckGainConditions(r, gains);
  r.conditions_ok = {true, true, true};
  for (const PlayerConditions& pc : r.conditions)
    for (int c = 0; c < 3; ++c) r.conditions_ok[c] = r.conditions_ok[c] && pc[c].ok;
  return r;
}

std::vector<PlayerConditions> CheckGainConditions(const GainBoundsReport& report,
                                                  std::span<const PlayerGains> gains) {
  const double N = static_cast<double>(gains.size());
  std::vector<PlayerConditions> out;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    const auto& g = gains[i];
    PlayerConditions pc;
    pc[0].margin = report.q_lower[i] - 2.0 * report.iota5[i];
    pc[1].margin = g.critic.eta_c2 * report.c_lower[i] -
                   (2.0 * report.iota5[i] + report.iota2 * report.zeta * N + g.actor.eta_a1);
    pc[2].margin = (2.0 * g.actor.eta_a1 + g.actor.eta_a2) -
                   (4.0 * report.iota8 + 2.0 * report.iota2 * N / report.zeta);
    for (auto& v : pc) v.ok = v.margin > 0.0;
    out.push_back(pc);
  }
  return out;
}

GainSelectionResult SelectCompactSet(double z_init, const GameDefinition& game,
                                     const BasisSet& basis, std::span<const PlayerGains> gains,
                                     const AdvisorInputs& inputs, const EpsilonSchedule& eps,
                                     int sample_count) {
  if (!(z_init > 0)) throw ConfigError("z must be positive");
  const int dim = game.state_dim() + 2 * TotalFeatures(basis);
  std::vector<double> gamma_lower = inputs.gamma_lower;
  if (gamma_lower.empty())
    for (const auto& g : gains) gamma_lower.push_back(MinEigenvalue(g.critic.gamma_init));

  AdvisorInputs in = inputs;
  in.z0_norm = z_init;
  GainSelectionResult res;

  res.set = CompactSet::Ball(dim, ClassKEnvelope(z_init, gains, gamma_lower, in.kappa_v),
                             sample_count);
  res.report = EstimateConstants(game, basis, gains, res.set, in, eps(1));
  res.radii.push_back(res.report.radius);
  res.iterations = 1;
  // An unbounded radius (no decay, or a rank-deficient grid) cannot seed a set.
  if (res.report.radius <= z_init || !std::isfinite(res.report.radius)) return res;

  const double first = res.report.radius;
  CompactSet second =
      CompactSet::Ball(dim, ClassKEnvelope(first, gains, gamma_lower, in.kappa_v), sample_count);
  GainBoundsReport report2 = EstimateConstants(game, basis, gains, second, in, eps(2));
  res.radii.push_back(report2.radius);
  res.set = second;
  res.report = report2;
  res.iterations = 2;
  if (report2.radius <= first) return res;

  res.iterations = 3;
  res.needs_richer_basis = true;
  return res;
}

std::string FormatReportText(const GainBoundsReport& r) {
  std::ostringstream os;
  auto list = [&](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + Num(v[i]);
    return "[" + s + "]";
  };
  os << "gain bounds report\n";
  os << "  iota1 = " << Num(r.iota1) << "\n  iota2 = " << Num(r.iota2)
     << "\n  iota3 = " << Num(r.iota3) << "\n  iota4 = " << Num(r.iota4)
     << "\n  iota5 = " << list(r.iota5) << "\n  iota8 = " << Num(r.iota8)
     << "\n  iota9 = " << list(r.iota9) << "\n  iota10 = " << list(r.iota10) << "\n";
  os << "  v_l = " << Num(r.v_l) << "\n  iota = " << Num(r.iota)
     << "\n  sqrt(iota/v_l) = " << Num(r.radius) << "\n  Z_bar = " << Num(r.z_bar)
     << "\n  zeta = " << Num(r.zeta) << "\n  L_f = " << Num(r.lipschitz_f) << "\n";
  os << "  W_bar = " << list(r.w_bar) << "\n  sigma_bar = " << list(r.sigma_bar)
     << "\n  sigma_bar_prime = " << list(r.sigma_bar_prime) << "\n  g_bar = " << list(r.g_bar)
     << "\n  q_lower = " << list(r.q_lower) << "\n  c_lower = " << list(r.c_lower)
     << "\n  gamma_lower = " << list(r.gamma_lower) << "\n  eps_bar = " << list(r.eps_bar)
     << "\n  eps_bar_prime = " << list(r.eps_bar_prime) << "\n";
  static const char* names[3] = {"q_i > 2 iota5_i",
                                 "eta_c2 c_x > 2 iota5 + iota2 zeta N + eta_a1",
                                 "2 eta_a1 + eta_a2 > 4 iota8 + 2 iota2 N / zeta"};
  for (int c = 0; c < 3; ++c) {
    os << "  condition " << c + 1 << " (" << names[c] << "): "
       << (r.conditions_ok[c] ? "PASS" : "FAIL");
    for (std::size_t i = 0; i < r.conditions.size(); ++i)
      os << "  player " << i << " margin " << Num(r.conditions[i][c].margin);
    os << "\n";
  }
  os << "  diameter check (sqrt(iota/v_l) <= diam/2 = " << Num(0.5 * r.diameter)
     << "): " << (r.diameter_ok ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string FormatReportKeyValue(const GainBoundsReport& r) {
  std::ostringstream os;
  auto one = [&](const std::string& k, double v) { os << k << "=" << Num(v) << "\n"; };
  auto many = [&](const std::string& k, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) one(k + "." + std::to_string(i), v[i]);
  };
  one("iota1", r.iota1);
  one("iota2", r.iota2);
  one("iota3", r.iota3);
  one("iota4", r.iota4);
  many("iota5", r.iota5);
  one("iota8", r.iota8);
  many("iota9", r.iota9);
  many("iota10", r.iota10);
  one("v_l", r.v_l);
  one("iota", r.iota);
  one("radius", r.radius);
  one("Z_bar", r.z_bar);
  one("zeta", r.zeta);
  one("L_f", r.lipschitz_f);
  many("W_bar", r.w_bar);
  many("sigma_bar", r.sigma_bar);
  many("sigma_bar_prime", r.sigma_bar_prime);
  many("g_bar", r.g_bar);
  many("q_lower", r.q_lower);
  many("c_lower", r.c_lower);
  many("gamma_lower", r.gamma_lower);
  many("eps_bar", r.eps_bar);
  many("eps_bar_prime", r.eps_bar_prime);
  for (std::size_t i = 0; i < r.conditions.size(); ++i)
    for (int c = 0; c < 3; ++c)
      one("condition" + std::to_string(c + 1) + ".margin." + std::to_string(i),
          r.conditions[i][c].margin);
  for (int c = 0; c < 3; ++c)
    os << "condition" << c + 1 << ".ok=" << (r.conditions_ok[c] ? "true" : "false") << "\n";
  os << "diameter_ok=" << (r.diameter_ok ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace clnash
