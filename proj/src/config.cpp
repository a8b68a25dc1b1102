#include "clnash/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace clnash {

namespace {

using Json = nlohmann::json;

[[noreturn]] void Fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

void CheckKeys(const Json& obj, const std::string& path, std::set<std::string> allowed) {
  if (!obj.is_object()) Fail(path, "expected an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) Fail(path + "." + key, "unknown key");
}

const Json& Require(const Json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) Fail(path + "." + key, "missing required key");
  return obj.at(key);
}

double Number(const Json& v, const std::string& path) {
  if (!v.is_number()) Fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) Fail(path, "must be finite");
  return d;
}

double NumberOr(const Json& obj, const std::string& path, const std::string& key, double fallback) {
  return obj.contains(key) ? Number(obj.at(key), path + "." + key) : fallback;
}

int Integer(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) Fail(path, "expected an integer");
  return v.get<int>();
}

Vec Vector(const Json& v, const std::string& path) {
  if (!v.is_array()) Fail(path, "expected an array of numbers");
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k)
    out(static_cast<Eigen::Index>(k)) = Number(v[k], path + "[" + std::to_string(k) + "]");
  return out;
}

// A matrix is a list of rows; a bare number is accepted as 1x1.
Mat Matrix(const Json& v, const std::string& path) {
  if (v.is_number()) return Mat::Constant(1, 1, Number(v, path));
  if (!v.is_array() || v.empty()) Fail(path, "expected a nonempty list of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(v.size());
  Eigen::Index cols = -1;
  Mat out;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Vec row = Vector(v[r], path + "[" + std::to_string(r) + "]");
    if (cols < 0) {
      cols = row.size();
      if (cols == 0) Fail(path, "rows must be nonempty");
      out.resize(rows, cols);
    }
    if (row.size() != cols) Fail(path, "rows have unequal lengths");
    out.row(r) = row.transpose();
  }
  return out;
}

std::vector<Mat> MatrixList(const Json& v, const std::string& path) {
  if (!v.is_array()) Fail(path, "expected a list of matrices");
  std::vector<Mat> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(Matrix(v[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<double> ScalarOrList(const Json& obj, const std::string& path, const std::string& key,
                                 int count, double fallback) {
  if (!obj.contains(key)) return std::vector<double>(count, fallback);
  const Json& v = obj.at(key);
  if (v.is_number()) return std::vector<double>(count, Number(v, path + "." + key));
  const Vec list = Vector(v, path + "." + key);
  if (list.size() != count) Fail(path + "." + key, "expected one value per player");
  return {list.data(), list.data() + list.size()};
}

// Control-weight table R[i][j]; entry (i, j) is m_j x m_j.
std::vector<std::vector<Mat>> ControlWeights(const Json& v, const std::string& path, int N) {
  if (!v.is_array() || static_cast<int>(v.size()) != N) Fail(path, "expected an N x N table of matrices");
  std::vector<std::vector<Mat>> R;
  for (int i = 0; i < N; ++i) {
    R.push_back(MatrixList(v[i], path + "[" + std::to_string(i) + "]"));
    if (static_cast<int>(R.back().size()) != N) Fail(path, "expected an N x N table of matrices");
  }
  return R;
}

std::shared_ptr<const GameDefinition> ParseGame(const Json& g) {
  const std::string path = "game";
  const Json& type = Require(g, path, "type");
  if (!type.is_string()) Fail(path + ".type", "expected a string");
  const std::string kind = type.get<std::string>();
  try {
    if (kind == "linear_quadratic") {
      CheckKeys(g, path, {"type", "A", "B", "Q", "R"});
      LinearQuadraticGame lq;
      lq.A = Matrix(Require(g, path, "A"), path + ".A");
      lq.B = MatrixList(Require(g, path, "B"), path + ".B");
      lq.Q = MatrixList(Require(g, path, "Q"), path + ".Q");
      const int N = static_cast<int>(lq.B.size());
      if (N == 0) Fail(path + ".B", "need at least one player");
      lq.R = ControlWeights(Require(g, path, "R"), path + ".R", N);
      const Eigen::Index n = lq.A.rows();
      if (lq.A.cols() != n) Fail(path + ".A", "must be square");
      for (int i = 0; i < N; ++i)
        if (lq.B[i].rows() != n) Fail(path + ".B[" + std::to_string(i) + "]", "must have n rows");
      return std::make_shared<const GameDefinition>(GameDefinition::FromLinear(lq));
    }
    if (kind == "polynomial") {
      CheckKeys(g, path, {"type", "state_dim", "drift", "input_matrices", "Q", "R"});
      const int n = Integer(Require(g, path, "state_dim"), path + ".state_dim");
      if (n < 1) Fail(path + ".state_dim", "must be positive");
      struct Term {
        double coeff;
        int output;
        std::vector<int> powers;
      };
      std::vector<Term> terms;
      const Json& drift = Require(g, path, "drift");
      if (!drift.is_array()) Fail(path + ".drift", "expected a list of terms");
      for (std::size_t k = 0; k < drift.size(); ++k) {
        const std::string tp = path + ".drift[" + std::to_string(k) + "]";
        CheckKeys(drift[k], tp, {"coeff", "output", "powers"});
        Term t;
        t.coeff = Number(Require(drift[k], tp, "coeff"), tp + ".coeff");
        t.output = Integer(Require(drift[k], tp, "output"), tp + ".output");
        if (t.output < 0 || t.output >= n) Fail(tp + ".output", "out of range");
        const Json& pw = Require(drift[k], tp, "powers");
        if (!pw.is_array() || static_cast<int>(pw.size()) != n) Fail(tp + ".powers", "expected n exponents");
        for (std::size_t a = 0; a < pw.size(); ++a) {
          const int e = Integer(pw[a], tp + ".powers");
          if (e < 0) Fail(tp + ".powers", "exponents must be nonnegative");
          t.powers.push_back(e);
        }
        terms.push_back(std::move(t));
      }
      const std::vector<Mat> B = MatrixList(Require(g, path, "input_matrices"), path + ".input_matrices");
      const int N = static_cast<int>(B.size());
      if (N == 0) Fail(path + ".input_matrices", "need at least one player");
      std::vector<int> m;
      std::vector<InputMapFn> maps;
      for (int i = 0; i < N; ++i) {
        if (B[i].rows() != n) Fail(path + ".input_matrices[" + std::to_string(i) + "]", "must have n rows");
        m.push_back(static_cast<int>(B[i].cols()));
        maps.push_back([Bi = B[i]](const Vec&) { return Bi; });
      }
      DriftFn f = [terms, n](const Vec& x) {
        Vec out = Vec::Zero(n);
        for (const Term& t : terms) {
          double v = t.coeff;
          for (int a = 0; a < n; ++a)
            for (int e = 0; e < t.powers[a]; ++e) v *= x(a);
          out(t.output) += v;
        }
        return out;
      };
      std::vector<Mat> Q = MatrixList(Require(g, path, "Q"), path + ".Q");
      auto R = ControlWeights(Require(g, path, "R"), path + ".R", N);
      return std::make_shared<const GameDefinition>(n, m, f, maps, Q, R);
    }
  } catch (const DimensionError& e) {
    Fail(path, e.what());
  }
  Fail(path + ".type", "unknown game type '" + kind + "'");
}

FeatureMap ParseBasisEntry(const Json& b, const std::string& path, int n) {
  const Json& type = Require(b, path, "type");
  if (!type.is_string()) Fail(path + ".type", "expected a string");
  const std::string kind = type.get<std::string>();
  if (kind == "quadratic") {
    CheckKeys(b, path, {"type"});
    return QuadraticBasis(n);
  }
  if (kind == "polynomial") {
    CheckKeys(b, path, {"type", "degree"});
    const int d = Integer(Require(b, path, "degree"), path + ".degree");
    if (d < 2) Fail(path + ".degree", "must be at least 2");
    return PolynomialBasis(n, d);
  }
  Fail(path + ".type", "unknown basis type '" + kind + "'");
}

std::vector<Vec> ParseGridEntry(const Json& g, const std::string& path, int n) {
  CheckKeys(g, path, {"points", "box", "scatter", "exclude_origin"});
  const int forms = int(g.contains("points")) + int(g.contains("box")) + int(g.contains("scatter"));
  if (forms != 1) Fail(path, "give exactly one of points, box, scatter");
  bool exclude = true;
  if (g.contains("exclude_origin")) {
    if (!g.at("exclude_origin").is_boolean()) Fail(path + ".exclude_origin", "expected a boolean");
    exclude = g.at("exclude_origin").get<bool>();
  }
  auto bounds = [&](const Json& obj, const std::string& p, Vec& lo, Vec& hi) {
    lo = Vector(Require(obj, p, "lower"), p + ".lower");
    hi = Vector(Require(obj, p, "upper"), p + ".upper");
    if (lo.size() != n || hi.size() != n) Fail(p, "bounds must have length n");
    if (!(lo.array() <= hi.array()).all()) Fail(p, "need lower <= upper");
  };
  std::vector<Vec> pts;
  if (g.contains("points")) {
    const Json& list = g.at("points");
    if (!list.is_array() || list.empty()) Fail(path + ".points", "expected a nonempty list of states");
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string pp = path + ".points[" + std::to_string(k) + "]";
      Vec x = list[k].is_number() ? Vec::Constant(1, Number(list[k], pp)) : Vector(list[k], pp);
      if (x.size() != n) Fail(pp, "must have length n");
      if (exclude && x.isZero(0.0)) continue;
      pts.push_back(x);
    }
  } else if (g.contains("box")) {
    const std::string p = path + ".box";
    const Json& box = g.at("box");
    CheckKeys(box, p, {"lower", "upper", "counts"});
    Vec lo, hi;
    bounds(box, p, lo, hi);
    const Vec c = Vector(Require(box, p, "counts"), p + ".counts");
    if (c.size() != n) Fail(p + ".counts", "must have length n");
    std::vector<int> counts;
    for (Eigen::Index a = 0; a < n; ++a) {
      if (c(a) < 1 || c(a) != std::floor(c(a))) Fail(p + ".counts", "must be positive integers");
      counts.push_back(static_cast<int>(c(a)));
    }
    pts = ExtrapolationGrid::Lattice(lo, hi, counts, exclude);
  } else {
    const std::string p = path + ".scatter";
    const Json& sc = g.at("scatter");
    CheckKeys(sc, p, {"lower", "upper", "count"});
    Vec lo, hi;
    bounds(sc, p, lo, hi);
    const int count = Integer(Require(sc, p, "count"), p + ".count");
    if (count < 1) Fail(p + ".count", "must be positive");
    pts = ExtrapolationGrid::Scatter(lo, hi, count, exclude);
  }
  if (pts.empty()) Fail(path, "grid has no points");
  return pts;
}

PlayerGains ParseGains(const Json& g, const std::string& path, int p) {
  CheckKeys(g, path, {"eta_c1", "eta_c2", "beta", "nu", "gamma_bar", "gamma_init", "eta_a1", "eta_a2"});
  PlayerGains out;
  CriticConfig& c = out.critic;
  c.eta_c1 = NumberOr(g, path, "eta_c1", c.eta_c1);
  c.eta_c2 = NumberOr(g, path, "eta_c2", c.eta_c2);
  c.beta = NumberOr(g, path, "beta", c.beta);
  c.nu = NumberOr(g, path, "nu", c.nu);
  c.gamma_bar = NumberOr(g, path, "gamma_bar", c.gamma_bar);
  if (!g.contains("gamma_init")) {
    c.gamma_init = Mat::Identity(p, p);
  } else if (g.at("gamma_init").is_number()) {
    c.gamma_init = Number(g.at("gamma_init"), path + ".gamma_init") * Mat::Identity(p, p);
  } else {
    c.gamma_init = Matrix(g.at("gamma_init"), path + ".gamma_init");
  }
  out.actor.eta_a1 = NumberOr(g, path, "eta_a1", out.actor.eta_a1);
  out.actor.eta_a2 = NumberOr(g, path, "eta_a2", out.actor.eta_a2);
  try {
    c.Validate(p);
  } catch (const ConfigError& e) {
    Fail(path, e.what());
  }
  // Zero actor gains are legal for gain checking; simulation rejects them.
  if (out.actor.eta_a1 < 0) Fail(path + ".eta_a1", "must be nonnegative");
  if (out.actor.eta_a2 < 0) Fail(path + ".eta_a2", "must be nonnegative");
  return out;
}

// Either one object broadcast to every player or a list with one entry each.
template <class F>
auto PerPlayer(const Json& v, const std::string& path, int N, F parse) {
  std::vector<decltype(parse(v, path, 0))> out;
  if (v.is_array()) {
    if (static_cast<int>(v.size()) != N) Fail(path, "expected one entry per player");
    for (int i = 0; i < N; ++i) out.push_back(parse(v[i], path + "[" + std::to_string(i) + "]", i));
  } else {
    for (int i = 0; i < N; ++i) out.push_back(parse(v, path, i));
  }
  return out;
}

std::vector<Vec> WeightList(const Json& v, const std::string& path, const BasisSet& basis) {
  if (!v.is_array() || static_cast<int>(v.size()) != basis.num_players())
    Fail(path, "expected one weight vector per player");
  std::vector<Vec> out;
  for (int i = 0; i < basis.num_players(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    out.push_back(Vector(v[i], p));
    if (out.back().size() != basis.feature_count(i)) Fail(p, "length must equal the feature count");
  }
  return out;
}

}  // namespace

ExperimentConfig ParseConfig(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  CheckKeys(root, "config", {"game", "basis", "grid", "gains", "simulation", "advisor", "seed"});

  ExperimentConfig cfg;
  if (root.contains("seed")) {
    const Json& s = root.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      Fail("seed", "expected a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
  }

  cfg.game = ParseGame(Require(root, "config", "game"));
  const GameDefinition& game = *cfg.game;
  const int n = game.state_dim();
  const int N = game.num_players();

  cfg.basis = std::make_shared<const BasisSet>(PerPlayer(
      Require(root, "config", "basis"), "basis", N,
      [n](const Json& b, const std::string& p, int) { return ParseBasisEntry(b, p, n); }));
  const BasisSet& basis = *cfg.basis;

  const Json& grid = Require(root, "config", "grid");
  if (grid.is_object() && grid.contains("per_player")) {
    CheckKeys(grid, "grid", {"per_player"});
    const Json& list = grid.at("per_player");
    if (!list.is_array()) Fail("grid.per_player", "expected a list");
    cfg.simulation.grid_points = PerPlayer(
        list, "grid.per_player", N,
        [n](const Json& g, const std::string& p, int) { return ParseGridEntry(g, p, n); });
  } else {
    cfg.simulation.grid_points.assign(N, ParseGridEntry(grid, "grid", n));
  }

  cfg.simulation.gains =
      PerPlayer(Require(root, "config", "gains"), "gains", N,
                [&basis](const Json& g, const std::string& p, int i) {
                  return ParseGains(g, p, basis.feature_count(i));
                });

  const Json& sim = Require(root, "config", "simulation");
  CheckKeys(sim, "simulation", {"t_final", "dt", "record_every", "x0", "initial_weights", "rank_tolerance"});
  SimulationConfig& sc = cfg.simulation;
  sc.t_final = NumberOr(sim, "simulation", "t_final", sc.t_final);
  sc.dt = NumberOr(sim, "simulation", "dt", sc.dt);
  if (!(sc.dt > 0)) Fail("simulation.dt", "must be positive");
  if (!(sc.t_final >= 0)) Fail("simulation.t_final", "must be nonnegative");
  if (sim.contains("record_every")) {
    sc.record_every = Integer(sim.at("record_every"), "simulation.record_every");
    if (sc.record_every < 1) Fail("simulation.record_every", "must be at least 1");
  }
  sc.rank_tolerance = NumberOr(sim, "simulation", "rank_tolerance", sc.rank_tolerance);
  if (!(sc.rank_tolerance >= 0)) Fail("simulation.rank_tolerance", "must be nonnegative");
  sc.x0 = Vector(Require(sim, "simulation", "x0"), "simulation.x0");
  if (sc.x0.size() != n) Fail("simulation.x0", "must have length n = " + std::to_string(n));
  if (sim.contains("initial_weights")) {
    const Json& iw = sim.at("initial_weights");
    CheckKeys(iw, "simulation.initial_weights", {"critic", "actor"});
    sc.initial.critic = WeightList(Require(iw, "simulation.initial_weights", "critic"),
                                   "simulation.initial_weights.critic", basis);
    sc.initial.actor = WeightList(Require(iw, "simulation.initial_weights", "actor"),
                                  "simulation.initial_weights.actor", basis);
    for (const PlayerGains& g : sc.gains) sc.initial.gamma.push_back(g.critic.gamma_init);
    cfg.explicit_initial_weights = true;
  }

  AdvisorSettings& adv = cfg.advisor;
  adv.eps_bar.assign(N, 0.0);
  adv.eps_bar_prime.assign(N, 0.0);
  if (root.contains("advisor")) {
    const Json& a = root.at("advisor");
    const std::string p = "advisor";
    CheckKeys(a, p, {"zeta", "sample_count", "state_radius", "weight_radius", "eps_bar",
                     "eps_bar_prime", "kappa_v", "gamma_lower", "reference_weights", "z_init"});
    adv.zeta = NumberOr(a, p, "zeta", adv.zeta);
    if (!(adv.zeta > 0)) Fail(p + ".zeta", "must be positive");
    if (a.contains("sample_count")) adv.sample_count = Integer(a.at("sample_count"), p + ".sample_count");
    if (adv.sample_count < 1000) Fail(p + ".sample_count", "must be at least 1000");
    adv.state_radius = NumberOr(a, p, "state_radius", adv.state_radius);
    adv.weight_radius = NumberOr(a, p, "weight_radius", adv.weight_radius);
    if (!(adv.state_radius > 0)) Fail(p + ".state_radius", "must be positive");
    if (!(adv.weight_radius > 0)) Fail(p + ".weight_radius", "must be positive");
    adv.eps_bar = ScalarOrList(a, p, "eps_bar", N, 0.0);
    adv.eps_bar_prime = ScalarOrList(a, p, "eps_bar_prime", N, 0.0);
    for (int i = 0; i < N; ++i)
      if (adv.eps_bar[i] < 0 || adv.eps_bar_prime[i] < 0) Fail(p, "epsilon bounds must be nonnegative");
    if (a.contains("kappa_v")) {
      adv.kappa_v = Number(a.at("kappa_v"), p + ".kappa_v");
      if (!(*adv.kappa_v > 0)) Fail(p + ".kappa_v", "must be positive");
    }
    if (a.contains("gamma_lower")) {
      adv.gamma_lower = ScalarOrList(a, p, "gamma_lower", N, 0.0);
      for (double g : adv.gamma_lower)
        if (!(g > 0)) Fail(p + ".gamma_lower", "must be positive");
    }
    if (a.contains("reference_weights"))
      adv.reference_weights = WeightList(a.at("reference_weights"), p + ".reference_weights", basis);
    if (a.contains("z_init")) {
      adv.z_init = Number(a.at("z_init"), p + ".z_init");
      if (!(*adv.z_init > 0)) Fail(p + ".z_init", "must be positive");
    }
  }
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str());
}

std::optional<RiccatiSolution> OracleFor(const ExperimentConfig& cfg) {
  if (!cfg.game->linear()) return std::nullopt;
  return SolveCoupledRiccati(*cfg.game->linear());
}

std::optional<std::vector<Vec>> ReferenceWeights(const ExperimentConfig& cfg,
                                                 const std::optional<RiccatiSolution>& oracle) {
  if (cfg.advisor.reference_weights) return cfg.advisor.reference_weights;
  if (oracle && cfg.basis->all_quadratic()) return OracleWeights(*oracle, *cfg.basis);
  return std::nullopt;
}

SimulationConfig PrepareSimulation(const ExperimentConfig& cfg, std::uint64_t seed,
                                   const std::optional<std::vector<Vec>>& reference) {
  SimulationConfig sc = cfg.simulation;
  if (!cfg.explicit_initial_weights) sc.initial = SeededInitialState(*cfg.basis, sc.gains, seed);
  sc.reference_weights = reference;
  return sc;
}

AdvisorInputs PrepareAdvisor(const ExperimentConfig& cfg, std::vector<Vec> reference,
                             const std::optional<RiccatiSolution>& oracle) {
  AdvisorInputs in;
  in.reference_weights = std::move(reference);
  in.grid_points = cfg.simulation.grid_points;
  in.gamma_lower = cfg.advisor.gamma_lower;
  in.zeta = cfg.advisor.zeta;
  if (cfg.advisor.kappa_v) {
    in.kappa_v = *cfg.advisor.kappa_v;
  } else if (oracle) {
    Mat sum = Mat::Zero(cfg.game->state_dim(), cfg.game->state_dim());
    for (const Mat& P : oracle->P) sum += P;
    in.kappa_v = std::max(MaxEigenvalue(sum), 1e-12);
  }
  return in;
}

CompactSet AdvisorSet(const ExperimentConfig& cfg) {
  int total = 0;
  for (int i = 0; i < cfg.basis->num_players(); ++i) total += cfg.basis->feature_count(i);
  return CompactSet::FromRadii(cfg.game->state_dim(), total, cfg.advisor.state_radius,
                               cfg.advisor.weight_radius, cfg.advisor.sample_count);
}

}  // namespace clnash
