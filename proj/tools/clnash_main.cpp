// clnash: simulate, check-gains, oracle, version.
//
// Exit codes: 0 ok, 1 config or usage error, 2 numerical abort,
// 3 gain conditions unsatisfied.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "clnash/config.hpp"
#include "clnash/run_io.hpp"

namespace {

constexpr const char* kVersion = "clnash 1.0.0";

enum Exit { kOk = 0, kConfig = 1, kNumeric = 2, kConditions = 3 };

struct Manifest {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
};

std::ofstream OpenOutput(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw clnash::ConfigError("cannot write '" + path + "'");
  return f;
}

int Simulate(const Manifest& m) {
  using namespace clnash;
  const ExperimentConfig cfg = LoadConfig(m.config);
  const std::uint64_t seed = m.seed.value_or(cfg.seed);
  std::optional<RiccatiSolution> oracle;
  try {
    oracle = OracleFor(cfg);
  } catch (const NoConvergenceError&) {
    // The run itself does not need the oracle.
  }
  const auto reference = ReferenceWeights(cfg, oracle);
  const SimulationConfig sc = PrepareSimulation(cfg, seed, reference);
  const RunRecord rec = Simulate(*cfg.game, *cfg.basis, sc);

  auto csv = OpenOutput(m.out, "run.csv");
  WriteRunCsv(csv, rec, *cfg.game, *cfg.basis);
  SummaryInputs si;
  si.seed = seed;
  si.oracle_weights = reference;
  for (const PlayerGains& g : sc.gains) si.gamma_bar.push_back(g.critic.gamma_bar);
  auto summary = OpenOutput(m.out, "summary.txt");
  WriteSummary(summary, rec, si);

  if (rec.aborted()) {
    std::cerr << "error: integration aborted at t = " << FormatDouble(rec.abort_time) << " ("
              << rec.abort_component << ")\n";
    return kNumeric;
  }
  std::cout << "completed " << rec.size() << " samples to t = " << FormatDouble(rec.t.back())
            << "; wrote run.csv and summary.txt to " << m.out << "\n";
  return kOk;
}

int CheckGains(const Manifest& m, bool write_report) {
  using namespace clnash;
  const ExperimentConfig cfg = LoadConfig(m.config);
  std::optional<RiccatiSolution> oracle;
  try {
    oracle = OracleFor(cfg);
  } catch (const NoConvergenceError& e) {
    if (!cfg.advisor.reference_weights)
      throw ConfigError(std::string("no reference weights: ") + e.what());
  }
  auto reference = ReferenceWeights(cfg, oracle);
  if (!reference)
    throw ConfigError("advisor.reference_weights is required unless the game is linear-quadratic "
                      "with quadratic bases");
  const AdvisorInputs inputs = PrepareAdvisor(cfg, *reference, oracle);
  const EpsilonBounds eps{cfg.advisor.eps_bar, cfg.advisor.eps_bar_prime};
  const auto& gains = cfg.simulation.gains;

  const GainBoundsReport report =
      EstimateConstants(*cfg.game, *cfg.basis, gains, AdvisorSet(cfg), inputs, eps);
  std::cout << FormatReportText(report);

  if (cfg.advisor.z_init) {
    const GainSelectionResult sel =
        SelectCompactSet(*cfg.advisor.z_init, *cfg.game, *cfg.basis, gains, inputs,
                         [&eps](int) { return eps; }, cfg.advisor.sample_count);
    std::cout << "compact set selection: " << sel.iterations << " iteration(s), radius "
              << FormatDouble(sel.set.Diameter() / 2);
    for (double r : sel.radii) std::cout << ", sqrt(iota/v_l) = " << FormatDouble(r);
    if (sel.needs_richer_basis) std::cout << "; basis must be enriched";
    std::cout << "\n";
  }
  if (write_report) {
    auto kv = OpenOutput(m.out, "gain_report.txt");
    kv << FormatReportKeyValue(report);
  }
  return report.all_conditions_ok() ? kOk : kConditions;
}

int Oracle(const Manifest& m) {
  using namespace clnash;
  const ExperimentConfig cfg = LoadConfig(m.config);
  if (!cfg.game->linear())
    throw ConfigError("the oracle needs a linear_quadratic game; this config defines a nonlinear one");
  RiccatiSolution sol;
  try {
    sol = SolveCoupledRiccati(*cfg.game->linear());
  } catch (const NoConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (last change " << FormatDouble(e.last_change())
              << " after " << e.iterations() << " sweeps)\n";
    return kNumeric;
  }
  const int n = cfg.game->state_dim();
  std::cout << "converged in " << sol.iterations << " sweeps\n";
  for (std::size_t i = 0; i < sol.P.size(); ++i) {
    std::cout << "P_" << i << " =\n";
    for (int r = 0; r < n; ++r) {
      std::cout << " ";
      for (int c = 0; c < n; ++c) std::cout << " " << FormatDouble(sol.P[i](r, c));
      std::cout << "\n";
    }
    std::cout << "weights_" << i << " = " << FormatVector(QuadraticWeightsFromMatrix(sol.P[i]))
              << "\n";
    std::cout << "residual_" << i << " = " << FormatDouble(sol.residuals[i]) << "\n";
  }
  std::cout << "closed-loop eigenvalues:";
  for (Eigen::Index k = 0; k < sol.closed_loop_eigenvalues.size(); ++k)
    std::cout << " " << FormatDouble(sol.closed_loop_eigenvalues(k).real()) << "+"
              << FormatDouble(sol.closed_loop_eigenvalues(k).imag()) << "i";
  std::cout << "\nhurwitz: " << (sol.hurwitz ? "yes" : "no") << "\n";
  auto csv = OpenOutput(m.out, "oracle.csv");
  WriteOracleCsv(csv, sol);
  return kOk;
}

int Guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const clnash::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const clnash::DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const clnash::NonFiniteError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concurrent-learning feedback-Nash learner for N-player differential games"};
  app.require_subcommand(1);
  Manifest m;
  bool report_file = false;

  auto add_common = [&m](CLI::App* sub) {
    sub->add_option("--config", m.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", m.out, "output directory");
    sub->add_option("--seed", m.seed, "64-bit seed; overrides the config");
  };
  CLI::App* sim = app.add_subcommand("simulate", "run the learner, write run.csv and summary.txt");
  add_common(sim);
  CLI::App* gains = app.add_subcommand("check-gains", "estimate the bound constants and check the gain conditions");
  add_common(gains);
  gains->add_flag("--report", report_file, "also write gain_report.txt to --out");
  CLI::App* oracle = app.add_subcommand("oracle", "solve the coupled Riccati equations");
  add_common(oracle);
  app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (*sim) return Guarded([&] { return Simulate(m); });
  if (*gains) return Guarded([&] { return CheckGains(m, report_file); });
  if (*oracle) return Guarded([&] { return Oracle(m); });
  std::cout << kVersion << "\n";
  return kOk;
}
