#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clnash/gain_advisor.hpp"
#include "clnash/lq_oracle.hpp"
#include "clnash/simulator.hpp"

namespace clnash {

/// The `advisor` section. Radii describe the box
/// [-state_radius, state_radius]^n x [-weight_radius, weight_radius]^(2 sum p).
struct AdvisorSettings {
  double zeta = 1.0;
  int sample_count = 1000;
  double state_radius = 1.0;
  double weight_radius = 1.0;
  std::vector<double> eps_bar;
  std::vector<double> eps_bar_prime;
  std::optional<double> kappa_v;  // LQ games default to lambda_max(sum_i P_i)
  std::vector<double> gamma_lower;
  std::optional<std::vector<Vec>> reference_weights;
  std::optional<double> z_init;  // also run the compact-set selection
};

/// A fully parsed experiment. `simulation.initial` is empty unless the document
/// gives initial weights; the CLI then seeds them.
struct ExperimentConfig {
  std::shared_ptr<const GameDefinition> game;
  std::shared_ptr<const BasisSet> basis;
  SimulationConfig simulation;
  bool explicit_initial_weights = false;
  AdvisorSettings advisor;
  std::uint64_t seed = 1;
};

/// Strict parse: unknown keys, missing required keys and wrong shapes all raise
/// ConfigError with the dotted path of the offending field.
ExperimentConfig ParseConfig(const std::string& text);
ExperimentConfig LoadConfig(const std::string& path);

/// Coupled-Riccati solution for linear-quadratic games, nullopt otherwise.
std::optional<RiccatiSolution> OracleFor(const ExperimentConfig& cfg);

/// Ideal weights: the advisor section's reference_weights if given, else the
/// oracle weights when the game is linear-quadratic with quadratic bases.
std::optional<std::vector<Vec>> ReferenceWeights(const ExperimentConfig& cfg,
                                                 const std::optional<RiccatiSolution>& oracle);

/// The simulation section, with weights seeded from `seed` unless the document
/// fixed them, and reference weights attached for the Z diagnostics.
SimulationConfig PrepareSimulation(const ExperimentConfig& cfg, std::uint64_t seed,
                                   const std::optional<std::vector<Vec>>& reference);

/// Advisor inputs and the box from the advisor radii. kappa_v falls back to
/// lambda_max(sum_i P_i) for LQ games and 1 otherwise.
AdvisorInputs PrepareAdvisor(const ExperimentConfig& cfg, std::vector<Vec> reference,
                             const std::optional<RiccatiSolution>& oracle);
CompactSet AdvisorSet(const ExperimentConfig& cfg);

}  // namespace clnash
