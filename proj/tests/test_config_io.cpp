#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "clnash/config.hpp"
#include "clnash/run_io.hpp"
#include "json.hpp"

using namespace clnash;
using Json = nlohmann::json;

namespace {

std::string ConfigPath(const std::string& name) {
  return std::string(CLNASH_SOURCE_DIR) + "/configs/" + name;
}

Json Benchmark() {
  std::ifstream in(ConfigPath("scalar_benchmark.json"));
  return Json::parse(in);
}

std::string ErrorOf(const Json& doc) {
  try {
    ParseConfig(doc.dump());
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

RunRecord ShortRun(const ExperimentConfig& cfg, double t_final) {
  const auto oracle = OracleFor(cfg);
  SimulationConfig sc = PrepareSimulation(cfg, cfg.seed, ReferenceWeights(cfg, oracle));
  sc.t_final = t_final;
  return Simulate(*cfg.game, *cfg.basis, sc);
}

}  // namespace

TEST(ParseConfig, ShippedConfigsLoad) {
  for (const char* name : {"scalar_benchmark.json", "two_player_benchmark.json", "divergent.json",
                           "polynomial_game.json"}) {
    SCOPED_TRACE(name);
    const ExperimentConfig cfg = LoadConfig(ConfigPath(name));
    ASSERT_TRUE(cfg.game && cfg.basis);
    EXPECT_NO_THROW(cfg.simulation.gains.at(0).critic.Validate(cfg.basis->feature_count(0)));
    EXPECT_EQ(static_cast<int>(cfg.simulation.grid_points.size()), cfg.game->num_players());
  }
}

TEST(ParseConfig, ScalarBenchmarkFields) {
  const ExperimentConfig cfg = LoadConfig(ConfigPath("scalar_benchmark.json"));
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.game->num_players(), 1);
  EXPECT_TRUE(cfg.game->linear().has_value());
  EXPECT_EQ(cfg.simulation.grid_points[0].size(), 3u);
  EXPECT_DOUBLE_EQ(cfg.simulation.gains[0].critic.eta_c2, 5.0);
  EXPECT_DOUBLE_EQ(cfg.simulation.gains[0].critic.gamma_init(0, 0), 5.0);
  EXPECT_DOUBLE_EQ(cfg.simulation.dt, 1e-3);
  EXPECT_EQ(cfg.simulation.record_every, 100);
  EXPECT_FALSE(cfg.explicit_initial_weights);
  EXPECT_DOUBLE_EQ(cfg.advisor.state_radius, 0.4);
}

TEST(ParseConfig, UnknownKeyNamesItsPath) {
  Json doc = Benchmark();
  doc["gains"]["eta_c3"] = 1;
  EXPECT_EQ(ErrorOf(doc), "gains.eta_c3: unknown key");
  doc = Benchmark();
  doc["simulaton"] = Json::object();
  EXPECT_EQ(ErrorOf(doc), "config.simulaton: unknown key");
}

TEST(ParseConfig, NonPositiveStepNamesTheField) {
  for (double dt : {0.0, -1e-3}) {
    Json doc = Benchmark();
    doc["simulation"]["dt"] = dt;
    EXPECT_EQ(ErrorOf(doc), "simulation.dt: must be positive");
  }
}

TEST(ParseConfig, ShapeAndValueErrors) {
  Json doc = Benchmark();
  doc["simulation"].erase("x0");
  EXPECT_NE(ErrorOf(doc).find("simulation.x0"), std::string::npos);

  doc = Benchmark();
  doc["simulation"]["x0"] = {1, 2};
  EXPECT_NE(ErrorOf(doc).find("simulation.x0"), std::string::npos);

  doc = Benchmark();
  doc["gains"]["beta"] = -1;
  EXPECT_NE(ErrorOf(doc).find("gains"), std::string::npos);

  doc = Benchmark();
  doc["gains"]["eta_a1"] = -1;
  EXPECT_EQ(ErrorOf(doc), "gains.eta_a1: must be nonnegative");

  doc = Benchmark();
  doc["grid"] = {{"points", {{1}}}, {"scatter", {{"lower", {-1}}, {"upper", {1}}, {"count", 4}}}};
  EXPECT_NE(ErrorOf(doc).find("exactly one"), std::string::npos);

  doc = Benchmark();
  doc["basis"] = {{"type", "polynomial"}, {"degree", 1}};
  EXPECT_EQ(ErrorOf(doc), "basis.degree: must be at least 2");

  doc = Benchmark();
  doc["advisor"]["sample_count"] = 10;
  EXPECT_EQ(ErrorOf(doc), "advisor.sample_count: must be at least 1000");

  EXPECT_NE(ErrorOf(Json::array()).find("expected an object"), std::string::npos);
  EXPECT_THROW(ParseConfig("{not json"), ConfigError);
  EXPECT_THROW(LoadConfig("/nonexistent/config.json"), ConfigError);
}

TEST(ParseConfig, ZeroActorGainsParseButDoNotSimulate) {
  Json doc = Benchmark();
  doc["gains"]["eta_a1"] = 0;
  doc["gains"]["eta_a2"] = 0;
  const ExperimentConfig cfg = ParseConfig(doc.dump());
  EXPECT_THROW(ShortRun(cfg, 0.01), ConfigError);
}

TEST(ParseConfig, ExplicitInitialWeights) {
  Json doc = Benchmark();
  doc["simulation"]["initial_weights"] = {{"critic", {{0.2}}}, {"actor", {{0.3}}}};
  const ExperimentConfig cfg = ParseConfig(doc.dump());
  EXPECT_TRUE(cfg.explicit_initial_weights);
  const SimulationConfig sc = PrepareSimulation(cfg, 99, std::nullopt);
  EXPECT_DOUBLE_EQ(sc.initial.critic[0](0), 0.2);
  EXPECT_DOUBLE_EQ(sc.initial.actor[0](0), 0.3);

  doc["simulation"]["initial_weights"]["critic"] = {{0.2, 0.1}};
  EXPECT_NE(ErrorOf(doc).find("simulation.initial_weights.critic[0]"), std::string::npos);
}

TEST(ParseConfig, SeedDrivesInitialWeights) {
  const ExperimentConfig cfg = LoadConfig(ConfigPath("two_player_benchmark.json"));
  const auto a = PrepareSimulation(cfg, 5, std::nullopt);
  const auto b = PrepareSimulation(cfg, 5, std::nullopt);
  const auto c = PrepareSimulation(cfg, 6, std::nullopt);
  EXPECT_EQ(a.initial.critic[1], b.initial.critic[1]);
  EXPECT_NE(a.initial.critic[1], c.initial.critic[1]);
  EXPECT_EQ(a.initial.critic[0], a.initial.actor[0]);
}

TEST(ParseConfig, OracleOnlyForLinearGames) {
  EXPECT_TRUE(OracleFor(LoadConfig(ConfigPath("scalar_benchmark.json"))).has_value());
  const ExperimentConfig poly = LoadConfig(ConfigPath("polynomial_game.json"));
  EXPECT_FALSE(OracleFor(poly).has_value());
  EXPECT_FALSE(ReferenceWeights(poly, std::nullopt).has_value());
}

TEST(RunCsv, RoundTripMatchesRecord) {
  for (const char* name : {"scalar_benchmark.json", "two_player_benchmark.json"}) {
    SCOPED_TRACE(name);
    const ExperimentConfig cfg = LoadConfig(ConfigPath(name));
    const RunRecord rec = ShortRun(cfg, 0.5);
    std::stringstream csv;
    WriteRunCsv(csv, rec, *cfg.game, *cfg.basis);
    const CsvTable table = ReadCsv(csv);
    EXPECT_EQ(table.header, RunCsvColumns(*cfg.game, *cfg.basis));
    ASSERT_EQ(table.rows.size(), rec.size());
    for (const auto& row : table.rows) EXPECT_EQ(row.size(), table.header.size());
    // 17 digits reproduce every double exactly.
    EXPECT_EQ(table.rows.back()[0], rec.t.back());
    EXPECT_EQ(table.rows.back()[1], rec.x.back()(0));
  }
}

TEST(RunCsv, ColumnNames) {
  const ExperimentConfig cfg = LoadConfig(ConfigPath("two_player_benchmark.json"));
  const auto cols = RunCsvColumns(*cfg.game, *cfg.basis);
  // t, 2 states, per player 3 + 3 + 3 diagnostics + 1 control.
  ASSERT_EQ(cols.size(), 1u + 2u + 2u * 10u);
  EXPECT_EQ(cols[0], "t");
  EXPECT_EQ(cols[1], "x_0");
  EXPECT_EQ(cols[3], "Wc_0_0");
  EXPECT_EQ(cols[6], "Wa_0_0");
  EXPECT_EQ(cols[9], "delta_0");
  EXPECT_EQ(cols[10], "lammin_Gamma_0");
  EXPECT_EQ(cols[11], "norm_Gamma_0");
  EXPECT_EQ(cols[12], "u_0_0");
  EXPECT_EQ(cols.back(), "u_1_0");
}

TEST(RunCsv, SameSeedSameBytes) {
  const ExperimentConfig cfg = LoadConfig(ConfigPath("two_player_benchmark.json"));
  std::stringstream a, b;
  WriteRunCsv(a, ShortRun(cfg, 1.0), *cfg.game, *cfg.basis);
  WriteRunCsv(b, ShortRun(cfg, 1.0), *cfg.game, *cfg.basis);
  EXPECT_EQ(a.str(), b.str());
}

TEST(ReadCsv, RejectsMalformedInput) {
  std::stringstream ragged("a,b\n1,2\n3\n");
  EXPECT_THROW(ReadCsv(ragged), ConfigError);
  std::stringstream bad("a,b\n1,x\n");
  EXPECT_THROW(ReadCsv(bad), ConfigError);
}

TEST(Summary, ReportsSeedAndErrors) {
  const ExperimentConfig cfg = LoadConfig(ConfigPath("scalar_benchmark.json"));
  const auto oracle = OracleFor(cfg);
  const RunRecord rec = ShortRun(cfg, 0.5);
  SummaryInputs in;
  in.seed = cfg.seed;
  in.oracle_weights = ReferenceWeights(cfg, oracle);
  in.gamma_bar = {5.0};
  std::stringstream out;
  WriteSummary(out, rec, in);
  const std::string s = out.str();
  EXPECT_NE(s.find("seed"), std::string::npos);
  EXPECT_NE(s.find("7"), std::string::npos);
  EXPECT_NE(s.find("PASS"), std::string::npos);
}

TEST(OracleCsv, OneRowPerEntry) {
  const ExperimentConfig cfg = LoadConfig(ConfigPath("two_player_benchmark.json"));
  std::stringstream out;
  WriteOracleCsv(out, *OracleFor(cfg));
  const CsvTable t = ReadCsv(out);
  EXPECT_EQ(t.header, (std::vector<std::string>{"player", "row", "col", "P"}));
  EXPECT_EQ(t.rows.size(), 8u);
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17})
    EXPECT_EQ(std::stod(FormatDouble(v)), v);
}
