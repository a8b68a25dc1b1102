#include "clnash/run_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace clnash {

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> RunCsvColumns(const GameDefinition& game, const BasisSet& basis) {
  std::vector<std::string> cols{"t"};
  for (int a = 0; a < game.state_dim(); ++a) cols.push_back("x_" + std::to_string(a));
  for (int i = 0; i < game.num_players(); ++i) {
    const std::string si = std::to_string(i);
    for (int k = 0; k < basis.feature_count(i); ++k) cols.push_back("Wc_" + si + "_" + std::to_string(k));
    for (int k = 0; k < basis.feature_count(i); ++k) cols.push_back("Wa_" + si + "_" + std::to_string(k));
    cols.push_back("delta_" + si);
    cols.push_back("lammin_Gamma_" + si);
    cols.push_back("norm_Gamma_" + si);
    for (int k = 0; k < game.control_dim(i); ++k) cols.push_back("u_" + si + "_" + std::to_string(k));
  }
  return cols;
}

void WriteRunCsv(std::ostream& out, const RunRecord& record, const GameDefinition& game,
                 const BasisSet& basis) {
  const auto cols = RunCsvColumns(game, basis);
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << "\n";
  std::string line;
  for (std::size_t s = 0; s < record.size(); ++s) {
    line = FormatDouble(record.t[s]);
    auto put = [&line](double v) {
      line += ',';
      line += FormatDouble(v);
    };
    for (Eigen::Index a = 0; a < record.x[s].size(); ++a) put(record.x[s](a));
    for (const PlayerTrace& tr : record.players) {
      for (Eigen::Index k = 0; k < tr.critic[s].size(); ++k) put(tr.critic[s](k));
      for (Eigen::Index k = 0; k < tr.actor[s].size(); ++k) put(tr.actor[s](k));
      put(tr.delta[s]);
      put(tr.gamma_min_eig[s]);
      put(tr.gamma_norm[s]);
      for (Eigen::Index k = 0; k < tr.control[s].size(); ++k) put(tr.control[s](k));
    }
    out << line << "\n";
  }
}

CsvTable ReadCsv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("csv: missing header row");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw ConfigError("csv line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != table.header.size())
      throw ConfigError("csv line " + std::to_string(lineno) + ": expected " +
                        std::to_string(table.header.size()) + " cells");
    table.rows.push_back(std::move(row));
  }
  return table;
}

void WriteSummary(std::ostream& out, const RunRecord& record, const SummaryInputs& in) {
  out << "seed: " << in.seed << "\n";
  out << "samples: " << record.size() << "\n";
  out << "final_time: " << (record.size() ? FormatDouble(record.t.back()) : "none") << "\n";
  switch (record.abort) {
    case AbortKind::kNone:
      out << "status: completed\n";
      break;
    case AbortKind::kNonFinite:
      out << "status: aborted (non-finite " << record.abort_component << ") at t = "
          << FormatDouble(record.abort_time) << "\n";
      break;
    case AbortKind::kGammaCollapse:
      out << "status: aborted (Gamma collapse, " << record.abort_component << ") at t = "
          << FormatDouble(record.abort_time) << "\n";
      break;
  }
  for (std::size_t i = 0; i < record.players.size(); ++i) {
    const std::string p = "player " + std::to_string(i) + ": ";
    out << p << "final Wc = " << FormatVector(record.final_state.critic[i]) << "\n";
    out << p << "final Wa = " << FormatVector(record.final_state.actor[i]) << "\n";
    if (in.oracle_weights) {
      const Vec& W = (*in.oracle_weights)[i];
      out << p << "oracle W = " << FormatVector(W) << "\n";
      out << p << "critic error = " << FormatDouble((W - record.final_state.critic[i]).norm()) << "\n";
      out << p << "actor error = " << FormatDouble((W - record.final_state.actor[i]).norm()) << "\n";
    }
    out << p << "observed c_lower = " << FormatDouble(record.observed_c_lower[i]) << "\n";
    out << p << "rank condition held throughout: "
        << (record.rank_satisfied_throughout[i] ? "yes" : "no") << "\n";
    out << p << "Gamma corridor [" << FormatDouble(record.gamma_lower[i]) << ", "
        << FormatDouble(record.gamma_upper[i]) << "]";
    if (i < in.gamma_bar.size()) out << " with bound " << FormatDouble(in.gamma_bar[i]);
    out << ": " << (record.corridor_violations[i] == 0 ? "PASS" : "FAIL") << " ("
        << record.corridor_violations[i] << " violations)\n";
    out << p << "normalized regressor bound: "
        << (record.regressor_bound_violations[i] == 0 ? "PASS" : "FAIL") << " ("
        << record.regressor_bound_violations[i] << " violations)\n";
  }
  if (record.max_z_norm) out << "max ||Z||: " << FormatDouble(*record.max_z_norm) << "\n";
  if (record.ultimate_z_norm)
    out << "max ||Z|| over last 10%: " << FormatDouble(*record.ultimate_z_norm) << "\n";
}

void WriteOracleCsv(std::ostream& out, const RiccatiSolution& solution) {
  out << "player,row,col,P\n";
  for (std::size_t i = 0; i < solution.P.size(); ++i)
    for (Eigen::Index r = 0; r < solution.P[i].rows(); ++r)
      for (Eigen::Index c = 0; c < solution.P[i].cols(); ++c)
        out << i << "," << r << "," << c << "," << FormatDouble(solution.P[i](r, c)) << "\n";
}

}  // namespace clnash
