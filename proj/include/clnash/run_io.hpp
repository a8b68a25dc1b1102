#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "clnash/lq_oracle.hpp"
#include "clnash/simulator.hpp"

namespace clnash {

/// Column names: t, x_0..x_{n-1}, then per player i
/// Wc_i_k, Wa_i_k (k < p_i), delta_i, lammin_Gamma_i, norm_Gamma_i, u_i_k (k < m_i).
std::vector<std::string> RunCsvColumns(const GameDefinition& game, const BasisSet& basis);

/// Header row plus one row per recorded sample, 17 significant digits.
void WriteRunCsv(std::ostream& out, const RunRecord& record, const GameDefinition& game,
                 const BasisSet& basis);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Reads back a numeric CSV with a header row. Throws ConfigError on ragged
/// rows or unparsable cells.
CsvTable ReadCsv(std::istream& in);

struct SummaryInputs {
  std::uint64_t seed = 0;
  std::optional<std::vector<Vec>> oracle_weights;
  std::vector<double> gamma_bar;
};

void WriteSummary(std::ostream& out, const RunRecord& record, const SummaryInputs& inputs);

/// One row per (player, matrix entry): player,row,col,P.
void WriteOracleCsv(std::ostream& out, const RiccatiSolution& solution);

/// 17-significant-digit rendering shared by every writer.
std::string FormatDouble(double v);

}  // namespace clnash
