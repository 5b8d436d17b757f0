#pragma once

#include <string>
#include <vector>

#include "bnpnc/dataset.hpp"

namespace bnpnc {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);
// Strict numeric parse; throws ParseError on anything but a full numeric token.
double parse_double(const std::string& token, const std::string& where);

// Maps dataset roles to CSV header names. Empty u/covariates means absent.
struct ColumnMap {
  std::string y = "y";
  std::string x = "x";
  std::string z = "z";
  std::string w = "w";
  std::string u;                        // optional
  std::vector<std::string> covariates;  // optional
};

struct LoadResult {
  Dataset data;
  std::vector<Eigen::Index> dropped_rows;  // 1-based data-row indices with missing values
};

// Reads a header CSV, keeps the mapped columns, drops (and reports) rows with
// missing mapped cells, validates the result. Missing = empty cell or "NA".
LoadResult load_csv(const std::string& path, const ColumnMap& columns);

// Writes y,x,z,w[,u][,covariates...] with round-trip formatting.
void save_csv(const std::string& path, const Dataset& data, bool include_u = true);

// Low-level table helpers shared by the other writers/readers.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  Eigen::Index column(const std::string& name) const;  // throws ConfigError when absent
};
CsvTable read_csv_table(const std::string& path);

}  // namespace bnpnc
