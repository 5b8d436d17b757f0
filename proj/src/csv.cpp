#include "bnpnc/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bnpnc/errors.hpp"

namespace bnpnc {

namespace {

std::string trimmed(const std::string& s) {
  size_t begin = 0;
  size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
    --end;
  }
  return s.substr(begin, end - begin);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    cells.push_back(trimmed(cell));
  }
  if (!line.empty() && line.back() == ',') {
    cells.emplace_back();
  }
  return cells;
}

bool is_missing(const std::string& cell) {
  if (cell.empty()) {
    return true;
  }
  std::string lower(cell);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower == "na";
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token, const std::string& where) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ParseError("cannot parse '" + token + "' as a number at " + where);
  }
  return value;
}

Eigen::Index CsvTable::column(const std::string& name) const {
  for (size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) {
      return static_cast<Eigen::Index>(j);
    }
  }
  throw ConfigError("required column '" + name + "' is missing from the CSV header");
}

CsvTable read_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path + "' for reading");
  }
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("'" + path + "' is empty: a header row is required");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  table.header = split_line(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    auto cells = split_line(line);
    if (cells.size() != table.header.size()) {
      throw ParseError("row " + std::to_string(table.rows.size() + 1) + " of '" + path + "' has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

LoadResult load_csv(const std::string& path, const ColumnMap& columns) {
  const CsvTable table = read_csv_table(path);

  std::vector<std::pair<std::string, Eigen::Index>> mapped;
  mapped.emplace_back(columns.y, table.column(columns.y));
  mapped.emplace_back(columns.x, table.column(columns.x));
  mapped.emplace_back(columns.z, table.column(columns.z));
  mapped.emplace_back(columns.w, table.column(columns.w));
  const bool with_u = !columns.u.empty();
  if (with_u) {
    mapped.emplace_back(columns.u, table.column(columns.u));
  }
  for (const auto& name : columns.covariates) {
    mapped.emplace_back(name, table.column(name));
  }

  LoadResult result;
  std::vector<std::vector<double>> kept(mapped.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    bool missing = false;
    for (const auto& [name, idx] : mapped) {
      if (is_missing(row[static_cast<size_t>(idx)])) {
        missing = true;
        break;
      }
    }
    if (missing) {
      result.dropped_rows.push_back(static_cast<Eigen::Index>(r + 1));
      continue;
    }
    for (size_t m = 0; m < mapped.size(); ++m) {
      const auto& [name, idx] = mapped[m];
      const std::string where = "row " + std::to_string(r + 1) + ", column '" + name + "'";
      const double value = parse_double(row[static_cast<size_t>(idx)], where);
      if (!std::isfinite(value)) {
        throw ValidationError("non-finite value at " + where);
      }
      kept[m].push_back(value);
    }
  }

  const auto n = static_cast<Eigen::Index>(kept[0].size());
  auto to_vec = [n](const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), n).eval();
  };
  Dataset& d = result.data;
  d.y = to_vec(kept[0]);
  d.x = to_vec(kept[1]);
  d.z = to_vec(kept[2]);
  d.w = to_vec(kept[3]);
  size_t next = 4;
  if (with_u) {
    d.u_hidden = to_vec(kept[next++]);
  }
  d.covariates.resize(n, static_cast<Eigen::Index>(columns.covariates.size()));
  d.covariate_names = columns.covariates;
  for (size_t j = 0; j < columns.covariates.size(); ++j) {
    d.covariates.col(static_cast<Eigen::Index>(j)) = to_vec(kept[next++]);
  }
  validate(d);
  return result;
}

void save_csv(const std::string& path, const Dataset& data, bool include_u) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  const bool with_u = include_u && data.has_u();
  out << "y,x,z,w";
  if (with_u) {
    out << ",u";
  }
  for (const auto& name : data.covariate_names) {
    out << ',' << name;
  }
  out << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << format_double(data.y[i]) << ',' << format_double(data.x[i]) << ','
        << format_double(data.z[i]) << ',' << format_double(data.w[i]);
    if (with_u) {
      out << ',' << format_double(data.u_hidden[i]);
    }
    for (Eigen::Index j = 0; j < data.n_covariates(); ++j) {
      out << ',' << format_double(data.covariates(i, j));
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write to '" + path + "' failed");
  }
}

}  // namespace bnpnc
