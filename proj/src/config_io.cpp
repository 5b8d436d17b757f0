#include "bnpnc/config_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "bnpnc/csv.hpp"
#include "bnpnc/errors.hpp"

namespace bnpnc {
namespace config_io {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

std::string join_levels(const std::vector<double>& levels) {
  std::string out;
  for (size_t i = 0; i < levels.size(); ++i) {
    if (i > 0) {
      out += ',';
    }
    out += format_double(levels[i]);
  }
  return out;
}

int parse_int(const std::string& value, const std::string& key) {
  int out = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': cannot parse integer '" + value + "'");
  }
  return out;
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': cannot parse unsigned integer '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("config key '" + key + "': cannot parse boolean '" + value + "'");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> config_entries(const ModelConfig& c) {
  return {
      {"truncation", std::to_string(c.truncation)},
      {"n_knots", std::to_string(c.n_knots)},
      {"iterations", std::to_string(c.iterations)},
      {"burn_in", std::to_string(c.burn_in)},
      {"thinning", std::to_string(c.thinning)},
      {"seed", std::to_string(c.seed)},
      {"standardize", c.standardize ? "true" : "false"},
      {"identification_tol", format_double(c.identification_tol)},
      {"max_failure_rate", format_double(c.max_failure_rate)},
      {"band_levels", join_levels(c.band_levels)},
      {"grid_points", std::to_string(c.grid.points)},
      {"grid_lower_pct", format_double(c.grid.lower_pct)},
      {"grid_upper_pct", format_double(c.grid.upper_pct)},
      {"v0_scale_y", format_double(c.priors.v0_scale_y)},
      {"a0_y", format_double(c.priors.a0_y)},
      {"b0_y", format_double(c.priors.b0_y)},
      {"v0_scale_w", format_double(c.priors.v0_scale_w)},
      {"a0_w", format_double(c.priors.a0_w)},
      {"b0_w", format_double(c.priors.b0_w)},
      {"mu_eta", format_double(c.priors.mu_eta)},
  };
}

std::string config_ini(const ModelConfig& config) {
  std::ostringstream out;
  for (const auto& [key, value] : config_entries(config)) {
    out << key << " = " << value << '\n';
  }
  return out.str();
}

void apply_config_entry(ModelConfig& c, const std::string& key, const std::string& value) {
  if (key == "truncation") {
    c.truncation = parse_int(value, key);
  } else if (key == "n_knots") {
    c.n_knots = parse_int(value, key);
  } else if (key == "iterations") {
    c.iterations = parse_int(value, key);
  } else if (key == "burn_in") {
    c.burn_in = parse_int(value, key);
  } else if (key == "thinning") {
    c.thinning = parse_int(value, key);
  } else if (key == "seed") {
    c.seed = parse_u64(value, key);
  } else if (key == "standardize") {
    c.standardize = parse_bool(value, key);
  } else if (key == "identification_tol") {
    c.identification_tol = parse_double(value, "config key " + key);
  } else if (key == "max_failure_rate") {
    c.max_failure_rate = parse_double(value, "config key " + key);
  } else if (key == "band_levels") {
    std::vector<double> levels;
    std::stringstream ss(value);
    std::string token;
    while (std::getline(ss, token, ',')) {
      levels.push_back(parse_double(trim(token), "config key " + key));
    }
    if (levels.empty()) {
      throw ConfigError("config key 'band_levels': at least one level required");
    }
    c.band_levels = levels;
  } else if (key == "grid_points") {
    c.grid.points = parse_int(value, key);
  } else if (key == "grid_lower_pct") {
    c.grid.lower_pct = parse_double(value, "config key " + key);
  } else if (key == "grid_upper_pct") {
    c.grid.upper_pct = parse_double(value, "config key " + key);
  } else if (key == "v0_scale_y") {
    c.priors.v0_scale_y = parse_double(value, "config key " + key);
  } else if (key == "a0_y") {
    c.priors.a0_y = parse_double(value, "config key " + key);
  } else if (key == "b0_y") {
    c.priors.b0_y = parse_double(value, "config key " + key);
  } else if (key == "v0_scale_w") {
    c.priors.v0_scale_w = parse_double(value, "config key " + key);
  } else if (key == "a0_w") {
    c.priors.a0_w = parse_double(value, "config key " + key);
  } else if (key == "b0_w") {
    c.priors.b0_w = parse_double(value, "config key " + key);
  } else if (key == "mu_eta") {
    c.priors.mu_eta = parse_double(value, "config key " + key);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ModelConfig load_config_file(const std::string& path, ModelConfig base) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file '" + path + "'");
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') {
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config file '" + path + "' line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    apply_config_entry(base, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  return base;
}

}  // namespace config_io
}  // namespace bnpnc
