#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bnpnc/dataset.hpp"

namespace bnpnc {
namespace config_io {

// Flat key=value view of a ModelConfig, used by the INI file format, the
// metadata echo, and the manifest.
std::vector<std::pair<std::string, std::string>> config_entries(const ModelConfig& config);

std::string config_ini(const ModelConfig& config);

// Applies one key=value pair; throws ConfigError on unknown keys or
// unparseable values.
void apply_config_entry(ModelConfig& config, const std::string& key, const std::string& value);

// Parses an INI-style file (key = value lines, # or ; comments) on top of
// `base`.
ModelConfig load_config_file(const std::string& path, ModelConfig base = ModelConfig{});

}  // namespace config_io
}  // namespace bnpnc
