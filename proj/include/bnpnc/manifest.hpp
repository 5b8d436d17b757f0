#pragma once

#include <map>
#include <string>
#include <vector>

#include "bnpnc/dataset.hpp"

namespace bnpnc {
namespace manifest {

// FNV-1a 64-bit fingerprint of a file's bytes, hex encoded.
std::string file_hash(const std::string& path);

std::string utc_now_iso8601();

// Provenance record written once per output directory; re-running the echoed
// command with the echoed seed reproduces the outputs byte for byte
// (single-chain runs).
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string version;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config_echo;
  std::map<std::string, std::string> input_hashes;
  std::vector<std::string> outputs;
  std::string started_utc;
  std::string finished_utc;
};

void write_manifest(const std::string& path, const RunManifest& manifest);

}  // namespace manifest
}  // namespace bnpnc
