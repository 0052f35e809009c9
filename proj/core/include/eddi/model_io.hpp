#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eddi/model.hpp"

namespace eddi {

struct ModelProvenance {
  std::string method;         // "eddi" or "sindy"
  std::string input_digest;   // "fnv1a64:<16 hex digits>" of the input bytes
  std::string config_json;    // canonical JSON text of the effective config
  std::vector<std::pair<std::string, double>> residuals;  // named residual_rms values
  std::optional<std::string> timestamp;  // absent unless explicitly requested
};

struct ModelRecord {
  int schema_version = 1;
  IdentifiedSystem system;
  ModelProvenance provenance;
};

// Canonical JSON text: fixed key order, shortest-round-trip numbers, trailing
// newline. parse -> render is byte-identical, so files can be diffed and
// digested reliably.
std::string render_model(const ModelRecord& rec);
ModelRecord parse_model(std::string_view text);

void write_model(const std::filesystem::path& path, const ModelRecord& rec);
ModelRecord read_model(const std::filesystem::path& path);

// FNV-1a 64-bit digest, rendered as "fnv1a64:" + 16 lowercase hex digits.
std::string fnv1a64_digest(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

}  // namespace eddi
