#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppf/dispersion.hpp"
#include "ppf/pde.hpp"

namespace ppf::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

const char* version();

/// Keys mirror SimConfig; unknown keys are rejected. Throws InvalidConfig
/// naming the key.
SimConfig config_from_json(const json& j);
json config_to_json(const SimConfig& config);

/// Throws MissingInput when the file is absent, InvalidConfig when it does not
/// parse or fails validation.
SimConfig load_config(const fs::path& path);

/// FNV-1a (64 bit) of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const SimConfig& config);

json to_json(const FrontPrediction& p);

/// Shortest round-trip decimal form.
std::string format_double(double v);

struct SnapshotFiles {
  fs::path csv;
  fs::path sidecar;
};

/// snapshot_<index>.csv (x,u per node) and snapshot_<index>.json
/// {t, step_count, mass, first_moment, config_hash, L, n}.
SnapshotFiles write_snapshot(const fs::path& dir, int index, const FieldState& state, const std::string& hash);

/// All snapshot_*.csv/.json pairs in `dir`, ordered by index. Throws
/// MissingInput when there are none.
std::vector<FieldState> read_snapshots(const fs::path& dir);

void write_diagnostics(const fs::path& path, const DiagnosticsTrace& d);
DiagnosticsTrace read_diagnostics(const fs::path& path);

struct RunManifest {
  std::string config_hash;
  std::string tool_version;
  std::string command;
  std::vector<std::string> outputs;  // relative to the manifest's directory
  double wall_time = 0.0;
  std::string status = "ok";  // "ok" or "diverged"
  std::string message;

  json to_json() const;
  static RunManifest from_json(const json& j);
};

void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

}  // namespace ppf::io
