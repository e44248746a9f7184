#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bragg {

inline constexpr const char* version = "0.1.0";

struct SpotCheck {
  double tau = 0.0;   // s
  double rabi = 0.0;  // rad/s
  double max_deviation = 0.0;
  bool passed = false;
};

/// Provenance record written next to every result table. Only the
/// reproducible part (tool, version, command, configuration) enters the
/// hash, so timestamps, wall time and worker count do not change it.
struct RunManifest {
  std::string tool = "bragg";
  std::string command;
  std::string config;  // canonical configuration text
  std::string backend;
  std::string scheme;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string timestamp;
  double wall_time = 0.0;  // s
  std::vector<std::string> failures;
  std::vector<SpotCheck> spot_checks;
  std::vector<std::string> outputs;

  std::string hash() const;
  std::string to_json() const;
  void write(const std::filesystem::path& path) const;
};

std::string utc_timestamp();

}  // namespace bragg
