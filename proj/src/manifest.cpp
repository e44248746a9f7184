#include "bragg/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <nlohmann/json.hpp>

#include "bragg/hash.hpp"

namespace bragg {

std::string RunManifest::hash() const {
  return fnv1a_hex(tool + '\n' + version + '\n' + command + '\n' + config);
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = tool;
  j["version"] = version;
  j["command"] = command;
  j["hash"] = hash();
  j["backend"] = backend;
  j["scheme"] = scheme;
  j["tolerance"] = tolerance;
  j["seed"] = seed;
  j["jobs"] = jobs;
  j["timestamp"] = timestamp;
  j["wall_time_s"] = wall_time;
  j["config"] = config;
  j["failures"] = failures;
  auto& checks = j["spot_checks"] = nlohmann::ordered_json::array();
  for (const auto& c : spot_checks)
    checks.push_back({{"tau_s", c.tau},
                      {"rabi_rad_s", c.rabi},
                      {"max_deviation", c.max_deviation},
                      {"passed", c.passed}});
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace bragg
