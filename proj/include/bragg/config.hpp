#pragma once

#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "bragg/ensemble.hpp"
#include "bragg/interferometer.hpp"
#include "bragg/propagator.hpp"
#include "bragg/pulses.hpp"
#include "bragg/scans.hpp"
#include "bragg/units.hpp"

namespace bragg {

/// Parses "<number> <unit>" into SI. Frequencies are ordinary frequencies
/// (Hz, kHz, MHz) returned as angular rad/s; "2*pi*" and "_x2pi" only
/// mark that convention. rad/s and krad/s are taken as angular already.
double parse_time(const std::string& text);
double parse_angular_frequency(const std::string& text);
double parse_length(const std::string& text);
double parse_mass(const std::string& text);

struct PulseConfig {
  int order = 3;
  std::string envelope = "blackman";
  double tau = 90e-6;                           // s
  double rabi = 2.0 * std::numbers::pi * 23e3;  // rad/s
  double phase = 0.0;
  double p0 = 0.0;                              // resonance momentum, hbar k_eff
  RabiConvention convention = RabiConvention::pulse_average;

  Pulse make(const PhysicalConfig& physics) const;
};

struct SequenceConfig {
  double tau_splitter = 90e-6;
  double rabi_splitter = 2.0 * std::numbers::pi * 15.96e3;
  double t_free = 0.0;
  std::vector<double> phases{0.0, 0.0, 0.0};
  /// Mirror pulse comes from [pulse].
  MachZehnderParams params(const PulseConfig& mirror) const;
};

struct EnsembleConfig {
  MomentumDistribution distribution = MomentumDistribution::gaussian(0.0, 0.13);
  Quadrature quadrature;
};

struct ScanConfig {
  Axis tau{"tau", 50e-6, 150e-6, 30};
  Axis rabi{"rabi", 2.0 * std::numbers::pi * 10e3, 2.0 * std::numbers::pi * 40e3, 30};
  Axis spread{"spread", 0.0, 0.3, 21};
  int phi_points = 25;
  DmpCriterion criterion;
  Refinement refine = Refinement::none;
  int spot_checks = 5;
  bool cache = false;
  std::vector<int> inputs;  // mirror-response input classes, empty = 0..n
  PathOptions paths;
};

struct OutputConfig {
  std::string directory;
  int jobs = 0;  // 0 = available parallelism
};

struct RunConfig {
  std::string preset = "rb87";
  PhysicalConfig physics = default_rb87();
  PulseConfig pulse;
  SequenceConfig sequence;
  EnsembleConfig ensemble;
  BackendOptions propagator;
  ScanConfig scan;
  OutputConfig output;

  SimulationContext context() const { return {physics, propagator}; }
};

/// Dotted key = raw value, e.g. {"propagator.tol", "1e-9"}.
using Override = std::pair<std::string, std::string>;

/// Parses and validates a configuration file. Unknown sections or keys,
/// missing units and out-of-range values raise ConfigError naming the key,
/// the expected unit and an example.
RunConfig parse_config(const std::string& path, const std::vector<Override>& overrides = {});
RunConfig parse_config_text(const std::string& text, const std::vector<Override>& overrides = {});

/// Canonical text form of the fully defaulted configuration; parsing it
/// again yields the same configuration.
std::string render_config(const RunConfig& config);

}  // namespace bragg
