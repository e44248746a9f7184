#pragma once

#include <array>
#include <utility>
#include <variant>
#include <vector>

#include "bragg/units.hpp"

namespace bragg {

/// Blackman window 0.42 - 0.5 cos(2 pi t/tau) + 0.08 cos(4 pi t/tau) on
/// [0, tau], zero outside. Throws ParameterError for tau <= 0.
double blackman(double t, double tau);

enum class EnvelopeKind { blackman, rectangular, tabulated };

/// Pulse envelope f(t) on [0, duration] with max 1. Tabulated shapes use
/// monotone (Fritsch-Carlson) cubic interpolation and are clipped to [0, 1].
class Envelope {
 public:
  static Envelope blackman(double duration);
  static Envelope rectangular(double duration);
  static Envelope tabulated(double duration, std::vector<std::pair<double, double>> samples);

  EnvelopeKind kind() const { return kind_; }
  double duration() const { return duration_; }
  double operator()(double t) const;
  /// Time average of f over [0, duration]; 0.42 for Blackman.
  double mean() const { return mean_; }
  /// Same shape on a stretched time axis (used for unit conversion).
  Envelope scaled(double time_factor) const;

 private:
  Envelope(EnvelopeKind kind, double duration);
  double eval_tabulated(double t) const;
  void build_tabulated();

  EnvelopeKind kind_;
  double duration_;
  double mean_ = 1.0;
  std::vector<double> ts_;
  std::vector<double> fs_;
  std::vector<double> slopes_;
};

/// How the quoted Rabi frequency relates to the instantaneous coupling.
/// pulse_average: Omega_R is the envelope-averaged two-photon Rabi frequency
/// (pulse area = Omega_R * tau), instantaneous value Omega_R f(t) / <f>.
/// peak: instantaneous value Omega_R f(t).
enum class RabiConvention { pulse_average, peak };

/// A Bragg pulse in SI units (angular frequencies in rad/s).
struct Pulse {
  Envelope envelope = Envelope::blackman(1e-6);
  double rabi = 0.0;
  double delta_omega = 0.0;
  double phase = 0.0;
  int order = 1;
  RabiConvention convention = RabiConvention::pulse_average;

  double duration() const { return envelope.duration(); }
  double peak_rabi() const;
  void validate() const;
};

/// Delta omega = n hbar k_eff^2/(2m) + p0 k_eff / m, p0 in kg m/s.
double resonance_delta_omega(int n, double p0, const PhysicalConfig& config);

/// Pulse with Delta omega set on the n-th order resonance for momentum p0.
Pulse on_resonance(int n, double p0, Envelope envelope, double rabi, const PhysicalConfig& config,
                   double phase = 0.0,
                   RabiConvention convention = RabiConvention::pulse_average);

/// Laboratory calibration envelope_mean * 4 P U0 / (hbar pi w0^2).
double rabi_from_power(double power, double waist, double dipole_factor,
                       double envelope_mean = 0.42);

struct FreeEvolution {
  double duration = 0.0;
};

using SequenceItem = std::variant<Pulse, FreeEvolution>;

class PulseSequence {
 public:
  explicit PulseSequence(std::vector<SequenceItem> items);

  const std::vector<SequenceItem>& items() const { return items_; }
  double total_duration() const;
  std::size_t pulse_count() const;
  const Pulse& pulse(std::size_t index) const;
  /// Returns a copy with the phase of pulse `index` replaced.
  PulseSequence with_phase(std::size_t index, double phase) const;

 private:
  std::vector<SequenceItem> items_;
};

struct MachZehnderParams {
  int order = 3;
  double tau_splitter = 90e-6;
  double rabi_splitter = 0.0;
  double tau_mirror = 90e-6;
  double rabi_mirror = 0.0;
  double t_free = 0.0;
  std::array<double, 3> phases{0.0, 0.0, 0.0};
  RabiConvention convention = RabiConvention::pulse_average;
};

/// pi/2 - T - pi - T - pi/2, all pulses Blackman and resonant for p0 = 0.
/// T = 0 yields three back-to-back pulses.
PulseSequence mach_zehnder_sequence(const MachZehnderParams& params, const PhysicalConfig& config);

/// Pulse expressed in internal units (hbar = 1, time 1/omega_k).
struct PulseParams {
  Envelope envelope = Envelope::blackman(1.0);
  double peak_rabi = 0.0;
  double delta_omega = 0.0;
  double phase = 0.0;
  int order = 1;

  double duration() const { return envelope.duration(); }
  /// Instantaneous two-photon Rabi frequency at time t after pulse start.
  double coupling(double t) const { return peak_rabi * envelope(t); }
};

PulseParams to_dimensionless(const Pulse& pulse, const UnitSystem& units);

using DimensionlessItem = std::variant<PulseParams, FreeEvolution>;

std::vector<DimensionlessItem> to_dimensionless(const PulseSequence& sequence,
                                                const UnitSystem& units);

}  // namespace bragg
