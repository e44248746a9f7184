#include "bragg/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bragg/errors.hpp"

namespace bragg {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_positive_duration(double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw ParameterError("pulse duration must be positive, got " + std::to_string(duration));
}
}  // namespace

double blackman(double t, double tau) {
  require_positive_duration(tau);
  if (t < 0.0 || t > tau) return 0.0;
  const double x = t / tau;
  return 0.42 - 0.5 * std::cos(kTwoPi * x) + 0.08 * std::cos(2.0 * kTwoPi * x);
}

Envelope::Envelope(EnvelopeKind kind, double duration) : kind_(kind), duration_(duration) {
  require_positive_duration(duration);
}

Envelope Envelope::blackman(double duration) {
  Envelope env(EnvelopeKind::blackman, duration);
  env.mean_ = 0.42;
  return env;
}

Envelope Envelope::rectangular(double duration) {
  Envelope env(EnvelopeKind::rectangular, duration);
  env.mean_ = 1.0;
  return env;
}

Envelope Envelope::tabulated(double duration, std::vector<std::pair<double, double>> samples) {
  Envelope env(EnvelopeKind::tabulated, duration);
  if (samples.size() < 2) throw ParameterError("tabulated envelope needs at least two samples");
  std::sort(samples.begin(), samples.end());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [t, f] = samples[i];
    if (t < 0.0 || t > duration)
      throw ParameterError("tabulated envelope sample outside [0, duration]");
    if (i > 0 && t <= samples[i - 1].first)
      throw ParameterError("tabulated envelope sample times must be distinct");
    env.ts_.push_back(t);
    env.fs_.push_back(std::clamp(f, 0.0, 1.0));
  }
  env.build_tabulated();
  return env;
}

void Envelope::build_tabulated() {
  const std::size_t n = ts_.size();
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    secant[i] = (fs_[i + 1] - fs_[i]) / (ts_[i + 1] - ts_[i]);
  slopes_.assign(n, 0.0);
  slopes_[0] = secant[0];
  slopes_[n - 1] = secant[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i)
    slopes_[i] = (secant[i - 1] * secant[i] <= 0.0) ? 0.0 : 0.5 * (secant[i - 1] + secant[i]);
  // Fritsch-Carlson limiter
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (secant[i] == 0.0) {
      slopes_[i] = slopes_[i + 1] = 0.0;
      continue;
    }
    const double a = slopes_[i] / secant[i];
    const double b = slopes_[i + 1] / secant[i];
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double s = 3.0 / std::sqrt(r);
      slopes_[i] = s * a * secant[i];
      slopes_[i + 1] = s * b * secant[i];
    }
  }
  // Composite Simpson over the interpolant.
  constexpr int kIntervals = 4096;
  const double h = duration_ / kIntervals;
  double sum = eval_tabulated(0.0) + eval_tabulated(duration_);
  for (int i = 1; i < kIntervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * eval_tabulated(i * h);
  mean_ = sum * h / 3.0 / duration_;
}

double Envelope::eval_tabulated(double t) const {
  if (t <= ts_.front()) return fs_.front();
  if (t >= ts_.back()) return fs_.back();
  const auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - ts_.begin()) - 1;
  const double h = ts_[i + 1] - ts_[i];
  const double s = (t - ts_[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  const double f = h00 * fs_[i] + h10 * h * slopes_[i] + h01 * fs_[i + 1] + h11 * h * slopes_[i + 1];
  return std::clamp(f, 0.0, 1.0);
}

double Envelope::operator()(double t) const {
  if (t < 0.0 || t > duration_) return 0.0;
  switch (kind_) {
    case EnvelopeKind::blackman: return bragg::blackman(t, duration_);
    case EnvelopeKind::rectangular: return 1.0;
    case EnvelopeKind::tabulated: return eval_tabulated(t);
  }
  return 0.0;
}

Envelope Envelope::scaled(double time_factor) const {
  if (!(time_factor > 0.0)) throw ParameterError("time scale factor must be positive");
  Envelope env = *this;
  env.duration_ = duration_ * time_factor;
  for (double& t : env.ts_) t *= time_factor;
  for (double& s : env.slopes_) s /= time_factor;
  return env;
}

double Pulse::peak_rabi() const {
  return convention == RabiConvention::pulse_average ? rabi / envelope.mean() : rabi;
}

void Pulse::validate() const {
  if (!(rabi >= 0.0) || !std::isfinite(rabi))
    throw ParameterError("Rabi frequency must be non-negative and finite");
  if (!std::isfinite(delta_omega) || !std::isfinite(phase))
    throw ParameterError("pulse frequency difference and phase must be finite");
  if (order < 1) throw ParameterError("pulse order hint must be >= 1");
  if (envelope.mean() <= 0.0) throw ParameterError("envelope has zero area");
}

double resonance_delta_omega(int n, double p0, const PhysicalConfig& config) {
  if (n <= 0) throw ParameterError("diffraction order must be >= 1, got " + std::to_string(n));
  const double k = config.k_eff();
  const double m = config.atom_mass();
  return n * constants::hbar * k * k / (2.0 * m) + p0 * k / m;
}

Pulse on_resonance(int n, double p0, Envelope envelope, double rabi, const PhysicalConfig& config,
                   double phase, RabiConvention convention) {
  Pulse pulse;
  pulse.envelope = std::move(envelope);
  pulse.rabi = rabi;
  pulse.delta_omega = resonance_delta_omega(n, p0, config);
  pulse.phase = phase;
  pulse.order = n;
  pulse.convention = convention;
  pulse.validate();
  return pulse;
}

double rabi_from_power(double power, double waist, double dipole_factor, double envelope_mean) {
  if (!(waist > 0.0)) throw ParameterError("beam waist must be positive");
  if (power < 0.0) throw ParameterError("optical power must be non-negative");
  return envelope_mean * 4.0 * power * dipole_factor /
         (constants::hbar * std::numbers::pi * waist * waist);
}

PulseSequence::PulseSequence(std::vector<SequenceItem> items) : items_(std::move(items)) {
  if (items_.empty()) throw ParameterError("pulse sequence must not be empty");
  for (const auto& item : items_) {
    if (const auto* p = std::get_if<Pulse>(&item)) {
      p->validate();
    } else {
      const double d = std::get<FreeEvolution>(item).duration;
      if (!(d > 0.0) || !std::isfinite(d))
        throw ParameterError("free-evolution duration must be positive");
    }
  }
}

double PulseSequence::total_duration() const {
  double total = 0.0;
  for (const auto& item : items_) {
    if (const auto* p = std::get_if<Pulse>(&item))
      total += p->duration();
    else
      total += std::get<FreeEvolution>(item).duration;
  }
  return total;
}

std::size_t PulseSequence::pulse_count() const {
  return static_cast<std::size_t>(std::count_if(items_.begin(), items_.end(), [](const auto& item) {
    return std::holds_alternative<Pulse>(item);
  }));
}

const Pulse& PulseSequence::pulse(std::size_t index) const {
  std::size_t seen = 0;
  for (const auto& item : items_) {
    if (const auto* p = std::get_if<Pulse>(&item)) {
      if (seen++ == index) return *p;
    }
  }
  throw ParameterError("pulse index out of range");
}

PulseSequence PulseSequence::with_phase(std::size_t index, double phase) const {
  auto items = items_;
  std::size_t seen = 0;
  for (auto& item : items) {
    if (auto* p = std::get_if<Pulse>(&item)) {
      if (seen++ == index) {
        p->phase = phase;
        return PulseSequence(std::move(items));
      }
    }
  }
  throw ParameterError("pulse index out of range");
}

PulseSequence mach_zehnder_sequence(const MachZehnderParams& params, const PhysicalConfig& config) {
  if (params.t_free < 0.0) throw ParameterError("free-evolution time must be >= 0");
  const auto make = [&](double tau, double rabi, double phase) {
    return on_resonance(params.order, 0.0, Envelope::blackman(tau), rabi, config, phase,
                        params.convention);
  };
  std::vector<SequenceItem> items;
  items.emplace_back(make(params.tau_splitter, params.rabi_splitter, params.phases[0]));
  if (params.t_free > 0.0) items.emplace_back(FreeEvolution{params.t_free});
  items.emplace_back(make(params.tau_mirror, params.rabi_mirror, params.phases[1]));
  if (params.t_free > 0.0) items.emplace_back(FreeEvolution{params.t_free});
  items.emplace_back(make(params.tau_splitter, params.rabi_splitter, params.phases[2]));
  return PulseSequence(std::move(items));
}

PulseParams to_dimensionless(const Pulse& pulse, const UnitSystem& units) {
  pulse.validate();
  PulseParams out;
  out.envelope = pulse.envelope.scaled(1.0 / units.time_unit());
  out.peak_rabi = units.to_dimensionless(pulse.peak_rabi(), QuantityKind::frequency);
  out.delta_omega = units.to_dimensionless(pulse.delta_omega, QuantityKind::frequency);
  out.phase = pulse.phase;
  out.order = pulse.order;
  return out;
}

std::vector<DimensionlessItem> to_dimensionless(const PulseSequence& sequence,
                                                const UnitSystem& units) {
  std::vector<DimensionlessItem> out;
  for (const auto& item : sequence.items()) {
    if (const auto* p = std::get_if<Pulse>(&item))
      out.emplace_back(to_dimensionless(*p, units));
    else
      out.emplace_back(FreeEvolution{
          units.to_dimensionless(std::get<FreeEvolution>(item).duration, QuantityKind::time)});
  }
  return out;
}

}  // namespace bragg
