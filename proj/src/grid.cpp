#include "bragg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bragg/errors.hpp"

namespace bragg {

namespace {
bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

Grid::Grid(int num_points, int periods, double quasimomentum)
    : num_points_(num_points), periods_(periods), q_(quasimomentum) {
  if (!is_power_of_two(num_points) || num_points < 8)
    throw ParameterError("grid size must be a power of two >= 8, got " + std::to_string(num_points));
  if (periods < 1) throw ParameterError("grid must span at least one lattice period");
  if (num_points % periods != 0)
    throw ParameterError("grid size must be a multiple of the number of lattice periods");
  if (!std::isfinite(quasimomentum)) throw ParameterError("quasimomentum must be finite");
}

double Grid::length() const { return periods_ * 2.0 * std::numbers::pi; }

double Grid::wavenumber(int m) const {
  const int signed_m = (m < num_points_ / 2) ? m : m - num_points_;
  return static_cast<double>(signed_m) / periods_;
}

int Grid::comb_bin(int j) const {
  const long bin = static_cast<long>(j) * periods_;
  if (2 * std::abs(bin) >= num_points_)
    throw ParameterError("ladder site " + std::to_string(j) + " beyond the grid Nyquist momentum");
  return static_cast<int>((bin + num_points_) % num_points_);
}

void Grid::require_nyquist(int max_order) const {
  if (!(nyquist_momentum() > max_order + 4))
    throw ParameterError("grid Nyquist momentum " + std::to_string(nyquist_momentum()) +
                         " must exceed order + 4 = " + std::to_string(max_order + 4));
}

GridState::GridState(Grid grid, double t)
    : time(t), grid_(grid), psi_(static_cast<std::size_t>(grid.size())) {}

GridState GridState::from_ladder(const LadderState& ladder, int num_points, int periods) {
  GridState state(Grid(num_points, periods, ladder.q), ladder.time);
  std::vector<Complex> c(static_cast<std::size_t>(num_points));
  for (int j = ladder.j_min; j <= ladder.j_max(); ++j)
    c[static_cast<std::size_t>(state.grid_.comb_bin(j))] = ladder.amplitude(j);
  Fft(num_points).backward(c);
  state.psi_ = std::move(c);
  return state;
}

GridState GridState::gaussian_packet(Grid grid, double center, double spread) {
  if (!(spread > 0.0)) throw ParameterError("wavepacket spread must be positive");
  GridState state(grid);
  std::vector<Complex> c(static_cast<std::size_t>(grid.size()));
  double sum = 0.0;
  for (int m = 0; m < grid.size(); ++m) {
    const double d = grid.momentum(m) - center;
    const double amp = std::exp(-d * d / (4.0 * spread * spread));
    c[static_cast<std::size_t>(m)] = amp;
    sum += amp * amp;
  }
  for (auto& v : c) v /= std::sqrt(sum);
  Fft(grid.size()).backward(c);
  state.psi_ = std::move(c);
  return state;
}

double GridState::norm() const {
  double sum = 0.0;
  for (const auto& v : psi_) sum += std::norm(v);
  return sum / grid_.size();
}

std::vector<Complex> GridState::momentum_amplitudes() const {
  std::vector<Complex> c = psi_;
  Fft(grid_.size()).forward(c);
  const double scale = 1.0 / grid_.size();
  for (auto& v : c) v *= scale;
  return c;
}

LadderState GridState::to_ladder(int j_min, int j_max) const {
  const auto c = momentum_amplitudes();
  LadderState out;
  out.q = grid_.quasimomentum();
  out.j_min = j_min;
  out.time = time;
  for (int j = j_min; j <= j_max; ++j) out.amplitudes.push_back(c[static_cast<std::size_t>(grid_.comb_bin(j))]);
  return out;
}

double GridState::off_comb_population() const {
  const auto c = momentum_amplitudes();
  double off = 0.0;
  for (int m = 0; m < grid_.size(); ++m)
    if (m % grid_.periods() != 0) off += std::norm(c[static_cast<std::size_t>(m)]);
  return off;
}

SplittingScheme SplittingScheme::strang() {
  SplittingScheme s;
  s.name = "strang";
  s.a = {0.5, 0.5};
  s.b = {1.0, 0.0};
  s.order = 2;
  s.embedded_order = 2;
  s.palindromic_pair = false;
  return s;
}

SplittingScheme SplittingScheme::pp34a() {
  // Palindromic coefficient string a1 b1 a2 b2 a3 b3 = (x, y, z, z, y, x):
  // the adjoint is the same scheme with the roles of A and B exchanged.
  // Each member is of order 3, their average of order 4.
  constexpr double x = 0.268330095781759925;
  constexpr double y = 0.919661523017399857;
  constexpr double z = -0.187991618799159782;
  SplittingScheme s;
  s.name = "pp34a";
  s.a = {x, z, y};
  s.b = {y, z, x};
  s.order = 4;
  s.embedded_order = 3;
  s.palindromic_pair = true;
  return s;
}

SplittingScheme SplittingScheme::from_name(const std::string& name) {
  if (name == "strang") return strang();
  if (name == "pp34a") return pp34a();
  throw ConfigError("unknown splitting scheme '" + name + "' (expected strang|pp34a)");
}

bool SplittingScheme::is_palindromic() const {
  // zero weights skipped: (1/2, 1, 1/2, 0) is Strang
  std::vector<double> seq;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0.0) seq.push_back(a[i]);
    if (b[i] != 0.0) seq.push_back(b[i]);
  }
  for (std::size_t i = 0; i < seq.size(); ++i)
    if (std::abs(seq[i] - seq[seq.size() - 1 - i]) > 1e-15) return false;
  return true;
}

void SplittingScheme::validate() const {
  if (a.empty() || a.size() != b.size())
    throw ParameterError("splitting scheme needs equally many kinetic and potential weights");
  double sa = 0.0, sb = 0.0;
  for (double v : a) sa += v;
  for (double v : b) sb += v;
  if (std::abs(sa - 1.0) > 1e-14 || std::abs(sb - 1.0) > 1e-14)
    throw ParameterError("splitting scheme '" + name + "' is inconsistent (weights must sum to 1)");
  if (order < 1 || embedded_order < 1) throw ParameterError("splitting scheme order must be >= 1");
}

GridPropagator::GridPropagator(GridOptions options) : options_(std::move(options)) {
  options_.scheme.validate();
  if (!(options_.tol > 0.0)) throw ParameterError("propagator tolerance must be positive");
  const auto& s = options_.scheme;
  for (std::size_t i = 0; i < s.a.size(); ++i) {
    forward_stages_.push_back({Op::kinetic, s.a[i]});
    forward_stages_.push_back({Op::potential, s.b[i]});
  }
  adjoint_stages_.assign(forward_stages_.rbegin(), forward_stages_.rend());
}

const Fft& GridPropagator::fft(int size) const {
  auto& slot = ffts_[size];
  if (!slot) slot = std::make_unique<Fft>(size);
  return *slot;
}

void GridPropagator::kinetic_phase(GridState& state, double dt) const {
  if (dt == 0.0) return;
  const Grid& grid = state.grid();
  auto& psi = state.values();
  const Fft& f = fft(grid.size());
  f.forward(psi);
  const double scale = 1.0 / grid.size();
  for (int m = 0; m < grid.size(); ++m) {
    const double p = grid.momentum(m);
    psi[static_cast<std::size_t>(m)] *= std::polar(scale, -p * p * dt);
  }
  f.backward(psi);
}

void GridPropagator::potential_phase(GridState& state, const PulseParams& pulse, double pulse_start,
                                     double t, double dt) const {
  const double g = pulse.coupling(t - pulse_start);
  if (g == 0.0 || dt == 0.0) return;
  const Grid& grid = state.grid();
  auto& psi = state.values();
  const double shift = -pulse.delta_omega * t + pulse.phase;
  for (int i = 0; i < grid.size(); ++i) {
    const double v = g * (1.0 + std::cos(grid.position(i) + shift));
    psi[static_cast<std::size_t>(i)] *= std::polar(1.0, -v * dt);
  }
}

void GridPropagator::apply_stages(GridState& state, const std::vector<Stage>& stages,
                                  const PulseParams& pulse, double pulse_start, double t,
                                  double h) const {
  double now = t;
  for (const auto& stage : stages) {
    if (stage.weight == 0.0) continue;
    if (stage.op == Op::kinetic) {
      kinetic_phase(state, stage.weight * h);
      now += stage.weight * h;
    } else {
      potential_phase(state, pulse, pulse_start, now, stage.weight * h);
    }
  }
}

double GridPropagator::distance(const std::vector<Complex>& x, const std::vector<Complex>& y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += std::norm(x[i] - y[i]);
  return std::sqrt(sum / static_cast<double>(x.size()));
}

double GridPropagator::step(GridState& state, const PulseParams& pulse, double pulse_start,
                            double t, double h, bool estimate) const {
  const auto& scheme = options_.scheme;
  if (scheme.palindromic_pair) {
    GridState adjoint = state;
    apply_stages(state, forward_stages_, pulse, pulse_start, t, h);
    apply_stages(adjoint, adjoint_stages_, pulse, pulse_start, t, h);
    auto& psi = state.values();
    const auto& other = adjoint.values();
    const double err = estimate ? 0.5 * distance(psi, other) : 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = 0.5 * (psi[i] + other[i]);
    return err;
  }
  if (!estimate) {
    apply_stages(state, forward_stages_, pulse, pulse_start, t, h);
    return 0.0;
  }
  GridState coarse = state;
  apply_stages(coarse, forward_stages_, pulse, pulse_start, t, h);
  apply_stages(state, forward_stages_, pulse, pulse_start, t, 0.5 * h);
  apply_stages(state, forward_stages_, pulse, pulse_start, t + 0.5 * h, 0.5 * h);
  return distance(state.values(), coarse.values()) / (std::pow(2.0, scheme.order) - 1.0);
}

StepStatistics GridPropagator::propagate_pulse(GridState& state, const PulseParams& pulse) const {
  const double start = state.time;
  const double tau = pulse.duration();
  const double end = start + tau;
  StepStatistics stats;
  if (pulse.peak_rabi == 0.0) {
    kinetic_phase(state, tau);
    state.time = end;
    stats.accepted = 1;
    stats.min_step = stats.max_step = tau;
    return stats;
  }
  const double tol = options_.tol;
  const double exponent = 1.0 / options_.scheme.embedded_order;
  const double floor = tau * 1e-9;
  double h = tau * options_.initial_step_fraction;
  double t = start;
  stats.min_step = tau;
  while (t < end) {
    const bool last = (t + h >= end);
    const double step_size = last ? end - t : h;
    GridState trial = state;
    const double err = step(trial, pulse, start, t, step_size, true);
    const double err_rate = err / step_size;
    if (err_rate <= tol) {
      state = std::move(trial);
      t = last ? end : t + step_size;
      ++stats.accepted;
      stats.min_step = std::min(stats.min_step, step_size);
      stats.max_step = std::max(stats.max_step, step_size);
    } else {
      ++stats.rejected;
    }
    const double factor = err_rate > 0.0
                              ? std::clamp(options_.safety * std::pow(tol / err_rate, exponent), 0.2,
                                           options_.max_growth)
                              : options_.max_growth;
    // After the final clamped step the proposal is irrelevant.
    h = (err_rate <= tol && last) ? h : step_size * factor;
    if (t < end && h < floor)
      throw StiffnessError("split-step size underflow: dt = " + std::to_string(h) + " at t = " +
                           std::to_string(t - start) + " of tau = " + std::to_string(tau) +
                           " (peak Rabi " + std::to_string(pulse.peak_rabi) + ", tol " +
                           std::to_string(tol) + ")");
  }
  state.time = end;
  return stats;
}

void GridPropagator::propagate_fixed(GridState& state, const PulseParams& pulse, double pulse_start,
                                     double t_from, double t_to, int steps) const {
  if (steps < 1) throw ParameterError("fixed-step propagation needs at least one step");
  const double h = (t_to - t_from) / steps;
  for (int k = 0; k < steps; ++k) step(state, pulse, pulse_start, t_from + k * h, h, false);
  state.time = t_to;
}

void GridPropagator::free_evolve(GridState& state, double duration) const {
  if (duration < 0.0) throw ParameterError("free-evolution duration must be >= 0");
  kinetic_phase(state, duration);
  state.time += duration;
}

}  // namespace bragg
