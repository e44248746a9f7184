#include "bragg/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "bragg/errors.hpp"

namespace bragg {

namespace odeint = boost::numeric::odeint;

LadderState LadderState::basis(double q, int j_min, int j_max, int occupied, double time) {
  if (j_max < j_min) throw ParameterError("empty ladder window");
  if (occupied < j_min || occupied > j_max)
    throw ParameterError("occupied ladder index " + std::to_string(occupied) + " outside window");
  LadderState s;
  s.q = q;
  s.j_min = j_min;
  s.amplitudes.assign(static_cast<std::size_t>(j_max - j_min + 1), Complex{});
  s.amplitudes[static_cast<std::size_t>(occupied - j_min)] = 1.0;
  s.time = time;
  return s;
}

double LadderState::norm() const {
  double sum = 0.0;
  for (const auto& c : amplitudes) sum += std::norm(c);
  return sum;
}

LadderState LadderState::widened(int lo, int hi) const {
  if (lo > j_min || hi < j_max()) throw ParameterError("widened window must contain the original");
  LadderState out;
  out.q = q;
  out.j_min = lo;
  out.time = time;
  out.amplitudes.assign(static_cast<std::size_t>(hi - lo + 1), Complex{});
  std::copy(amplitudes.begin(), amplitudes.end(), out.amplitudes.begin() + (j_min - lo));
  return out;
}

std::pair<int, int> default_ladder_window(int order) {
  if (order < 1) throw ParameterError("order must be >= 1");
  return {-(order + 4), 2 * order + 4};
}

Complex TridiagonalHamiltonian::element(int row, int col) const {
  const int r = row - j_min;
  const int c = col - j_min;
  if (r == c) return diagonal.at(static_cast<std::size_t>(r));
  if (c == r + 1) return upper.at(static_cast<std::size_t>(r));
  if (r == c + 1) return std::conj(upper.at(static_cast<std::size_t>(c)));
  return {};
}

TridiagonalHamiltonian ladder_hamiltonian(double q, const PulseParams& pulse, double t,
                                          double pulse_start, int j_min, int j_max) {
  TridiagonalHamiltonian h;
  h.j_min = j_min;
  const double g = pulse.coupling(t - pulse_start);
  const Complex lower = 0.5 * g * std::polar(1.0, -(pulse.delta_omega * t - pulse.phase));
  for (int j = j_min; j <= j_max; ++j) {
    const double p = q + j;
    h.diagonal.push_back(p * p + g);
    if (j < j_max) h.upper.push_back(std::conj(lower));
  }
  return h;
}

namespace {

struct LadderRhs {
  const PulseParams& pulse;
  double q;
  int j_min;
  double start;

  void operator()(const std::vector<Complex>& c, std::vector<Complex>& dcdt, double t) const {
    const std::size_t n = c.size();
    const double g = pulse.coupling(t - start);
    const Complex lower = 0.5 * g * std::polar(1.0, -(pulse.delta_omega * t - pulse.phase));
    const Complex upper = std::conj(lower);
    for (std::size_t k = 0; k < n; ++k) {
      const double p = q + j_min + static_cast<double>(k);
      Complex hc = (p * p + g) * c[k];
      if (k > 0) hc += lower * c[k - 1];
      if (k + 1 < n) hc += upper * c[k + 1];
      dcdt[k] = Complex(hc.imag(), -hc.real());  // -i * hc
    }
  }
};

}  // namespace

void integrate_ladder(LadderState& state, const PulseParams& pulse, const LadderOptions& options) {
  const double start = state.time;
  const double tau = pulse.duration();
  if (pulse.peak_rabi == 0.0) {
    free_evolve(state, tau);
    return;
  }
  using Stepper = odeint::runge_kutta_fehlberg78<std::vector<Complex>>;
  auto stepper = odeint::make_controlled<Stepper>(options.abs_tol, options.rel_tol);
  LadderRhs rhs{pulse, state.q, state.j_min, start};
  const double dt0 = tau / 200.0;
  try {
    odeint::integrate_adaptive(stepper, rhs, state.amplitudes, start, start + tau, dt0);
  } catch (const std::exception& e) {
    throw PropagationError(std::string("ladder integration failed: ") + e.what());
  }
  for (const auto& c : state.amplitudes)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw PropagationError("ladder integration produced non-finite amplitudes");
  state.time = start + tau;
}

void free_evolve(LadderState& state, double duration) {
  if (duration < 0.0) throw ParameterError("free-evolution duration must be >= 0");
  for (std::size_t k = 0; k < state.amplitudes.size(); ++k) {
    const double p = state.q + state.j_min + static_cast<double>(k);
    state.amplitudes[k] *= std::polar(1.0, -p * p * duration);
  }
  state.time += duration;
}

TruncationReport truncation_check(const LadderState& state, const PulseParams& pulse,
                                  const LadderOptions& options) {
  LadderState narrow = state;
  integrate_ladder(narrow, pulse, options);
  LadderState wide = state.widened(state.j_min - 2, state.j_max() + 2);
  integrate_ladder(wide, pulse, options);

  TruncationReport report;
  report.j_min = state.j_min;
  report.j_max = state.j_max();
  for (int j = wide.j_min; j <= wide.j_max(); ++j)
    report.max_population_change =
        std::max(report.max_population_change, std::abs(wide.population(j) - narrow.population(j)));
  report.passed = report.max_population_change < 1e-8;
  return report;
}

}  // namespace bragg
