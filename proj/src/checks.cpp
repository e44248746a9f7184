#include "bragg/checks.hpp"

#include <cmath>

#include "bragg/errors.hpp"

namespace bragg {

namespace {

GridState plane_wave(const GridOptions& options, int order) {
  auto [lo, hi] = default_ladder_window(order);
  return GridState::from_ladder(LadderState::basis(0.0, lo, hi, 0), options.num_points, options.periods);
}

double l2_distance(const GridState& a, const GridState& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) sum += std::norm(a.values()[i] - b.values()[i]);
  return std::sqrt(sum / static_cast<double>(a.values().size()));
}

}  // namespace

double ladder_norm_drift(const PulseParams& pulse, double q, const LadderOptions& options) {
  auto [lo, hi] = default_ladder_window(pulse.order);
  LadderState state = LadderState::basis(q, lo, hi, 0);
  integrate_ladder(state, pulse, options);
  return std::abs(state.norm() - 1.0);
}

double grid_norm_drift(const PulseParams& pulse, const GridOptions& options) {
  GridPropagator propagator(options);
  GridState state = plane_wave(options, pulse.order);
  propagator.propagate_pulse(state, pulse);
  return std::abs(state.norm() - 1.0);
}

double palindromic_return_error(const PulseParams& pulse, const GridOptions& options, int steps) {
  GridPropagator propagator(options);
  const GridState initial = plane_wave(options, pulse.order);
  GridState state = initial;
  propagator.propagate_fixed(state, pulse, 0.0, 0.0, pulse.duration(), steps);
  propagator.propagate_fixed(state, pulse, 0.0, pulse.duration(), 0.0, steps);
  return l2_distance(state, initial);
}

ConvergenceStudy convergence_study(const PulseParams& pulse, const GridOptions& options,
                                   int coarsest_steps, int levels) {
  if (coarsest_steps < 1 || levels < 2) throw ParameterError("convergence study needs >= 2 levels");
  GridPropagator propagator(options);
  const GridState initial = plane_wave(options, pulse.order);
  auto run = [&](int steps) {
    GridState s = initial;
    propagator.propagate_fixed(s, pulse, 0.0, 0.0, pulse.duration(), steps);
    return s;
  };
  ConvergenceStudy study;
  study.scheme = options.scheme.name;
  const int finest = coarsest_steps << (levels - 1);
  const GridState reference = run(16 * finest);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < levels; ++k) {
    const int steps = coarsest_steps << k;
    const double err = l2_distance(run(steps), reference);
    study.steps.push_back(steps);
    study.errors.push_back(err);
    const double x = std::log(pulse.duration() / steps), y = std::log(err);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double n = levels;
  study.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return study;
}

double gauge_deviation(const Pulse& pulse, double shift, const MomentumDistribution& dist,
                       const Quadrature& quadrature, const SimulationContext& context) {
  Pulse shifted = pulse;
  shifted.phase += shift;
  const auto classes = class_range(0, pulse.order);
  const auto a = ensemble_average(pulse, dist, quadrature, context, 0, classes);
  const auto b = ensemble_average(shifted, dist, quadrature, context, 0, classes);
  double dev = 0.0;
  for (std::size_t k = 0; k < classes.size(); ++k)
    dev = std::max(dev, std::abs(a.populations.raw[k] - b.populations.raw[k]));
  return dev;
}

std::vector<CheckLine> invariant_suite(const Pulse& pulse, const MomentumDistribution& dist,
                                       const Quadrature& quadrature, const SimulationContext& context) {
  const PulseParams p = to_dimensionless(pulse, context.units());
  std::vector<CheckLine> lines;
  auto add = [&](std::string name, double value, double limit) {
    lines.push_back({std::move(name), value, limit, value < limit});
  };
  add("ladder norm drift", ladder_norm_drift(p, 0.0, context.backend.ladder), 1e-10);
  GridOptions grid = context.backend.grid;
  add("grid norm drift (" + grid.scheme.name + ")", grid_norm_drift(p, grid), 1e-10);
  add("phase gauge invariance", gauge_deviation(pulse, 0.7, dist, quadrature, context), 1e-12);
  {
    auto [lo, hi] = default_ladder_window(pulse.order);
    add("ladder truncation", truncation_check(LadderState::basis(0.0, lo, hi, 0), p, context.backend.ladder)
                                 .max_population_change,
        1e-8);
  }
  add("palindromic return (" + grid.scheme.name + ")", palindromic_return_error(p, grid, 400), 1e-8);
  for (const char* name : {"strang", "pp34a"}) {
    GridOptions g = grid;
    g.scheme = SplittingScheme::from_name(name);
    const auto study = convergence_study(p, g, 100);
    const double limit = study.slope >= g.scheme.order - 0.2 ? study.slope + 1.0 : 0.0;
    lines.push_back({std::string("convergence slope (") + name + ") >= " +
                         std::to_string(g.scheme.order) + " - 0.2",
                     study.slope, limit, study.slope >= g.scheme.order - 0.2});
  }
  return lines;
}

}  // namespace bragg
