#pragma once

#include <string>
#include <vector>

#include "bragg/ensemble.hpp"
#include "bragg/grid.hpp"
#include "bragg/ladder.hpp"
#include "bragg/pulses.hpp"

namespace bragg {

/// |norm - 1| after one pulse on the ladder, starting in site 0 at q.
double ladder_norm_drift(const PulseParams& pulse, double q, const LadderOptions& options = {});

/// |norm - 1| after one adaptive grid pulse from a plane wave.
double grid_norm_drift(const PulseParams& pulse, const GridOptions& options = {});

/// Propagates forward over the pulse with `steps` fixed steps, then back to
/// the start, and returns the l2 distance to the initial state.
double palindromic_return_error(const PulseParams& pulse, const GridOptions& options, int steps);

struct ConvergenceStudy {
  std::string scheme;
  std::vector<int> steps;
  std::vector<double> errors;
  double slope = 0.0;  // least-squares slope of log(error) vs log(dt)
};

/// Fixed-step errors for steps, 2 steps, 4 steps, ... (`levels` values)
/// against a reference with 16 times the finest step count.
ConvergenceStudy convergence_study(const PulseParams& pulse, const GridOptions& options,
                                   int coarsest_steps, int levels = 4);

/// Max class-population change when every pulse phase is shifted by `shift`.
double gauge_deviation(const Pulse& pulse, double shift, const MomentumDistribution& dist,
                       const Quadrature& quadrature, const SimulationContext& context);

struct CheckLine {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
};

/// Invariant suite for one pulse: norm drift, gauge invariance, truncation,
/// palindromic return and splitting convergence.
std::vector<CheckLine> invariant_suite(const Pulse& pulse, const MomentumDistribution& dist,
                                       const Quadrature& quadrature, const SimulationContext& context);

}  // namespace bragg
