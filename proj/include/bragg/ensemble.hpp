#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bragg/grid.hpp"
#include "bragg/ladder.hpp"
#include "bragg/propagator.hpp"
#include "bragg/pulses.hpp"

namespace bragg {

enum class DistributionKind { delta, gaussian, tabulated };

/// Initial momentum distribution of the ensemble, momenta in hbar k_eff.
/// `spread` is the standard deviation of the Gaussian density.
struct MomentumDistribution {
  DistributionKind kind = DistributionKind::delta;
  double mean = 0.0;
  double spread = 0.0;
  /// (momentum, weight) pairs for the tabulated kind.
  std::vector<std::pair<double, double>> table;

  static MomentumDistribution delta(double mean = 0.0);
  static MomentumDistribution gaussian(double mean, double spread);
  static MomentumDistribution tabulated(std::vector<std::pair<double, double>> table);

  void validate() const;
};

enum class QuadratureKind { gauss_hermite, monte_carlo };

struct Quadrature {
  QuadratureKind kind = QuadratureKind::gauss_hermite;
  int nodes = 41;
  std::uint64_t seed = 1;
};

struct MomentumSample {
  double momentum = 0.0;
  double weight = 0.0;
};

/// Probabilists' Gauss-Hermite rule (weight exp(-x^2/2)), weights sum to 1,
/// nodes in ascending order.
std::pair<std::vector<double>, std::vector<double>> gauss_hermite_rule(int nodes);

std::vector<MomentumSample> sample_distribution(const MomentumDistribution& dist,
                                                const Quadrature& quadrature);

/// Momentum-class populations. `raw` holds the integrated populations,
/// `normalized` the same values divided by their sum over `classes`.
struct ClassPopulations {
  std::vector<int> classes;
  std::vector<double> raw;
  std::vector<double> normalized;
  double bin_halfwidth = 0.5;

  double operator[](int cls) const;
  double raw_value(int cls) const;
  double raw_total() const;
};

/// Ladder state: class i is ladder site i (exact identification).
ClassPopulations class_populations(const LadderState& state, std::span<const int> classes);
/// Grid state: integrates |psi(p)|^2 over [i - b, i + b) per class.
ClassPopulations class_populations(const GridState& state, double bin_halfwidth,
                                   std::span<const int> classes);

std::vector<int> class_range(int first, int last);

struct SampleRecord {
  double momentum = 0.0;
  double weight = 0.0;
  std::vector<double> populations;  // raw, aligned with the class list
};

struct EnsembleResult {
  ClassPopulations populations;
  std::vector<SampleRecord> samples;
};

/// Incoherent average over initial momenta: each sample starts in ladder
/// site `input_class` with quasimomentum mean + offset and is propagated
/// independently. Samples are reduced in node order.
EnsembleResult ensemble_average(std::span<const DimensionlessItem> items, int order,
                                const MomentumDistribution& dist, const Quadrature& quadrature,
                                const SimulationContext& context, int input_class,
                                std::span<const int> classes, int jobs = 1);

EnsembleResult ensemble_average(const Pulse& pulse, const MomentumDistribution& dist,
                                const Quadrature& quadrature, const SimulationContext& context,
                                int input_class, std::span<const int> classes, int jobs = 1);

/// Max per-class change of the normalized populations when the
/// Gauss-Hermite node count is increased by `extra_nodes`.
double quadrature_change(const Pulse& pulse, const MomentumDistribution& dist,
                         const Quadrature& quadrature, const SimulationContext& context,
                         int input_class, std::span<const int> classes, int extra_nodes = 8,
                         int jobs = 1);

struct ReflectivityRecord {
  double tau = 0.0;          // s
  double rabi = 0.0;         // rad/s, as quoted on the pulse
  double delta_omega = 0.0;  // rad/s
  double phase = 0.0;
  int order = 0;
  double spread = 0.0;  // hbar k_eff
  std::string backend;
  /// matrix[in][out] normalized over classes 0..n; raw before normalization.
  std::vector<std::vector<double>> matrix;
  std::vector<std::vector<double>> raw;

  double directional(int in, int out) const;
  /// Direction average (P(a->b) + P(b->a)) / 2.
  double pair(int a, int b) const;
};

/// Reflectivity matrix R[in][out] over classes 0..n for the mirror pulse,
/// preparing each input class as the distribution shifted by `in`.
ReflectivityRecord reflectivity_matrix(const Pulse& mirror, const MomentumDistribution& dist,
                                       const Quadrature& quadrature,
                                       const SimulationContext& context, int jobs = 1);

/// One reflectivity record per momentum spread (0 means a delta distribution).
std::vector<ReflectivityRecord> robustness_curve(const Pulse& mirror, std::span<const double> spreads,
                                                 double mean, const Quadrature& quadrature,
                                                 const SimulationContext& context, int jobs = 1);

}  // namespace bragg
