#pragma once

#include <span>
#include <string>
#include <vector>

#include "bragg/ensemble.hpp"
#include "bragg/propagator.hpp"
#include "bragg/pulses.hpp"

namespace bragg {

/// One branch of the path decomposition. `history` lists the momentum class
/// after each split pulse; the root has an empty history.
struct PathNode {
  std::vector<int> history;
  std::string key;  // e.g. "0>3>3"
  int parent = -1;
  double weight = 0.0;  // ensemble-averaged mass at creation
  double display_scale = 1.0;  // 1 / weight when display normalization is on
  /// Own mass (incoherent, summed over descendants) reaching the closing
  /// point before the last pulse, and landing in the detected ports.
  double closing_mass = 0.0;
  double port0 = 0.0;
  double portn = 0.0;

  double delivered() const { return port0 + portn; }
  /// Fraction of the branch mass that reaches the output-port region.
  double closing_fraction() const { return weight > 0.0 ? closing_mass / weight : 0.0; }
  double port_fraction() const { return weight > 0.0 ? delivered() / weight : 0.0; }
};

struct PathTree {
  std::vector<PathNode> nodes;  // parents precede children, siblings by class
  double pruned_mass = 0.0;

  const PathNode* find(const std::string& key) const;
  std::vector<const PathNode*> at_depth(std::size_t depth) const;
};

struct PathContribution {
  std::string key;
  double port0 = 0.0;
  double portn = 0.0;
};

struct PortReport {
  int order = 0;
  double port0 = 0.0;
  double portn = 0.0;
  double undetected = 0.0;
  std::vector<PathContribution> paths;

  double total() const { return port0 + portn + undetected; }
};

/// Coherent propagation of the whole sequence with perfect wavepacket
/// overlap; ports are classes 0 and n at the end.
PortReport run_mzi(const PulseSequence& sequence, int order, const MomentumDistribution& dist,
                   const Quadrature& quadrature, const SimulationContext& context, int jobs = 1);

struct PathOptions {
  /// Pulse indices after which the state is split into class branches.
  /// Empty means every pulse.
  std::vector<int> split_after;
  /// Classes that spawn branches at a split; other mass is pruned.
  /// Empty means 0..n.
  std::vector<int> keep_classes;
  int max_branches = 64;
  bool normalize_display = false;
  /// Components below this population are dropped into the pruned mass.
  double drop_below = 1e-14;
};

struct PathResult {
  PathTree tree;
  PortReport ports;
  double closing_displacement = 0.0;
};

/// Path-resolved run. Each component carries a class-resolved displacement
/// (class times elapsed time between pulse centres); components meeting at
/// the same displacement interfere. Detected ports are classes 0 and n at
/// the displacement where the two main arms close.
PathResult path_resolved_mzi(const PulseSequence& sequence, int order,
                             const MomentumDistribution& dist, const Quadrature& quadrature,
                             const SimulationContext& context, const PathOptions& options = {},
                             int jobs = 1);

struct MirrorResponseRow {
  int input = 0;
  std::vector<double> before;
  std::vector<double> after;  // normalized over classes 0..n
  int dominant = 0;
};

/// Prepares each input class, applies the mirror and reports the class
/// populations before and after.
std::vector<MirrorResponseRow> mirror_response(std::span<const int> inputs, const Pulse& mirror,
                                               const MomentumDistribution& dist,
                                               const Quadrature& quadrature,
                                               const SimulationContext& context, int jobs = 1);

struct FringePoint {
  double phi = 0.0;
  double port0 = 0.0;
  double portn = 0.0;
  double undetected = 0.0;
  double fitted = 0.0;
  double residual = 0.0;
};

/// Port-0 probability fitted as offset + amplitude cos(phi - phase).
/// momentum: classes 0 and n of the coherent run, all components overlapping.
/// output_region: only components at the closing point of the main arms.
enum class FringeReadout { momentum, output_region };

struct FringeScan {
  FringeReadout readout = FringeReadout::output_region;
  std::vector<FringePoint> points;
  bool fit_ok = false;
  std::string fit_message;
  double offset = 0.0;
  double amplitude = 0.0;
  double contrast = 0.0;
  double phase = 0.0;
  int harmonic = 1;  // an order-n transfer imprints n phi
  double max_residual = 0.0;
};

/// Scans the phase of the last pulse of the sequence; the fit uses the
/// harmonic cos(n phi - phase).
FringeScan fringe_scan(const PulseSequence& sequence, int order, std::span<const double> phis,
                       const MomentumDistribution& dist, const Quadrature& quadrature,
                       const SimulationContext& context,
                       FringeReadout readout = FringeReadout::output_region, int jobs = 1);

/// Least-squares fit of y = A + B cos(k phi) + C sin(k phi).
bool fit_sinusoid(std::span<const double> phis, std::span<const double> values, double& offset,
                  double& amplitude, double& phase, int harmonic = 1);

}  // namespace bragg
