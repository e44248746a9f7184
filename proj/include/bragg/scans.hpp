#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bragg/ensemble.hpp"
#include "bragg/propagator.hpp"

namespace bragg {

/// Evenly spaced linear axis, count >= 2.
struct Axis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  int count = 2;

  std::vector<double> values() const;
};

using ClassPair = std::pair<int, int>;

/// Resonant pair (0, n) and the parasitic pairs (i, n - i), 0 < i < n/2.
ClassPair resonant_pair(int order);
std::vector<ClassPair> parasitic_pairs(int order);
std::vector<ClassPair> default_pairs(int order);

struct RabiScanRow {
  double rabi = 0.0;  // rad/s
  std::vector<double> populations;  // normalized over classes 0..n
  bool failed = false;
  std::string error;
};

struct RabiScan {
  int order = 0;
  double tau = 0.0;
  std::vector<RabiScanRow> rows;
};

/// Class populations (input class 0) versus Rabi frequency at fixed tau.
/// Propagation failures are recorded per point.
RabiScan rabi_scan(const SimulationContext& context, int order, double tau,
                   std::span<const double> rabis, const MomentumDistribution& dist,
                   const Quadrature& quadrature, int jobs = 1);

struct ScanExtremum {
  double rabi = 0.0;
  double value = 0.0;
  std::size_t index = 0;
};

/// First local maximum of a class population along the scan, refined by a
/// parabola through the neighbouring points.
std::optional<ScanExtremum> first_maximum(const RabiScan& scan, int cls);

/// Persistent node cache for resumable maps: one line per node, keyed by a
/// hash of every input that influences the result.
class NodeCache {
 public:
  NodeCache() = default;
  explicit NodeCache(std::string path);

  std::optional<std::vector<double>> lookup(const std::string& key) const;
  void store(const std::string& key, const std::vector<double>& values);
  std::size_t size() const;

 private:
  std::string path_;
  std::map<std::string, std::vector<double>> entries_;
  mutable std::mutex mutex_;
};

std::string node_key(const SimulationContext& context, const Pulse& pulse,
                     const MomentumDistribution& dist, const Quadrature& quadrature);

struct MapNode {
  double tau = 0.0;
  double rabi = 0.0;
  ReflectivityRecord record;
  bool failed = false;
  bool cached = false;
  std::string error;
};

/// Rectangular (tau, Omega_R) map; nodes are stored tau-major.
struct ScanResult {
  int order = 0;
  std::vector<double> taus;
  std::vector<double> rabis;
  std::vector<ClassPair> pairs;
  std::vector<MapNode> nodes;

  const MapNode& node(std::size_t i_tau, std::size_t i_rabi) const;
  /// Direction-averaged pair reflectivity at a node (NaN for failed nodes).
  double value(std::size_t i_tau, std::size_t i_rabi, ClassPair pair) const;
  std::size_t failures() const;
};

ScanResult reflectivity_map(const SimulationContext& context, int order, std::span<const double> taus,
                            std::span<const double> rabis, std::vector<ClassPair> pairs,
                            const MomentumDistribution& dist, const Quadrature& quadrature,
                            int jobs = 1, NodeCache* cache = nullptr);

struct DmpCriterion {
  ClassPair resonant{0, 3};
  std::vector<ClassPair> parasitic{{1, 2}};
  double penalty = 1.0;
  double min_resonant = 0.5;
  double max_parasitic = 0.15;
  /// Only nodes on the resonant pi ridge whose parasitic pairs sit in an
  /// even-multiple-of-pi valley are candidates (see area_multiple).
  bool require_areas = true;

  static DmpCriterion for_order(int order);
  void validate(int order) const;
  double objective(double resonant_value, std::span<const double> parasitic_values) const;
  bool feasible(double resonant_value, std::span<const double> parasitic_values) const;
};

enum class Refinement { none, local };

struct DmpResult {
  bool found = false;
  std::string message;
  double tau = 0.0;
  double rabi = 0.0;
  double resonant = 0.0;
  std::vector<double> parasitic;
  double objective = 0.0;
  /// resonant / max(parasitic)
  double dichroic_ratio = 0.0;
  std::size_t i_tau = 0;
  std::size_t i_rabi = 0;
  bool refined = false;
  int evaluations = 0;
};

/// Best feasible grid node; with local refinement a simplex search over
/// (tau, Omega_R) using fresh simulations starts from it.
DmpResult find_dmp(const ScanResult& map, const DmpCriterion& criterion,
                   Refinement refine = Refinement::none, const SimulationContext* context = nullptr,
                   const MomentumDistribution* dist = nullptr, const Quadrature* quadrature = nullptr);

struct AreaLabel {
  std::size_t i_tau = 0;
  std::size_t i_rabi = 0;
  double tau = 0.0;
  double rabi = 0.0;
  /// Pulse area in units of pi: odd on maxima, even on minima.
  int multiple = 0;
  bool maximum = false;
};

/// Labels ridges and valleys of a pair reflectivity along each tau row,
/// counting extrema from zero area (R = 0 at Omega_R = 0).
std::vector<AreaLabel> pulse_area_labels(const ScanResult& map, ClassPair pair);

/// Area multiple of the labelled extremum nearest to each node along its
/// tau row (ties resolved towards smaller Omega_R); 0 if the row has none.
/// Indexed [i_tau][i_rabi].
std::vector<std::vector<int>> area_multiples(const ScanResult& map, ClassPair pair);

/// Max |P_ladder - P_grid| over input classes 0..n and output classes of
/// the ladder window, plane-wave inputs.
double backend_deviation(const Pulse& pulse, const SimulationContext& context, int jobs = 1);

struct NodeCheck {
  std::size_t i_tau = 0;
  std::size_t i_rabi = 0;
  double tau = 0.0;
  double rabi = 0.0;
  double deviation = 0.0;
};

/// Cross-backend check of `count` distinct map nodes drawn with a seeded
/// generator (deterministic for a given seed and map shape).
std::vector<NodeCheck> spot_check_nodes(const ScanResult& map, const SimulationContext& context,
                                        int count, std::uint64_t seed, int jobs = 1);

struct SpreadFit {
  double spread = 0.0;
  double residual = 0.0;
  std::vector<std::pair<double, double>> curve;  // (spread, residual)
};

/// Sweeps the momentum spread and returns the one minimizing the squared
/// residual against a measured Rabi scan (rows: rabi, class populations 0..n).
SpreadFit fit_momentum_spread(const SimulationContext& context, int order, double tau,
                              const std::vector<RabiScanRow>& measured,
                              std::span<const double> spreads, const Quadrature& quadrature,
                              int jobs = 1);

}  // namespace bragg
