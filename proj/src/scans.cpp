#include "bragg/scans.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "bragg/errors.hpp"
#include "bragg/hash.hpp"
#include "bragg/parallel.hpp"
#include "bragg/simplex.hpp"

namespace bragg {

std::vector<double> Axis::values() const {
  if (count < 2) throw ParameterError("scan axis '" + name + "' needs at least two points");
  if (!(max > min)) throw ParameterError("scan axis '" + name + "' must be ascending");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = min + (max - min) * i / (count - 1);
  return out;
}

ClassPair resonant_pair(int order) { return {0, order}; }

std::vector<ClassPair> parasitic_pairs(int order) {
  std::vector<ClassPair> out;
  for (int i = 1; 2 * i < order; ++i) out.emplace_back(i, order - i);
  return out;
}

std::vector<ClassPair> default_pairs(int order) {
  auto out = parasitic_pairs(order);
  out.insert(out.begin(), resonant_pair(order));
  return out;
}

namespace {

void require_ascending(std::span<const double> grid, const char* what) {
  if (grid.empty()) throw ParameterError(std::string(what) + " grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ParameterError(std::string(what) + " grid must be ascending");
}

}  // namespace

RabiScan rabi_scan(const SimulationContext& context, int order, double tau,
                   std::span<const double> rabis, const MomentumDistribution& dist,
                   const Quadrature& quadrature, int jobs) {
  require_ascending(rabis, "Rabi-frequency");
  RabiScan scan;
  scan.order = order;
  scan.tau = tau;
  scan.rows.resize(rabis.size());
  const auto classes = class_range(0, order);
  parallel_for(rabis.size(), jobs, [&](std::size_t i, int) {
    auto& row = scan.rows[i];
    row.rabi = rabis[i];
    try {
      const Pulse pulse = on_resonance(order, 0.0, Envelope::blackman(tau), rabis[i], context.physics);
      row.populations =
          ensemble_average(pulse, dist, quadrature, context, 0, classes, 1).populations.normalized;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
      row.populations.assign(classes.size(), std::numeric_limits<double>::quiet_NaN());
    }
  });
  return scan;
}

std::optional<ScanExtremum> first_maximum(const RabiScan& scan, int cls) {
  if (cls < 0 || cls > scan.order) throw ParameterError("class outside 0..n");
  const auto& rows = scan.rows;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    if (rows[i - 1].failed || rows[i].failed || rows[i + 1].failed) continue;
    const double a = rows[i - 1].populations[static_cast<std::size_t>(cls)];
    const double b = rows[i].populations[static_cast<std::size_t>(cls)];
    const double c = rows[i + 1].populations[static_cast<std::size_t>(cls)];
    if (!(b > a && b >= c)) continue;
    ScanExtremum ext{rows[i].rabi, b, i};
    const double curvature = a - 2.0 * b + c;
    const double h = 0.5 * (rows[i + 1].rabi - rows[i - 1].rabi);
    if (curvature < 0.0) {
      const double offset = std::clamp(0.5 * (a - c) / curvature, -1.0, 1.0);
      ext.rabi = rows[i].rabi + offset * h;
      ext.value = b - 0.25 * (a - c) * offset;
    }
    return ext;
  }
  return std::nullopt;
}

NodeCache::NodeCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key)) continue;
    std::vector<double> values;
    std::string token;
    while (fields >> token) values.push_back(std::strtod(token.c_str(), nullptr));
    entries_[key] = std::move(values);
  }
}

std::optional<std::vector<double>> NodeCache::lookup(const std::string& key) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void NodeCache::store(const std::string& key, const std::vector<double>& values) {
  std::lock_guard lock(mutex_);
  entries_[key] = values;
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  out << key;
  for (double v : values) out << ' ' << exact(v);
  out << '\n';
}

std::size_t NodeCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::string node_key(const SimulationContext& context, const Pulse& pulse,
                     const MomentumDistribution& dist, const Quadrature& quadrature) {
  std::ostringstream s;
  const auto& b = context.backend;
  s << "m=" << exact(context.physics.atom_mass()) << ";l=" << exact(context.physics.wavelength())
    << ";backend=" << to_string(b.kind) << ";ltol=" << exact(b.ladder.abs_tol) << ','
    << exact(b.ladder.rel_tol);
  if (b.kind == BackendKind::grid)
    s << ";scheme=" << b.grid.scheme.name << ";gtol=" << exact(b.grid.tol) << ";N=" << b.grid.num_points
      << ";P=" << b.grid.periods;
  s << ";n=" << pulse.order << ";tau=" << exact(pulse.duration()) << ";env="
    << static_cast<int>(pulse.envelope.kind()) << ";rabi=" << exact(pulse.rabi)
    << ";conv=" << static_cast<int>(pulse.convention) << ";dw=" << exact(pulse.delta_omega)
    << ";phi=" << exact(pulse.phase) << ";dist=" << static_cast<int>(dist.kind) << ','
    << exact(dist.mean) << ',' << exact(dist.spread);
  for (const auto& [p, w] : dist.table) s << ',' << exact(p) << ':' << exact(w);
  s << ";quad=" << static_cast<int>(quadrature.kind) << ',' << quadrature.nodes << ','
    << quadrature.seed;
  return fnv1a_hex(s.str());
}

const MapNode& ScanResult::node(std::size_t i_tau, std::size_t i_rabi) const {
  if (i_tau >= taus.size() || i_rabi >= rabis.size()) throw ParameterError("map index out of range");
  return nodes[i_tau * rabis.size() + i_rabi];
}

double ScanResult::value(std::size_t i_tau, std::size_t i_rabi, ClassPair pair) const {
  const auto& n = node(i_tau, i_rabi);
  if (n.failed) return std::numeric_limits<double>::quiet_NaN();
  return n.record.pair(pair.first, pair.second);
}

std::size_t ScanResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const MapNode& n) { return n.failed; }));
}

namespace {

std::vector<double> flatten(const ReflectivityRecord& r) {
  std::vector<double> out;
  for (const auto& row : r.matrix) out.insert(out.end(), row.begin(), row.end());
  for (const auto& row : r.raw) out.insert(out.end(), row.begin(), row.end());
  return out;
}

bool unflatten(const std::vector<double>& values, ReflectivityRecord& r) {
  const std::size_t k = static_cast<std::size_t>(r.order + 1);
  if (values.size() != 2 * k * k) return false;
  r.matrix.assign(k, std::vector<double>(k));
  r.raw.assign(k, std::vector<double>(k));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      r.matrix[a][b] = values[a * k + b];
      r.raw[a][b] = values[k * k + a * k + b];
    }
  return true;
}

}  // namespace

ScanResult reflectivity_map(const SimulationContext& context, int order, std::span<const double> taus,
                            std::span<const double> rabis, std::vector<ClassPair> pairs,
                            const MomentumDistribution& dist, const Quadrature& quadrature, int jobs,
                            NodeCache* cache) {
  require_ascending(taus, "duration");
  require_ascending(rabis, "Rabi-frequency");
  for (const auto& [a, b] : pairs)
    if (a < 0 || b < 0 || a > order || b > order)
      throw ParameterError("reflectivity pair outside classes 0..n");

  ScanResult result;
  result.order = order;
  result.taus.assign(taus.begin(), taus.end());
  result.rabis.assign(rabis.begin(), rabis.end());
  result.pairs = std::move(pairs);
  result.nodes.resize(taus.size() * rabis.size());

  parallel_for(result.nodes.size(), jobs, [&](std::size_t index, int) {
    MapNode& node = result.nodes[index];
    node.tau = taus[index / rabis.size()];
    node.rabi = rabis[index % rabis.size()];
    try {
      const Pulse pulse =
          on_resonance(order, 0.0, Envelope::blackman(node.tau), node.rabi, context.physics);
      const std::string key = cache ? node_key(context, pulse, dist, quadrature) : std::string();
      if (cache) {
        if (auto hit = cache->lookup(key)) {
          ReflectivityRecord record;
          record.tau = pulse.duration();
          record.rabi = pulse.rabi;
          record.delta_omega = pulse.delta_omega;
          record.phase = pulse.phase;
          record.order = order;
          record.spread = dist.spread;
          record.backend = to_string(context.backend.kind);
          if (unflatten(*hit, record)) {
            node.record = std::move(record);
            node.cached = true;
            return;
          }
        }
      }
      node.record = reflectivity_matrix(pulse, dist, quadrature, context, 1);
      if (cache) cache->store(key, flatten(node.record));
    } catch (const std::exception& e) {
      node.failed = true;
      node.error = e.what();
    }
  });
  return result;
}

DmpCriterion DmpCriterion::for_order(int order) {
  DmpCriterion c;
  c.resonant = resonant_pair(order);
  c.parasitic = parasitic_pairs(order);
  return c;
}

void DmpCriterion::validate(int order) const {
  if (!(penalty >= 0.0)) throw ParameterError("DMP penalty weight must be >= 0");
  auto check = [&](ClassPair p) {
    if (p.first < 0 || p.second < 0 || p.first > order || p.second > order)
      throw ParameterError("DMP criterion pair outside classes 0..n");
  };
  check(resonant);
  for (const auto& p : parasitic) check(p);
}

double DmpCriterion::objective(double resonant_value, std::span<const double> parasitic_values) const {
  double sum = 0.0;
  for (double v : parasitic_values) sum += v;
  return resonant_value - penalty * sum;
}

bool DmpCriterion::feasible(double resonant_value, std::span<const double> parasitic_values) const {
  if (!(resonant_value >= min_resonant)) return false;
  return std::all_of(parasitic_values.begin(), parasitic_values.end(),
                     [&](double v) { return v <= max_parasitic; });
}

namespace {

struct Evaluation {
  double resonant;
  std::vector<double> parasitic;
};

Evaluation evaluate(const ReflectivityRecord& r, const DmpCriterion& c) {
  Evaluation e{r.pair(c.resonant.first, c.resonant.second), {}};
  for (const auto& p : c.parasitic) e.parasitic.push_back(r.pair(p.first, p.second));
  return e;
}

double dichroic_ratio(const Evaluation& e) {
  double worst = 0.0;
  for (double v : e.parasitic) worst = std::max(worst, v);
  return worst > 0.0 ? e.resonant / worst : std::numeric_limits<double>::infinity();
}

}  // namespace

DmpResult find_dmp(const ScanResult& map, const DmpCriterion& criterion, Refinement refine,
                   const SimulationContext* context, const MomentumDistribution* dist,
                   const Quadrature* quadrature) {
  criterion.validate(map.order);
  std::vector<std::vector<int>> resonant_area;
  std::vector<std::vector<std::vector<int>>> parasitic_area;
  if (criterion.require_areas) {
    resonant_area = area_multiples(map, criterion.resonant);
    for (const auto& p : criterion.parasitic) parasitic_area.push_back(area_multiples(map, p));
  }
  auto on_dmp_areas = [&](std::size_t i, std::size_t j) {
    if (!criterion.require_areas) return true;
    if (resonant_area[i][j] != 1) return false;
    return std::all_of(parasitic_area.begin(), parasitic_area.end(), [&](const auto& a) {
      return a[i][j] >= 2 && a[i][j] % 2 == 0;
    });
  };

  DmpResult best;
  double best_objective = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < map.taus.size(); ++i) {
    for (std::size_t j = 0; j < map.rabis.size(); ++j) {
      const auto& node = map.node(i, j);
      if (node.failed || !on_dmp_areas(i, j)) continue;
      const auto e = evaluate(node.record, criterion);
      if (!criterion.feasible(e.resonant, e.parasitic)) continue;
      const double obj = criterion.objective(e.resonant, e.parasitic);
      if (obj > best_objective) {
        best_objective = obj;
        best.found = true;
        best.tau = node.tau;
        best.rabi = node.rabi;
        best.resonant = e.resonant;
        best.parasitic = e.parasitic;
        best.objective = obj;
        best.dichroic_ratio = dichroic_ratio(e);
        best.i_tau = i;
        best.i_rabi = j;
      }
    }
  }
  if (!best.found) {
    best.message = "no DMP in range";
    return best;
  }
  best.message = "grid optimum";
  if (refine == Refinement::none) return best;
  if (!context || !dist || !quadrature)
    throw ParameterError("local DMP refinement needs a simulation context, distribution and quadrature");

  // Search in (tau [us], Omega/2pi [kHz]) within one grid cell of the node.
  constexpr double us = 1e-6;
  const double khz = 2.0 * std::numbers::pi * 1e3;
  auto cell = [](const std::vector<double>& axis, std::size_t k, double unit) {
    const double lo = axis[k > 0 ? k - 1 : k], hi = axis[k + 1 < axis.size() ? k + 1 : k];
    return std::pair{lo / unit, hi / unit};
  };
  const auto [tau_lo, tau_hi] = cell(map.taus, best.i_tau, us);
  const auto [rabi_lo, rabi_hi] = cell(map.rabis, best.i_rabi, khz);
  DmpResult refined = best;
  double refined_objective = best_objective;
  auto objective = [&](const std::vector<double>& x) {
    if (x[0] < tau_lo || x[0] > tau_hi || x[1] < rabi_lo || x[1] > rabi_hi) return 1e3;
    const Pulse pulse =
        on_resonance(map.order, 0.0, Envelope::blackman(x[0] * us), x[1] * khz, context->physics);
    const auto e = evaluate(reflectivity_matrix(pulse, *dist, *quadrature, *context, 1), criterion);
    const double obj = criterion.objective(e.resonant, e.parasitic);
    if (!criterion.feasible(e.resonant, e.parasitic)) return 1e2 - obj;
    if (obj > refined_objective) {
      refined_objective = obj;
      refined.tau = x[0] * us;
      refined.rabi = x[1] * khz;
      refined.resonant = e.resonant;
      refined.parasitic = e.parasitic;
      refined.objective = obj;
      refined.dichroic_ratio = dichroic_ratio(e);
      refined.refined = true;
    }
    return -obj;
  };
  SimplexOptions options;
  options.max_evaluations = 60;
  options.f_tol = 1e-5;
  options.x_tol = 0.01;
  const auto nm = nelder_mead(objective, {best.tau / us, best.rabi / khz},
                              {0.25 * (tau_hi - tau_lo), 0.25 * (rabi_hi - rabi_lo)}, options);
  refined.evaluations = nm.evaluations;
  refined.message = refined.refined ? "locally refined" : "grid optimum (refinement found no improvement)";
  return refined;
}

std::vector<AreaLabel> pulse_area_labels(const ScanResult& map, ClassPair pair) {
  std::vector<AreaLabel> labels;
  const std::size_t nr = map.rabis.size();
  for (std::size_t i = 0; i < map.taus.size(); ++i) {
    // Virtual zero-area point: the identity map at Omega_R = 0.
    std::vector<double> v{pair.first == pair.second ? 1.0 : 0.0};
    for (std::size_t j = 0; j < nr; ++j) v.push_back(map.value(i, j, pair));
    int count = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (std::isnan(v[k])) continue;
      const double prev = v[k - 1];
      const double next = (k + 1 < v.size()) ? v[k + 1] : std::numeric_limits<double>::quiet_NaN();
      if (std::isnan(prev) || std::isnan(next)) continue;
      const bool is_max = v[k] > prev && v[k] >= next;
      const bool is_min = v[k] < prev && v[k] <= next;
      if (!is_max && !is_min) continue;
      // Extrema alternate; a repeated kind means a shallow wiggle, count once.
      if ((count % 2 == 0) != is_max) continue;
      ++count;
      labels.push_back({i, k - 1, map.taus[i], map.rabis[k - 1], count, is_max});
    }
  }
  return labels;
}

double backend_deviation(const Pulse& pulse, const SimulationContext& context, int jobs) {
  SimulationContext ladder = context, grid = context;
  ladder.backend.kind = BackendKind::ladder;
  grid.backend.kind = BackendKind::grid;
  const auto [lo, hi] = default_ladder_window(pulse.order);
  const auto classes = class_range(lo, hi);
  const auto dist = MomentumDistribution::delta(0.0);
  double worst = 0.0;
  for (int in = 0; in <= pulse.order; ++in) {
    const auto a = ensemble_average(pulse, dist, {}, ladder, in, classes, jobs).populations.raw;
    const auto b = ensemble_average(pulse, dist, {}, grid, in, classes, jobs).populations.raw;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  }
  return worst;
}

std::vector<NodeCheck> spot_check_nodes(const ScanResult& map, const SimulationContext& context,
                                        int count, std::uint64_t seed, int jobs) {
  const std::size_t total = map.taus.size() * map.rabis.size();
  std::vector<std::size_t> picks(total);
  for (std::size_t i = 0; i < total; ++i) picks[i] = i;
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates with explicit draws keeps the choice portable.
  const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(std::max(count, 0)), total);
  for (std::size_t i = 0; i < want; ++i) std::swap(picks[i], picks[i + rng() % (total - i)]);
  picks.resize(want);
  std::sort(picks.begin(), picks.end());
  std::vector<NodeCheck> checks(want);
  parallel_for(want, jobs, [&](std::size_t k, int) {
    const std::size_t i = picks[k] / map.rabis.size(), j = picks[k] % map.rabis.size();
    const Pulse pulse =
        on_resonance(map.order, 0.0, Envelope::blackman(map.taus[i]), map.rabis[j], context.physics);
    checks[k] = {i, j, map.taus[i], map.rabis[j], backend_deviation(pulse, context, 1)};
  });
  return checks;
}

std::vector<std::vector<int>> area_multiples(const ScanResult& map, ClassPair pair) {
  std::vector<std::vector<int>> out(map.taus.size(), std::vector<int>(map.rabis.size(), 0));
  std::vector<std::vector<AreaLabel>> rows(map.taus.size());
  for (const auto& l : pulse_area_labels(map, pair)) rows[l.i_tau].push_back(l);
  for (std::size_t i = 0; i < map.taus.size(); ++i) {
    if (rows[i].empty()) continue;
    for (std::size_t j = 0; j < map.rabis.size(); ++j) {
      const AreaLabel* nearest = nullptr;
      std::size_t distance = 0;
      for (const auto& l : rows[i]) {
        const std::size_t d = l.i_rabi > j ? l.i_rabi - j : j - l.i_rabi;
        if (!nearest || d < distance) nearest = &l, distance = d;
      }
      out[i][j] = nearest->multiple;
    }
  }
  return out;
}

SpreadFit fit_momentum_spread(const SimulationContext& context, int order, double tau,
                              const std::vector<RabiScanRow>& measured,
                              std::span<const double> spreads, const Quadrature& quadrature,
                              int jobs) {
  require_ascending(spreads, "momentum-spread");
  if (measured.empty()) throw ParameterError("measured Rabi scan is empty");
  std::vector<double> rabis;
  for (const auto& row : measured) rabis.push_back(row.rabi);
  SpreadFit fit;
  fit.residual = std::numeric_limits<double>::infinity();
  for (double dp : spreads) {
    const auto scan = rabi_scan(context, order, tau, rabis, MomentumDistribution::gaussian(0.0, dp),
                                quadrature, jobs);
    double residual = 0.0;
    for (std::size_t i = 0; i < measured.size(); ++i) {
      const auto& m = measured[i].populations;
      for (std::size_t k = 0; k < m.size() && k < scan.rows[i].populations.size(); ++k) {
        const double d = scan.rows[i].populations[k] - m[k];
        residual += d * d;
      }
    }
    fit.curve.emplace_back(dp, residual);
    if (residual < fit.residual) {
      fit.residual = residual;
      fit.spread = dp;
    }
  }
  return fit;
}

}  // namespace bragg
