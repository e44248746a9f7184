#include "bragg/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <tuple>

#include "bragg/errors.hpp"
#include "bragg/parallel.hpp"

namespace bragg {

const PathNode* PathTree::find(const std::string& key) const {
  for (const auto& n : nodes)
    if (n.key == key) return &n;
  return nullptr;
}

std::vector<const PathNode*> PathTree::at_depth(std::size_t depth) const {
  std::vector<const PathNode*> out;
  for (const auto& n : nodes)
    if (n.history.size() == depth) out.push_back(&n);
  return out;
}

namespace {

std::string history_key(const std::vector<int>& history) {
  std::string key;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (i) key += '>';
    key += std::to_string(history[i]);
  }
  return key;
}

bool is_prefix(const std::vector<int>& prefix, const std::vector<int>& of) {
  return prefix.size() <= of.size() && std::equal(prefix.begin(), prefix.end(), of.begin());
}

void require_order(int order) {
  if (order < 1) throw ParameterError("diffraction order must be >= 1");
}

}  // namespace

PortReport run_mzi(const PulseSequence& sequence, int order, const MomentumDistribution& dist,
                   const Quadrature& quadrature, const SimulationContext& context, int jobs) {
  require_order(order);
  if (sequence.pulse_count() == 0) throw ParameterError("sequence has no pulses");
  const auto items = to_dimensionless(sequence, context.units());
  const int classes[] = {0, order};
  const auto result = ensemble_average(items, order, dist, quadrature, context, 0, classes, jobs);
  PortReport report;
  report.order = order;
  report.port0 = result.populations.raw[0];
  report.portn = result.populations.raw[1];
  report.undetected = 1.0 - report.port0 - report.portn;
  return report;
}

namespace {

struct Component {
  std::vector<int> history;
  int cls = 0;
  long long position = 0;  // displacement in units of the quantum
  LadderState state;
};

struct SampleOutcome {
  std::map<std::vector<int>, double> created;   // mass at creation per history
  std::map<std::vector<int>, double> arrival;   // at closing point before last pulse
  std::map<std::vector<int>, double> closing;   // at closing point after last pulse
  std::map<std::vector<int>, std::pair<double, double>> ports;
  double port0 = 0.0;
  double portn = 0.0;
  double pruned = 0.0;
};

std::vector<Component> merge(std::vector<Component> parts) {
  std::map<std::tuple<std::vector<int>, int, long long>, Component> merged;
  for (auto& c : parts) {
    auto key = std::make_tuple(c.history, c.cls, c.position);
    auto it = merged.find(key);
    if (it == merged.end()) {
      merged.emplace(std::move(key), std::move(c));
    } else {
      auto& a = it->second.state.amplitudes;
      for (std::size_t k = 0; k < a.size(); ++k) a[k] += c.state.amplitudes[k];
    }
  }
  std::vector<Component> out;
  out.reserve(merged.size());
  for (auto& [key, c] : merged) out.push_back(std::move(c));
  return out;
}

}  // namespace

PathResult path_resolved_mzi(const PulseSequence& sequence, int order,
                             const MomentumDistribution& dist, const Quadrature& quadrature,
                             const SimulationContext& context, const PathOptions& options,
                             int jobs) {
  require_order(order);
  const auto items = to_dimensionless(sequence, context.units());
  const int pulses = static_cast<int>(sequence.pulse_count());
  if (pulses == 0) throw ParameterError("sequence has no pulses");
  if (options.max_branches < 1) throw ParameterError("max_branches must be >= 1");

  std::set<int> split(options.split_after.begin(), options.split_after.end());
  if (split.empty())
    for (int k = 0; k < pulses; ++k) split.insert(k);
  for (int k : split)
    if (k < 0 || k >= pulses)
      throw ParameterError("split point " + std::to_string(k) + " outside pulse indices 0.." +
                           std::to_string(pulses - 1));
  std::set<int> keep(options.keep_classes.begin(), options.keep_classes.end());
  if (keep.empty())
    for (int c = 0; c <= order; ++c) keep.insert(c);

  // Intervals between consecutive pulse centres.
  std::vector<double> centres;
  double clock = 0.0;
  for (const auto& item : items) {
    if (const auto* p = std::get_if<PulseParams>(&item)) {
      centres.push_back(clock + 0.5 * p->duration());
      clock += p->duration();
    } else {
      clock += std::get<FreeEvolution>(item).duration;
    }
  }
  std::vector<double> intervals;
  for (std::size_t k = 1; k < centres.size(); ++k) intervals.push_back(centres[k] - centres[k - 1]);
  const double quantum = 1e-9 * std::max(clock, 1.0);
  auto quantize = [&](double d) { return std::llround(d / quantum); };
  // The arm with class n after the first pulse and class 0 afterwards.
  const long long closing = intervals.empty() ? 0 : quantize(order * intervals[0]);

  auto [lo, hi] = default_ladder_window(order);
  const auto samples = sample_distribution(dist, quadrature);
  std::vector<SampleOutcome> outcomes(samples.size());
  std::vector<std::unique_ptr<Propagator>> workers(static_cast<std::size_t>(resolve_jobs(jobs)));

  parallel_for(samples.size(), jobs, [&](std::size_t s, int w) {
    auto& propagator = workers[static_cast<std::size_t>(w)];
    if (!propagator) propagator = context.make_propagator();
    SampleOutcome& out = outcomes[s];
    std::vector<Component> comps;
    comps.push_back({{}, 0, 0, LadderState::basis(samples[s].momentum, lo, hi, 0)});
    int pulse = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (const auto* free = std::get_if<FreeEvolution>(&items[i])) {
        for (auto& c : comps) free_evolve(c.state, free->duration);
        continue;
      }
      const auto& params = std::get<PulseParams>(items[i]);
      const bool last = pulse == pulses - 1;
      if (pulse > 0) {
        for (auto& c : comps) c.position += quantize(c.cls * intervals[static_cast<std::size_t>(pulse - 1)]);
      }
      if (last) {
        for (const auto& c : comps)
          if (c.position == closing) out.arrival[c.history] += c.state.norm();
      }
      for (auto& c : comps) {
        try {
          propagator->apply_pulse(c.state, params);
        } catch (const PropagationError& e) {
          throw PropagationError(std::string(e.what()) + " [pulse " + std::to_string(pulse) +
                                 ", branch '" + history_key(c.history) + "']");
        }
      }
      const bool splitting = split.count(pulse) > 0;
      if (!last || splitting) {
        std::vector<Component> parts;
        for (const auto& c : comps) {
          for (int j = c.state.j_min; j <= c.state.j_max(); ++j) {
            const double mass = c.state.population(j);
            if (mass < options.drop_below || (splitting && !keep.count(j))) {
              out.pruned += mass;
              continue;
            }
            Component part{c.history, j, c.position, c.state};
            if (splitting) part.history.push_back(j);
            std::fill(part.state.amplitudes.begin(), part.state.amplitudes.end(), Complex{});
            part.state.amplitudes[static_cast<std::size_t>(j - c.state.j_min)] = c.state.amplitude(j);
            parts.push_back(std::move(part));
          }
        }
        comps = merge(std::move(parts));
        if (splitting) {
          std::set<std::vector<int>> branches;
          for (const auto& c : comps) {
            branches.insert(c.history);
            out.created[c.history] += c.state.norm();
          }
          if (static_cast<int>(branches.size()) > options.max_branches)
            throw ParameterError("path decomposition produced " + std::to_string(branches.size()) +
                                 " branches (limit " + std::to_string(options.max_branches) +
                                 "); split after fewer pulses or keep fewer classes");
        }
      }
      ++pulse;
    }

    std::vector<Complex> coherent(static_cast<std::size_t>(hi - lo + 1));
    for (const auto& c : comps) {
      if (c.position != closing) continue;
      out.closing[c.history] += c.state.norm();
      auto& [p0, pn] = out.ports[c.history];
      p0 += c.state.population(0);
      pn += c.state.population(order);
      for (std::size_t k = 0; k < coherent.size(); ++k) coherent[k] += c.state.amplitudes[k];
    }
    out.port0 = std::norm(coherent[static_cast<std::size_t>(0 - lo)]);
    out.portn = std::norm(coherent[static_cast<std::size_t>(order - lo)]);
  });

  // Reduce in sample order.
  PathResult result;
  result.closing_displacement = static_cast<double>(closing) * quantum;
  std::map<std::vector<int>, PathNode> nodes;
  nodes[{}].weight = 1.0;
  std::size_t arrival_depth = 0;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const double w = samples[s].weight;
    const auto& out = outcomes[s];
    for (const auto& [h, m] : out.created) nodes[h].weight += w * m;
    for (const auto& [h, m] : out.arrival) arrival_depth = std::max(arrival_depth, h.size());
    result.ports.port0 += w * out.port0;
    result.ports.portn += w * out.portn;
    result.tree.pruned_mass += w * out.pruned;
  }
  for (auto& [history, node] : nodes) {
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const double w = samples[s].weight;
      const auto& out = outcomes[s];
      const auto& source = history.size() <= arrival_depth ? out.arrival : out.closing;
      for (const auto& [h, m] : source)
        if (is_prefix(history, h)) node.closing_mass += w * m;
      for (const auto& [h, p] : out.ports)
        if (is_prefix(history, h)) {
          node.port0 += w * p.first;
          node.portn += w * p.second;
        }
    }
  }

  std::map<std::vector<int>, int> index;
  for (auto& [history, node] : nodes) {
    node.history = history;
    node.key = history_key(history);
    if (!history.empty()) {
      const auto parent = index.find(std::vector<int>(history.begin(), history.end() - 1));
      node.parent = parent == index.end() ? -1 : parent->second;
    }
    node.display_scale = options.normalize_display && node.weight > 0.0 ? 1.0 / node.weight : 1.0;
    index[history] = static_cast<int>(result.tree.nodes.size());
    result.tree.nodes.push_back(node);
  }

  std::size_t depth = 0;
  for (const auto& n : result.tree.nodes) depth = std::max(depth, n.history.size());
  for (const auto* leaf : result.tree.at_depth(depth))
    result.ports.paths.push_back({leaf->key, leaf->port0, leaf->portn});
  result.ports.order = order;
  result.ports.undetected = 1.0 - result.ports.port0 - result.ports.portn;
  return result;
}

std::vector<MirrorResponseRow> mirror_response(std::span<const int> inputs, const Pulse& mirror,
                                               const MomentumDistribution& dist,
                                               const Quadrature& quadrature,
                                               const SimulationContext& context, int jobs) {
  const int n = mirror.order;
  for (int in : inputs)
    if (in < 0 || in > n)
      throw ParameterError("input class " + std::to_string(in) + " outside 0.." + std::to_string(n));
  const auto classes = class_range(0, n);
  std::vector<MirrorResponseRow> rows;
  for (int in : inputs) {
    MirrorResponseRow row;
    row.input = in;
    row.before.assign(classes.size(), 0.0);
    row.before[static_cast<std::size_t>(in)] = 1.0;
    row.after = ensemble_average(mirror, dist, quadrature, context, in, classes, jobs).populations.normalized;
    row.dominant = static_cast<int>(std::max_element(row.after.begin(), row.after.end()) - row.after.begin());
    rows.push_back(std::move(row));
  }
  return rows;
}

bool fit_sinusoid(std::span<const double> phis, std::span<const double> values, double& offset,
                  double& amplitude, double& phase, int harmonic) {
  if (phis.size() != values.size() || phis.size() < 3 || harmonic < 1) return false;
  double m[3][4] = {};
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const double f[3] = {1.0, std::cos(harmonic * phis[i]), std::sin(harmonic * phis[i])};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += f[r] * f[c];
      m[r][3] += f[r] * values[i];
    }
  }
  // Gauss-Jordan with partial pivoting.
  for (int c = 0; c < 3; ++c) {
    int p = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
    if (std::abs(m[p][c]) < 1e-12 * static_cast<double>(phis.size())) return false;
    std::swap(m[c], m[p]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
    }
  }
  const double a = m[0][3] / m[0][0], b = m[1][3] / m[1][1], s = m[2][3] / m[2][2];
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(s)) return false;
  offset = a;
  amplitude = std::hypot(b, s);
  phase = std::atan2(s, b);
  return true;
}

FringeScan fringe_scan(const PulseSequence& sequence, int order, std::span<const double> phis,
                       const MomentumDistribution& dist, const Quadrature& quadrature,
                       const SimulationContext& context, FringeReadout readout, int jobs) {
  if (phis.size() < 3) throw ParameterError("phase scan needs at least three points");
  const auto [lo, hi] = std::minmax_element(phis.begin(), phis.end());
  const double count = static_cast<double>(phis.size());
  if (*hi - *lo < 2.0 * std::numbers::pi * (count - 1.0) / count - 1e-9)
    throw ParameterError("phase scan must cover a full period (2 pi)");
  const std::size_t last = sequence.pulse_count() - 1;

  // One label per first-pulse class; every other class is kept too.
  PathOptions paths;
  paths.split_after = {0};
  const auto [jlo, jhi] = default_ladder_window(order);
  paths.keep_classes = class_range(jlo, jhi);

  FringeScan scan;
  scan.readout = readout;
  std::vector<double> p0;
  for (double phi : phis) {
    const auto seq = sequence.with_phase(last, phi);
    const auto r = readout == FringeReadout::output_region
                       ? path_resolved_mzi(seq, order, dist, quadrature, context, paths, jobs).ports
                       : run_mzi(seq, order, dist, quadrature, context, jobs);
    scan.points.push_back({phi, r.port0, r.portn, r.undetected, 0.0, 0.0});
    p0.push_back(r.port0);
  }
  scan.harmonic = order;
  scan.fit_ok = fit_sinusoid(phis, p0, scan.offset, scan.amplitude, scan.phase, order);
  if (!scan.fit_ok) {
    scan.fit_message = "sinusoid fit failed; raw table only";
    return scan;
  }
  scan.contrast = scan.offset > 0.0 ? scan.amplitude / scan.offset : 0.0;
  for (auto& p : scan.points) {
    p.fitted = scan.offset + scan.amplitude * std::cos(order * p.phi - scan.phase);
    p.residual = p.port0 - p.fitted;
    scan.max_residual = std::max(scan.max_residual, std::abs(p.residual));
  }
  scan.fit_message = "ok";
  return scan;
}

}  // namespace bragg
