#include "bragg/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <variant>

#include "bragg/errors.hpp"
#include "bragg/parallel.hpp"

namespace bragg {

MomentumDistribution MomentumDistribution::delta(double mean) {
  MomentumDistribution d;
  d.kind = DistributionKind::delta;
  d.mean = mean;
  return d;
}

MomentumDistribution MomentumDistribution::gaussian(double mean, double spread) {
  MomentumDistribution d;
  d.kind = spread == 0.0 ? DistributionKind::delta : DistributionKind::gaussian;
  d.mean = mean;
  d.spread = spread;
  d.validate();
  return d;
}

MomentumDistribution MomentumDistribution::tabulated(std::vector<std::pair<double, double>> table) {
  MomentumDistribution d;
  d.kind = DistributionKind::tabulated;
  d.table = std::move(table);
  d.validate();
  double total = 0.0;
  for (const auto& [p, w] : d.table) total += w;
  for (auto& entry : d.table) entry.second /= total;
  return d;
}

void MomentumDistribution::validate() const {
  if (!(spread >= 0.0) || !std::isfinite(spread))
    throw ParameterError("momentum spread must be >= 0");
  if (!std::isfinite(mean)) throw ParameterError("mean momentum must be finite");
  if (kind == DistributionKind::tabulated) {
    if (table.empty()) throw ParameterError("tabulated momentum distribution is empty");
    double total = 0.0;
    for (const auto& [p, w] : table) {
      if (w < 0.0 || !std::isfinite(p)) throw ParameterError("tabulated weights must be >= 0");
      total += w;
    }
    if (!(total > 0.0)) throw ParameterError("tabulated weights sum to zero");
  }
}

std::pair<std::vector<double>, std::vector<double>> gauss_hermite_rule(int n) {
  if (n < 1) throw ParameterError("Gauss-Hermite rule needs at least one node");
  // Newton iteration on orthonormal Hermite functions (physicists' weight),
  // then rescaled to the standard normal.
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    x[static_cast<std::size_t>(n - 1 - i)] = -z;
    w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(n - 1 - i)] = 2.0 / (pp * pp);
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.0;
  std::vector<double> nodes(x.rbegin(), x.rend());
  std::vector<double> weights(w.rbegin(), w.rend());
  for (auto& v : nodes) v *= std::numbers::sqrt2;
  for (auto& v : weights) v /= std::sqrt(std::numbers::pi);
  return {nodes, weights};
}

std::vector<MomentumSample> sample_distribution(const MomentumDistribution& dist,
                                                const Quadrature& quadrature) {
  dist.validate();
  std::vector<MomentumSample> samples;
  switch (dist.kind) {
    case DistributionKind::delta:
      samples.push_back({dist.mean, 1.0});
      break;
    case DistributionKind::tabulated: {
      double total = 0.0;
      for (const auto& [p, w] : dist.table) total += w;
      for (const auto& [p, w] : dist.table) samples.push_back({p, w / total});
      break;
    }
    case DistributionKind::gaussian: {
      if (dist.spread == 0.0) {
        samples.push_back({dist.mean, 1.0});
        break;
      }
      if (quadrature.nodes < 1) throw ParameterError("quadrature needs at least one node");
      if (quadrature.kind == QuadratureKind::gauss_hermite) {
        const auto [x, w] = gauss_hermite_rule(quadrature.nodes);
        for (std::size_t i = 0; i < x.size(); ++i)
          samples.push_back({dist.mean + dist.spread * x[i], w[i]});
      } else {
        std::mt19937_64 rng(quadrature.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        const double w = 1.0 / quadrature.nodes;
        for (int i = 0; i < quadrature.nodes; ++i)
          samples.push_back({dist.mean + dist.spread * normal(rng), w});
      }
      break;
    }
  }
  return samples;
}

double ClassPopulations::operator[](int cls) const {
  const auto it = std::find(classes.begin(), classes.end(), cls);
  if (it == classes.end()) throw ParameterError("class " + std::to_string(cls) + " not tracked");
  return normalized[static_cast<std::size_t>(it - classes.begin())];
}

double ClassPopulations::raw_value(int cls) const {
  const auto it = std::find(classes.begin(), classes.end(), cls);
  if (it == classes.end()) throw ParameterError("class " + std::to_string(cls) + " not tracked");
  return raw[static_cast<std::size_t>(it - classes.begin())];
}

double ClassPopulations::raw_total() const {
  double total = 0.0;
  for (double v : raw) total += v;
  return total;
}

namespace {

ClassPopulations finish(std::span<const int> classes, std::vector<double> raw, double halfwidth) {
  ClassPopulations out;
  out.classes.assign(classes.begin(), classes.end());
  out.bin_halfwidth = halfwidth;
  double total = 0.0;
  for (double v : raw) total += v;
  out.normalized = raw;
  if (total > 0.0)
    for (double& v : out.normalized) v /= total;
  out.raw = std::move(raw);
  return out;
}

void require_distinct(std::span<const int> classes) {
  std::vector<int> sorted(classes.begin(), classes.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ParameterError("momentum classes must be distinct");
  if (sorted.empty()) throw ParameterError("class list is empty");
}

}  // namespace

ClassPopulations class_populations(const LadderState& state, std::span<const int> classes) {
  require_distinct(classes);
  std::vector<double> raw;
  for (int c : classes) raw.push_back(state.population(c));
  return finish(classes, std::move(raw), 0.5);
}

ClassPopulations class_populations(const GridState& state, double bin_halfwidth,
                                   std::span<const int> classes) {
  require_distinct(classes);
  if (!(bin_halfwidth > 0.0) || bin_halfwidth > 0.5)
    throw ParameterError("bin half-width must be in (0, 0.5] hbar k_eff (bins would overlap)");
  const auto c = state.momentum_amplitudes();
  const Grid& grid = state.grid();
  std::vector<double> raw(classes.size(), 0.0);
  for (int m = 0; m < grid.size(); ++m) {
    const double p = grid.momentum(m);
    for (std::size_t k = 0; k < classes.size(); ++k) {
      const double lo = classes[k] - bin_halfwidth;
      const double hi = classes[k] + bin_halfwidth;
      if (p >= lo && p < hi) raw[k] += std::norm(c[static_cast<std::size_t>(m)]);
    }
  }
  return finish(classes, std::move(raw), bin_halfwidth);
}

std::vector<int> class_range(int first, int last) {
  std::vector<int> out;
  for (int c = first; c <= last; ++c) out.push_back(c);
  return out;
}

namespace {

int max_order(std::span<const DimensionlessItem> items) {
  int order = 1;
  for (const auto& item : items)
    if (const auto* p = std::get_if<PulseParams>(&item)) order = std::max(order, p->order);
  return order;
}

/// raw[input][sample][class] for every (input, sample) pair.
std::vector<std::vector<std::vector<double>>> propagate_samples(
    std::span<const DimensionlessItem> items, int order, std::span<const MomentumSample> samples,
    std::span<const int> inputs, std::span<const int> classes, const SimulationContext& context,
    int jobs) {
  auto [lo, hi] = default_ladder_window(order);
  for (int c : inputs) lo = std::min(lo, c - 4), hi = std::max(hi, c + 4);
  for (int c : classes) lo = std::min(lo, c), hi = std::max(hi, c);

  const std::size_t ns = samples.size();
  std::vector<std::vector<std::vector<double>>> raw(
      inputs.size(), std::vector<std::vector<double>>(ns, std::vector<double>(classes.size())));
  std::vector<std::unique_ptr<Propagator>> workers(static_cast<std::size_t>(resolve_jobs(jobs)));
  parallel_for(inputs.size() * ns, jobs, [&](std::size_t index, int w) {
    auto& propagator = workers[static_cast<std::size_t>(w)];
    if (!propagator) propagator = context.make_propagator();
    const std::size_t a = index / ns;
    const std::size_t s = index % ns;
    LadderState state = LadderState::basis(samples[s].momentum, lo, hi, inputs[a]);
    try {
      run_sequence(state, items, *propagator);
    } catch (const PropagationError& e) {
      throw PropagationError(std::string(e.what()) + " [input class " + std::to_string(inputs[a]) +
                             ", initial momentum " + std::to_string(inputs[a] + samples[s].momentum) +
                             " hbar k_eff]");
    }
    for (std::size_t k = 0; k < classes.size(); ++k) raw[a][s][k] = state.population(classes[k]);
  });
  return raw;
}

}  // namespace

EnsembleResult ensemble_average(std::span<const DimensionlessItem> items, int order,
                                const MomentumDistribution& dist, const Quadrature& quadrature,
                                const SimulationContext& context, int input_class,
                                std::span<const int> classes, int jobs) {
  require_distinct(classes);
  const auto samples = sample_distribution(dist, quadrature);
  const int inputs[] = {input_class};
  const auto raw =
      propagate_samples(items, std::max(order, max_order(items)), samples, inputs, classes, context, jobs);
  EnsembleResult result;
  std::vector<double> average(classes.size(), 0.0);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (std::size_t k = 0; k < classes.size(); ++k) average[k] += samples[s].weight * raw[0][s][k];
    result.samples.push_back({samples[s].momentum, samples[s].weight, raw[0][s]});
  }
  result.populations = finish(classes, std::move(average), 0.5);
  return result;
}

EnsembleResult ensemble_average(const Pulse& pulse, const MomentumDistribution& dist,
                                const Quadrature& quadrature, const SimulationContext& context,
                                int input_class, std::span<const int> classes, int jobs) {
  const DimensionlessItem items[] = {to_dimensionless(pulse, context.units())};
  return ensemble_average(items, pulse.order, dist, quadrature, context, input_class, classes, jobs);
}

double quadrature_change(const Pulse& pulse, const MomentumDistribution& dist,
                         const Quadrature& quadrature, const SimulationContext& context,
                         int input_class, std::span<const int> classes, int extra_nodes, int jobs) {
  Quadrature refined = quadrature;
  refined.nodes += extra_nodes;
  const auto a = ensemble_average(pulse, dist, quadrature, context, input_class, classes, jobs);
  const auto b = ensemble_average(pulse, dist, refined, context, input_class, classes, jobs);
  double change = 0.0;
  for (std::size_t k = 0; k < classes.size(); ++k)
    change = std::max(change, std::abs(a.populations.normalized[k] - b.populations.normalized[k]));
  return change;
}

double ReflectivityRecord::directional(int in, int out) const {
  if (in < 0 || out < 0 || in > order || out > order)
    throw ParameterError("reflectivity classes must lie in 0..n");
  return matrix[static_cast<std::size_t>(in)][static_cast<std::size_t>(out)];
}

double ReflectivityRecord::pair(int a, int b) const {
  return 0.5 * (directional(a, b) + directional(b, a));
}

ReflectivityRecord reflectivity_matrix(const Pulse& mirror, const MomentumDistribution& dist,
                                       const Quadrature& quadrature,
                                       const SimulationContext& context, int jobs) {
  const int n = mirror.order;
  const auto classes = class_range(0, n);
  const auto samples = sample_distribution(dist, quadrature);
  const DimensionlessItem items[] = {to_dimensionless(mirror, context.units())};
  const auto raw = propagate_samples(items, n, samples, classes, classes, context, jobs);

  ReflectivityRecord record;
  record.tau = mirror.duration();
  record.rabi = mirror.rabi;
  record.delta_omega = mirror.delta_omega;
  record.phase = mirror.phase;
  record.order = n;
  record.spread = dist.spread;
  record.backend = to_string(context.backend.kind);
  for (std::size_t a = 0; a < classes.size(); ++a) {
    std::vector<double> avg(classes.size(), 0.0);
    for (std::size_t s = 0; s < samples.size(); ++s)
      for (std::size_t k = 0; k < classes.size(); ++k) avg[k] += samples[s].weight * raw[a][s][k];
    const auto pops = finish(classes, avg, 0.5);
    record.raw.push_back(pops.raw);
    record.matrix.push_back(pops.normalized);
  }
  return record;
}

std::vector<ReflectivityRecord> robustness_curve(const Pulse& mirror, std::span<const double> spreads,
                                                 double mean, const Quadrature& quadrature,
                                                 const SimulationContext& context, int jobs) {
  if (spreads.empty()) throw ParameterError("momentum-spread grid is empty");
  if (!std::is_sorted(spreads.begin(), spreads.end()))
    throw ParameterError("momentum-spread grid must be ascending");
  std::vector<ReflectivityRecord> out;
  for (double dp : spreads)
    out.push_back(reflectivity_matrix(mirror, MomentumDistribution::gaussian(mean, dp), quadrature,
                                      context, jobs));
  return out;
}

}  // namespace bragg
