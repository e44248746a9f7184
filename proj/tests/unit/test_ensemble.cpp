#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bragg/ensemble.hpp"
#include "bragg/errors.hpp"

using namespace bragg;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

Pulse mirror(double rabi_khz = 23.0) {
  return on_resonance(3, 0.0, Envelope::blackman(90e-6), two_pi * rabi_khz * 1e3, default_rb87());
}

}  // namespace

TEST_SUITE("ensemble") {
  TEST_CASE("Gauss-Hermite moments") {
    for (int n : {20, 41}) {
      const auto [x, w] = gauss_hermite_rule(n);
      REQUIRE(x.size() == static_cast<std::size_t>(n));
      double m[7] = {};
      for (std::size_t i = 0; i < x.size(); ++i)
        for (int k = 0; k < 7; ++k) m[k] += w[i] * std::pow(x[i], k);
      CHECK(m[0] == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(std::abs(m[1]) < 1e-13);
      CHECK(m[2] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(m[3]) < 1e-12);
      CHECK(m[4] == doctest::Approx(3.0).epsilon(1e-12));
      CHECK(m[6] == doctest::Approx(15.0).epsilon(1e-11));
      CHECK(std::is_sorted(x.begin(), x.end()));
    }
  }

  TEST_CASE("distribution sampling") {
    CHECK(sample_distribution(MomentumDistribution::delta(0.2), {}).size() == 1);
    CHECK(MomentumDistribution::gaussian(0.0, 0.0).kind == DistributionKind::delta);
    CHECK_THROWS_AS(MomentumDistribution::gaussian(0.0, -0.1), ParameterError);
    CHECK_THROWS_AS(MomentumDistribution::tabulated({}), ParameterError);
    const auto t = MomentumDistribution::tabulated({{-0.1, 1.0}, {0.1, 3.0}});
    const auto s = sample_distribution(t, {});
    CHECK(s[1].weight == doctest::Approx(0.75));

    Quadrature mc{QuadratureKind::monte_carlo, 4000, 7};
    const auto g = MomentumDistribution::gaussian(0.05, 0.13);
    const auto a = sample_distribution(g, mc);
    const auto b = sample_distribution(g, mc);
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].momentum == b[i].momentum);
      mean += a[i].weight * a[i].momentum;
    }
    for (const auto& v : a) var += v.weight * (v.momentum - mean) * (v.momentum - mean);
    CHECK(mean == doctest::Approx(0.05).epsilon(0.15));
    CHECK(std::sqrt(var) == doctest::Approx(0.13).epsilon(0.05));
    mc.seed = 8;
    CHECK(sample_distribution(g, mc)[0].momentum != a[0].momentum);
  }

  TEST_CASE("class populations") {
    auto l = LadderState::basis(0.0, -2, 4, 0);
    l.amplitudes[2] = std::sqrt(0.2);
    l.amplitudes[3] = std::sqrt(0.3);
    l.amplitudes[0] = std::sqrt(0.5);
    const auto classes = class_range(0, 1);
    const auto pops = class_populations(l, classes);
    CHECK(pops.raw_total() == doctest::Approx(0.5));
    CHECK(pops[0] == doctest::Approx(0.4));
    CHECK(pops[1] == doctest::Approx(0.6));
    CHECK_THROWS_AS(pops[5], ParameterError);

    const auto packet = GridState::gaussian_packet(Grid(512, 8), 1.0, 0.13);
    const auto all = class_range(-1, 2);
    const auto gp = class_populations(packet, 0.5, all);
    // Discrete Gaussian weights on the comb p = m / 8, bin [0.5, 1.5).
    double inside = 0.0, total = 0.0;
    for (int m = -256; m < 256; ++m) {
      const double p = m / 8.0, w = std::exp(-(p - 1.0) * (p - 1.0) / (2.0 * 0.13 * 0.13));
      total += w;
      if (p >= 0.5 && p < 1.5) inside += w;
    }
    CHECK(gp[1] == doctest::Approx(inside / total).epsilon(1e-12));
    CHECK(gp.raw_total() == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("delta ensemble is a single ladder solve") {
    const SimulationContext ctx;
    const auto pulse = mirror();
    const auto classes = class_range(0, 3);
    const auto e = ensemble_average(pulse, MomentumDistribution::delta(0.04), {}, ctx, 0, classes);
    auto l = LadderState::basis(0.04, -7, 10, 0);
    integrate_ladder(l, to_dimensionless(pulse, ctx.units()));
    for (int c = 0; c <= 3; ++c) CHECK(e.populations.raw_value(c) == doctest::Approx(l.population(c)).epsilon(1e-9));
    const auto z = ensemble_average(pulse, MomentumDistribution::gaussian(0.04, 0.0), {}, ctx, 0, classes);
    CHECK(z.populations.raw == e.populations.raw);
  }

  TEST_CASE("Gaussian ensemble is the weighted sum of ladder solves") {
    const SimulationContext ctx;
    const auto pulse = mirror();
    const auto p = to_dimensionless(pulse, ctx.units());
    const auto classes = class_range(0, 3);
    const Quadrature quad{QuadratureKind::gauss_hermite, 15, 1};
    const auto e = ensemble_average(pulse, MomentumDistribution::gaussian(0.0, 0.13), quad, ctx, 1, classes, 3);
    const auto [x, w] = gauss_hermite_rule(15);
    std::vector<double> expect(4, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto l = LadderState::basis(0.13 * x[i], -8, 12, 1);
      integrate_ladder(l, p);
      for (int c = 0; c <= 3; ++c) expect[static_cast<std::size_t>(c)] += w[i] * l.population(c);
    }
    for (int c = 0; c <= 3; ++c)
      CHECK(e.populations.raw_value(c) == doctest::Approx(expect[static_cast<std::size_t>(c)]).epsilon(1e-8));
    CHECK(e.samples.size() == 15);
  }

  TEST_CASE("zero coupling gives the identity matrix") {
    const SimulationContext ctx;
    const auto r = reflectivity_matrix(mirror(0.0), MomentumDistribution::gaussian(0.0, 0.13),
                                       {QuadratureKind::gauss_hermite, 9, 1}, ctx);
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; b <= 3; ++b) CHECK(r.directional(a, b) == doctest::Approx(a == b ? 1.0 : 0.0));
    CHECK_THROWS_AS(r.directional(4, 0), ParameterError);
  }

  TEST_CASE("reflectivities are normalized and symmetric in the pair average") {
    const SimulationContext ctx;
    const auto r = reflectivity_matrix(mirror(), MomentumDistribution::gaussian(0.0, 0.13),
                                       {QuadratureKind::gauss_hermite, 11, 1}, ctx, 2);
    for (int a = 0; a <= 3; ++a) {
      double s = 0.0;
      for (int b = 0; b <= 3; ++b) s += r.directional(a, b);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(r.pair(0, 3) == r.pair(3, 0));
    CHECK(r.pair(0, 3) > 0.5);
  }

  TEST_CASE("results do not depend on the worker count") {
    SimulationContext ctx;
    const auto pulse = mirror();
    const Quadrature quad{QuadratureKind::gauss_hermite, 12, 1};
    const auto dist = MomentumDistribution::gaussian(0.0, 0.13);
    const auto a = reflectivity_matrix(pulse, dist, quad, ctx, 1);
    const auto b = reflectivity_matrix(pulse, dist, quad, ctx, 4);
    CHECK(a.raw == b.raw);
  }

  TEST_CASE("grid backend agrees with the ladder backend") {
    SimulationContext ladder;
    SimulationContext grid;
    grid.backend.kind = BackendKind::grid;
    grid.backend.grid.tol = 1e-10;
    const Quadrature quad{QuadratureKind::gauss_hermite, 5, 1};
    const auto dist = MomentumDistribution::gaussian(0.0, 0.13);
    const auto a = reflectivity_matrix(mirror(), dist, quad, ladder);
    const auto b = reflectivity_matrix(mirror(), dist, quad, grid, 2);
    for (int i = 0; i <= 3; ++i)
      for (int j = 0; j <= 3; ++j) CHECK(std::abs(a.directional(i, j) - b.directional(i, j)) < 1e-6);
    CHECK(b.backend == "grid");
  }

  TEST_CASE("quadrature convergence and spread validation") {
    const SimulationContext ctx;
    const auto classes = class_range(0, 3);
    const auto change = quadrature_change(mirror(), MomentumDistribution::gaussian(0.0, 0.13),
                                          {QuadratureKind::gauss_hermite, 41, 1}, ctx, 0, classes, 8, 4);
    CHECK(change < 1e-4);
    const double bad[] = {0.2, 0.1};
    CHECK_THROWS_AS(robustness_curve(mirror(), bad, 0.0, {}, ctx), ParameterError);
  }
}
