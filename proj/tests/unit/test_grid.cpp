#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bragg/checks.hpp"
#include "bragg/errors.hpp"
#include "bragg/grid.hpp"
#include "bragg/ladder.hpp"

using namespace bragg;

namespace {

PulseParams mirror_pulse() {
  const auto cfg = default_rb87();
  const auto p = on_resonance(3, 0.0, Envelope::blackman(90e-6), 2.0 * std::numbers::pi * 23e3, cfg);
  return to_dimensionless(p, UnitSystem(cfg));
}

PulseParams short_pulse() {
  PulseParams p;
  p.envelope = Envelope::blackman(3.0);
  p.peak_rabi = 2.5;
  p.delta_omega = 1.0;
  p.order = 1;
  return p;
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("splitting coefficients") {
    for (const auto& s : {SplittingScheme::strang(), SplittingScheme::pp34a()}) {
      CHECK(sum(s.a) == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(sum(s.b) == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(s.is_palindromic());
      CHECK_NOTHROW(s.validate());
    }
    auto bad = SplittingScheme::strang();
    bad.b = {0.7, 0.0};
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    CHECK_THROWS_AS(SplittingScheme::from_name("yoshida"), ConfigError);
    CHECK(SplittingScheme::from_name("pp34a").order == 4);
  }

  TEST_CASE("Nyquist requirement") {
    CHECK_THROWS_AS(Grid(64, 8).require_nyquist(3), ParameterError);
    CHECK_NOTHROW(Grid(512, 8).require_nyquist(5));
    CHECK_THROWS_AS(Grid(64, 8).comb_bin(4), ParameterError);
  }

  TEST_CASE("ladder embedding is on the comb") {
    auto l = LadderState::basis(0.1, -3, 5, 2);
    l.amplitudes[0] = Complex(0.0, 0.5);
    const auto g = GridState::from_ladder(l, 256, 8);
    CHECK(g.norm() == doctest::Approx(l.norm()).epsilon(1e-13));
    CHECK(g.off_comb_population() < 1e-28);
    const auto back = g.to_ladder(-3, 5);
    for (int j = -3; j <= 5; ++j) CHECK(std::abs(back.amplitude(j) - l.amplitude(j)) < 1e-14);
    const auto packet = GridState::gaussian_packet(Grid(256, 8), 0.0, 0.13);
    CHECK(packet.off_comb_population() > 0.5);
  }

  TEST_CASE("plane-wave grid agrees with the ladder") {
    const auto p = mirror_pulse();
    GridOptions opt;
    opt.tol = 1e-10;
    const GridPropagator prop(opt);
    for (double q : {0.0, 0.21}) {
      auto ladder = LadderState::basis(q, -7, 10, 0);
      auto grid = GridState::from_ladder(ladder, opt.num_points, opt.periods);
      integrate_ladder(ladder, p);
      prop.propagate_pulse(grid, p);
      const auto g = grid.to_ladder(-7, 10);
      for (int j = -7; j <= 10; ++j) CHECK(std::abs(g.amplitude(j) - ladder.amplitude(j)) < 1e-6);
      CHECK(grid.time == doctest::Approx(ladder.time));
    }
  }

  TEST_CASE("free Gaussian packet spreads as sigma^2 + 4 sigma_p^2 t^2") {
    const double sp = 0.3, t = 10.0;
    const Grid grid(1024, 32);
    auto s = GridState::gaussian_packet(grid, 0.0, sp);
    const auto variance = [&](const GridState& st) {
      const double L = st.grid().length();
      double m2 = 0.0;
      for (int i = 0; i < st.grid().size(); ++i) {
        double x = st.grid().position(i);
        if (x > 0.5 * L) x -= L;
        m2 += std::norm(st.values()[static_cast<std::size_t>(i)]) * x * x;
      }
      return m2 / st.grid().size() / st.norm();
    };
    const double s0 = 1.0 / (4.0 * sp * sp);
    CHECK(variance(s) == doctest::Approx(s0).epsilon(1e-6));
    GridPropagator(GridOptions{}).free_evolve(s, t);
    CHECK(variance(s) == doctest::Approx(s0 + 4.0 * sp * sp * t * t).epsilon(1e-6));
    CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-13));
  }

  TEST_CASE("coherent packet equals the sum of independent ladders") {
    // each comb residue is its own ladder
    const auto p = mirror_pulse();
    GridOptions opt;
    opt.tol = 1e-10;
    const Grid grid(opt.num_points, opt.periods);
    auto packet = GridState::gaussian_packet(grid, 0.0, 0.13);
    const auto c0 = packet.momentum_amplitudes();
    GridPropagator(opt).propagate_pulse(packet, p);
    const auto c1 = packet.momentum_amplitudes();
    const int N = grid.size(), P = grid.periods();
    const auto bin = [&](int signed_m) { return static_cast<std::size_t>(((signed_m % N) + N) % N); };
    double worst = 0.0;
    for (int r = -P / 2; r < P / 2; ++r) {
      const double q = static_cast<double>(r) / P;
      LadderState l = LadderState::basis(q, -7, 10, 0);
      for (int j = -7; j <= 10; ++j) l.amplitudes[static_cast<std::size_t>(j + 7)] = c0[bin(j * P + r)];
      integrate_ladder(l, p);
      for (int j = -7; j <= 10; ++j) worst = std::max(worst, std::abs(l.amplitude(j) - c1[bin(j * P + r)]));
    }
    CHECK(worst < 1e-6);
  }

  TEST_CASE("norm conservation") {
    CHECK(grid_norm_drift(mirror_pulse()) < 1e-10);
  }

  TEST_CASE("convergence orders") {
    GridOptions opt;
    opt.num_points = 256;
    opt.scheme = SplittingScheme::strang();
    const auto strang = convergence_study(short_pulse(), opt, 100);
    CHECK(strang.slope > 1.8);
    opt.scheme = SplittingScheme::pp34a();
    const auto pp = convergence_study(short_pulse(), opt, 100);
    CHECK(pp.slope > 3.8);
    CHECK(pp.errors.back() < strang.errors.back());
  }

  TEST_CASE("forward then backward returns to the start") {
    GridOptions opt;
    opt.num_points = 256;
    opt.scheme = SplittingScheme::strang();
    CHECK(palindromic_return_error(short_pulse(), opt, 100) < 1e-12);
    opt.scheme = SplittingScheme::pp34a();
    CHECK(palindromic_return_error(short_pulse(), opt, 400) < 1e-8);
  }
}
