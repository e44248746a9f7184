#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bragg/errors.hpp"
#include "bragg/units.hpp"

using namespace bragg;

TEST_SUITE("units") {
  TEST_CASE("k_eff is 4 pi / lambda") {
    const auto cfg = default_rb87();
    CHECK(cfg.k_eff() == doctest::Approx(4.0 * std::numbers::pi / 780.226e-9).epsilon(1e-14));
  }

  TEST_CASE("Rb-87 recoil frequency") {
    const auto cfg = default_rb87();
    const double m = 86.90918053 * 1.660539067e-27;
    const double k = 4.0 * std::numbers::pi / 780.226e-9;
    const double expected = 1.054571817e-34 * k * k / (2.0 * m);
    CHECK(cfg.recoil_angular_frequency() == doctest::Approx(expected).epsilon(1e-13));
    CHECK(cfg.recoil_angular_frequency() / (2.0 * std::numbers::pi) == doctest::Approx(15084.5).epsilon(1e-4));
  }

  TEST_CASE("invalid physical constants are rejected") {
    CHECK_THROWS_AS(PhysicalConfig(-1.0, 780e-9, "x"), ParameterError);
    CHECK_THROWS_AS(PhysicalConfig(1e-25, 0.0, "x"), ParameterError);
  }

  TEST_CASE("unit system round trip") {
    const UnitSystem u(default_rb87());
    for (auto kind : {QuantityKind::time, QuantityKind::momentum, QuantityKind::frequency, QuantityKind::length,
                      QuantityKind::energy}) {
      const double v = 1.234e-5;
      CHECK(u.to_si(u.to_dimensionless(v, kind), kind) == doctest::Approx(v).epsilon(1e-14));
    }
    // One recoil energy is hbar omega_k; a 1/omega_k time times omega_k is 1.
    const auto cfg = default_rb87();
    CHECK(u.to_dimensionless(1.0 / cfg.recoil_angular_frequency(), QuantityKind::time) == doctest::Approx(1.0));
    CHECK(u.momentum_unit() == doctest::Approx(1.054571817e-34 * cfg.k_eff()));
  }

  TEST_CASE("quantity kind names") {
    CHECK(parse_quantity_kind("time") == QuantityKind::time);
    CHECK(parse_quantity_kind("frequency") == QuantityKind::frequency);
    CHECK_THROWS_AS(parse_quantity_kind("colour"), ConfigError);
  }
}
