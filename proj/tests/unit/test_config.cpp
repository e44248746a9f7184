#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "bragg/config.hpp"
#include "bragg/errors.hpp"
#include "bragg/manifest.hpp"
#include "bragg/table.hpp"

using namespace bragg;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("quantities") {
    CHECK(parse_time("90 us") == doctest::Approx(90e-6));
    CHECK(parse_time("1.5ms") == doctest::Approx(1.5e-3));
    CHECK(parse_angular_frequency("2*pi*21 kHz") == doctest::Approx(131946.9).epsilon(1e-3));
    CHECK(parse_angular_frequency("21 kHz") == parse_angular_frequency("2*pi*21 kHz"));
    CHECK(parse_angular_frequency("21 kHz_x2pi") == parse_angular_frequency("21 kHz"));
    CHECK(parse_angular_frequency("2π×21 kHz") == parse_angular_frequency("21 kHz"));
    CHECK(parse_angular_frequency("131.9 krad/s") == doctest::Approx(131900.0));
    CHECK(parse_length("780.226 nm") == doctest::Approx(780.226e-9));
    CHECK(parse_mass("86.909 u") == doctest::Approx(86.909 * constants::atomic_mass_unit));
    CHECK_THROWS_AS(parse_time("90"), ConfigError);
    CHECK_THROWS_AS(parse_time("90 kHz"), ConfigError);
    CHECK_THROWS_AS(parse_angular_frequency("2*pi*5 rad/s"), ConfigError);
  }

  TEST_CASE("minimal configuration takes the defaults") {
    const auto c = parse_config_text("[pulse]\norder = 3\n");
    CHECK(c.pulse.order == 3);
    CHECK(c.pulse.tau == doctest::Approx(90e-6));
    CHECK(c.ensemble.distribution.spread == doctest::Approx(0.13));
    CHECK(c.ensemble.quadrature.nodes == 41);
    CHECK(c.propagator.kind == BackendKind::ladder);
    CHECK(c.scan.criterion.parasitic.size() == 1);
    const auto empty = parse_config_text("");
    CHECK(empty.physics.k_eff() == doctest::Approx(default_rb87().k_eff()));
  }

  TEST_CASE("a full configuration") {
    const auto c = parse_config_text(R"(
[physics]
preset = "rb87"
[pulse]
order = 5
tau = "120 us"
rabi = "2*pi*21 kHz"
rabi_convention = "peak"
[sequence]
t_free = "1 ms"
phases = [0.0, 0.1, 0.2]
[ensemble]
distribution = "gaussian"
spread = 0.2
nodes = 21
[propagator]
backend = "grid"
tol = 1e-9
scheme = "strang"
grid_points = 1024
[scan]
tau_count = 4
rabi_count = 5
split_after = [0, 1]
[output]
jobs = 3
)");
    CHECK(c.pulse.order == 5);
    CHECK(c.pulse.rabi == doctest::Approx(two_pi * 21e3));
    CHECK(c.pulse.convention == RabiConvention::peak);
    CHECK(c.sequence.t_free == doctest::Approx(1e-3));
    CHECK(c.sequence.phases[2] == 0.2);
    CHECK(c.propagator.grid.tol == 1e-9);
    CHECK(c.propagator.grid.scheme.name == "strang");
    CHECK(c.scan.criterion.parasitic.size() == 2);
    CHECK(c.scan.paths.split_after == std::vector<int>{0, 1});
    CHECK(c.output.jobs == 3);
    const auto p = c.pulse.make(c.physics);
    CHECK(p.delta_omega == doctest::Approx(resonance_delta_omega(5, 0.0, c.physics)));
  }

  TEST_CASE("errors name the key, the unit and an example") {
    const auto neg = error_of("[pulse]\ntau = \"-1 us\"\n");
    CHECK(neg.find("pulse.tau") != std::string::npos);
    CHECK(neg.find("s, ms, us, ns") != std::string::npos);
    CHECK(neg.find("e.g. tau = \"90 us\"") != std::string::npos);
    CHECK(neg.find("-1 us") != std::string::npos);
    CHECK(error_of("[pulse]\ntau = \"90\"\n").find("pulse.tau") != std::string::npos);
    CHECK(error_of("[pulse]\ntau = 90e-6\n").find("pulse.tau") != std::string::npos);
    CHECK(error_of("[pulse]\ntaux = \"90 us\"\n").find("unknown key 'pulse.taux'") != std::string::npos);
    CHECK(error_of("[pulses]\n").find("unknown section 'pulses'") != std::string::npos);
    CHECK(error_of("[pulse]\norder = 0\n").find("pulse.order") != std::string::npos);
    CHECK(error_of("[propagator]\ngrid_points = 500\n").find("power of two") != std::string::npos);
    CHECK(error_of("[scan]\ninputs = [0, 4]\n").find("scan.inputs") != std::string::npos);
    CHECK(error_of("[pulse\n").find("config:1") != std::string::npos);
    CHECK_THROWS_AS(parse_config("/nonexistent/run.toml"), ConfigError);
  }

  TEST_CASE("overrides") {
    const auto c = parse_config_text("[pulse]\norder = 3\n",
                                     {{"pulse.rabi", "21 kHz"}, {"ensemble.nodes", "11"}, {"scan.refine", "local"}});
    CHECK(c.pulse.rabi == doctest::Approx(two_pi * 21e3));
    CHECK(c.ensemble.quadrature.nodes == 11);
    CHECK(c.scan.refine == Refinement::local);
    CHECK_THROWS_AS(parse_config_text("", {{"nodes", "3"}}), ConfigError);
    CHECK_THROWS_AS(parse_config_text("", {{"bogus.nodes", "3"}}), ConfigError);
  }

  TEST_CASE("rendered configuration parses back to itself") {
    const auto c = parse_config_text("[pulse]\nrabi = \"2*pi*21.37 kHz\"\n[ensemble]\nspread = 0.07\n[scan]\nkeep_classes = [0, 3]\n");
    const auto text = render_config(c);
    const auto again = parse_config_text(text);
    CHECK(again.pulse.rabi == c.pulse.rabi);
    CHECK(again.ensemble.distribution.spread == c.ensemble.distribution.spread);
    CHECK(again.scan.paths.keep_classes == c.scan.paths.keep_classes);
    CHECK(render_config(again) == text);
  }

  TEST_CASE("result tables round trip") {
    ResultTable t("demo", {{"tau_us", "us"}, {"R_0_3", "1"}});
    t.set_meta("order", "3");
    t.set_manifest_hash("0123456789abcdef");
    t.add_row({90.0, 1.0 / 3.0});
    t.add_row({120.5, 6.02214076e-23});
    const auto back = ResultTable::parse(t.render());
    CHECK(back.title() == "demo");
    CHECK(back.manifest_hash() == "0123456789abcdef");
    CHECK(back.columns()[0].unit == "us");
    CHECK(back.number(0, back.column("R_0_3")) == 1.0 / 3.0);
    CHECK(std::abs(back.number(1, 1) - 6.02214076e-23) <= 1e-15 * 6.02214076e-23);
    CHECK(back.meta().front().second == "3");
    CHECK_THROWS(back.column("missing"));
    CHECK_THROWS(t.add_row({1.0}));
  }

  TEST_CASE("manifest hash ignores timing and worker count") {
    RunManifest a;
    a.command = "map";
    a.config = "[pulse]\norder = 3\n";
    a.jobs = 1;
    a.timestamp = "2026-01-01T00:00:00Z";
    a.wall_time = 3.0;
    RunManifest b = a;
    b.jobs = 8;
    b.timestamp = utc_timestamp();
    b.wall_time = 99.0;
    CHECK(a.hash() == b.hash());
    b.config += "[ensemble]\nnodes = 3\n";
    CHECK(a.hash() != b.hash());
    CHECK(a.to_json().find("\"jobs\": 1") != std::string::npos);
    CHECK(utc_timestamp().back() == 'Z');
  }
}
