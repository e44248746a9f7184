#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bragg/table.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("bragg_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(BRAGG_CLI) + " " + args + " > " + (log.string() + ".out") + " 2> " +
                          (log.string() + ".err");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto p = dir / "run.toml";
  std::ofstream(p) << text;
  return p;
}

const char* kSmallMap = R"([pulse]
order = 3
[ensemble]
spread = 0.13
nodes = 5
[scan]
tau_min = "80 us"
tau_max = "100 us"
tau_count = 2
rabi_min = "2*pi*18 kHz"
rabi_max = "2*pi*24 kHz"
rabi_count = 3
spot_checks = 1
)";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("map output does not depend on the worker count") {
    const auto dir = scratch("map");
    const auto cfg = write_config(dir, kSmallMap);
    REQUIRE(run("map --config " + cfg.string() + " --jobs 1 --out " + (dir / "a").string(), dir / "a") == 0);
    REQUIRE(run("map --config " + cfg.string() + " --jobs 2 --out " + (dir / "b").string(), dir / "b") == 0);
    const auto a = slurp(dir / "a" / "map.tsv");
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(dir / "b" / "map.tsv"));

    const auto t = bragg::ResultTable::read(dir / "a" / "map.tsv");
    CHECK(t.rows().size() == 6);
    CHECK(t.columns()[0].name == "tau_us");
    CHECK(t.columns()[0].unit == "us");
    CHECK(t.columns()[1].name == "omega_over_2pi_kHz");
    CHECK(t.column("R_0_3") == 2);
    CHECK(t.column("R_1_2") == 3);
    CHECK(t.column("failed") == 4);
    CHECK(t.number(0, 1) == doctest::Approx(18.0));
    CHECK(t.manifest_hash().size() == 16);
    const auto manifest = slurp(dir / "a" / "manifest.json");
    CHECK(manifest.find(t.manifest_hash()) != std::string::npos);
    CHECK(manifest.find("spot_checks") != std::string::npos);
  }

  TEST_CASE("dotted overrides reach the configuration") {
    const auto dir = scratch("override");
    const auto cfg = write_config(dir, kSmallMap);
    REQUIRE(run("rabi-scan --config " + cfg.string() + " --out " + dir.string() + " --scan.rabi_count 4 --ensemble.nodes 3",
                dir / "log") == 0);
    const auto t = bragg::ResultTable::read(dir / "rabi_scan.tsv");
    CHECK(t.rows().size() == 4);
  }

  TEST_CASE("oracle-diff exit status follows the threshold") {
    const auto dir = scratch("oracle");
    const auto cfg = write_config(dir, "[pulse]\norder = 1\ntau = \"30 us\"\nrabi = \"2*pi*10 kHz\"\n");
    CHECK(run("oracle-diff --config " + cfg.string() + " --out " + dir.string(), dir / "ok") == 0);
    CHECK(run("oracle-diff --config " + cfg.string() + " --out " + dir.string() + " --threshold 1e-30", dir / "strict") == 1);
    CHECK(fs::exists(dir / "oracle_diff.tsv"));
  }

  TEST_CASE("configuration errors exit with status 2 and a JSON message") {
    const auto dir = scratch("error");
    const auto cfg = write_config(dir, "[pulse]\ntau = \"-1 us\"\n");
    CHECK(run("map --config " + cfg.string() + " --out " + dir.string(), dir / "neg") == 2);
    const auto err = slurp(dir / "neg.err");
    CHECK(err.find("{\"error\"") != std::string::npos);
    CHECK(err.find("pulse.tau") != std::string::npos);
    CHECK(err.find("\"config\"") != std::string::npos);
    CHECK(run("map --out " + dir.string() + " --pulse.bogus 1", dir / "key") == 2);
    CHECK(slurp(dir / "key.err").find("unknown key 'pulse.bogus'") != std::string::npos);
  }
}
