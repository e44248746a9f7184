#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bragg/checks.hpp"
#include "bragg/config.hpp"
#include "bragg/errors.hpp"
#include "bragg/hash.hpp"
#include "bragg/interferometer.hpp"
#include "bragg/manifest.hpp"
#include "bragg/parallel.hpp"
#include "bragg/scans.hpp"
#include "bragg/table.hpp"

namespace fs = std::filesystem;
using namespace bragg;

namespace {

constexpr double kUs = 1e-6;
const double kKhz = 2.0 * std::numbers::pi * 1e3;

struct Common {
  std::string config;
  std::string out;
  int jobs = -1;
};

struct Run {
  std::string name;
  RunConfig cfg;
  fs::path out;
  int jobs = 1;
  RunManifest manifest;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

std::vector<Override> collect_overrides(const std::vector<std::string>& extras) {
  std::vector<Override> out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& a = extras[i];
    if (a.rfind("--", 0) != 0 || a.find('.') == std::string::npos)
      throw ConfigError("unexpected argument '" + a + "' (overrides look like --section.key value)");
    const auto eq = a.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(a.substr(2, eq - 2), a.substr(eq + 1));
    } else {
      if (i + 1 >= extras.size()) throw ConfigError("override '" + a + "' needs a value");
      out.emplace_back(a.substr(2), extras[++i]);
    }
  }
  return out;
}

Run start(const std::string& name, const Common& common, std::vector<Override> overrides) {
  Run run;
  run.name = name;
  run.cfg = common.config.empty() ? parse_config_text("", overrides) : parse_config(common.config, overrides);
  run.jobs = resolve_jobs(common.jobs >= 0 ? common.jobs : run.cfg.output.jobs);
  if (!common.out.empty()) {
    run.out = common.out;
  } else if (!run.cfg.output.directory.empty()) {
    run.out = run.cfg.output.directory;
  } else {
    const char* root = std::getenv("BRAGG_OUTPUT_ROOT");
    run.out = fs::path(root && *root ? root : "results") / name;
  }
  fs::create_directories(run.out);

  RunConfig reproducible = run.cfg;
  reproducible.output = {};
  auto& m = run.manifest;
  m.command = name;
  m.config = render_config(reproducible);
  m.backend = to_string(run.cfg.propagator.kind);
  m.scheme = run.cfg.propagator.grid.scheme.name;
  m.tolerance = run.cfg.propagator.kind == BackendKind::ladder ? run.cfg.propagator.ladder.abs_tol
                                                               : run.cfg.propagator.grid.tol;
  m.seed = run.cfg.ensemble.quadrature.seed;
  m.jobs = run.jobs;
  m.timestamp = utc_timestamp();
  return run;
}

void save(Run& run, ResultTable& table, const std::string& file) {
  table.set_manifest_hash(run.manifest.hash());
  table.write(run.out / file);
  run.manifest.outputs.push_back(file);
}

void finish(Run& run) {
  run.manifest.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - run.start).count();
  run.manifest.write(run.out / "manifest.json");
  std::cout << "wrote " << (run.out / "manifest.json").string() << '\n';
}

std::string pair_name(ClassPair p) {
  return "R_" + std::to_string(p.first) + "_" + std::to_string(p.second);
}

void describe_ensemble(ResultTable& t, const RunConfig& cfg) {
  t.set_meta("order", std::to_string(cfg.pulse.order));
  t.set_meta("spread_hbar_k", exact(cfg.ensemble.distribution.spread));
  t.set_meta("backend", to_string(cfg.propagator.kind));
}

int cmd_rabi_scan(Run& run) {
  const auto& c = run.cfg;
  const int n = c.pulse.order;
  const auto rabis = c.scan.rabi.values();
  const auto scan = rabi_scan(c.context(), n, c.pulse.tau, rabis, c.ensemble.distribution,
                              c.ensemble.quadrature, run.jobs);
  std::vector<Column> cols{{"omega_over_2pi_kHz", "kHz"}};
  for (int k = 0; k <= n; ++k) cols.push_back({"P_" + std::to_string(k), "1"});
  cols.push_back({"failed", "1"});
  ResultTable t("rabi-scan", cols);
  describe_ensemble(t, c);
  t.set_meta("tau_us", exact(c.pulse.tau / kUs));
  for (const auto& row : scan.rows) {
    std::vector<double> v{row.rabi / kKhz};
    v.insert(v.end(), row.populations.begin(), row.populations.end());
    v.push_back(row.failed ? 1.0 : 0.0);
    if (row.failed) run.manifest.failures.push_back(exact(row.rabi / kKhz) + " kHz: " + row.error);
    t.add_row(v);
  }
  if (const auto m = first_maximum(scan, n)) {
    t.set_meta("first_maximum_P_n", exact(m->value));
    t.set_meta("first_maximum_kHz", exact(m->rabi / kKhz));
    std::printf("first maximum of class %d: %.4f at Omega_R = 2pi x %.3f kHz\n", n, m->value, m->rabi / kKhz);
  } else {
    std::printf("no maximum of class %d inside the scan\n", n);
  }
  save(run, t, "rabi_scan.tsv");
  return 0;
}

ScanResult compute_map(Run& run) {
  const auto& c = run.cfg;
  std::optional<NodeCache> cache;
  if (c.scan.cache) cache.emplace((run.out / "nodes.cache").string());
  const auto taus = c.scan.tau.values();
  const auto rabis = c.scan.rabi.values();
  auto map = reflectivity_map(c.context(), c.pulse.order, taus, rabis, default_pairs(c.pulse.order),
                              c.ensemble.distribution, c.ensemble.quadrature, run.jobs,
                              cache ? &*cache : nullptr);

  std::vector<Column> cols{{"tau_us", "us"}, {"omega_over_2pi_kHz", "kHz"}};
  for (const auto& p : map.pairs) cols.push_back({pair_name(p), "1"});
  cols.push_back({"failed", "1"});
  ResultTable t("map", cols);
  describe_ensemble(t, c);
  for (std::size_t i = 0; i < taus.size(); ++i)
    for (std::size_t j = 0; j < rabis.size(); ++j) {
      const auto& node = map.node(i, j);
      std::vector<double> v{taus[i] / kUs, rabis[j] / kKhz};
      for (const auto& p : map.pairs) v.push_back(map.value(i, j, p));
      v.push_back(node.failed ? 1.0 : 0.0);
      if (node.failed)
        run.manifest.failures.push_back(exact(taus[i] / kUs) + " us, " + exact(rabis[j] / kKhz) +
                                        " kHz: " + node.error);
      t.add_row(v);
    }
  save(run, t, "map.tsv");

  ResultTable labels("area-labels", {{"pair", "label"}, {"tau_us", "us"}, {"omega_over_2pi_kHz", "kHz"},
                                     {"multiple_of_pi", "1"}, {"kind", "label"}});
  for (const auto& p : map.pairs)
    for (const auto& l : pulse_area_labels(map, p))
      labels.add_text_row({pair_name(p), exact(l.tau / kUs), exact(l.rabi / kKhz), std::to_string(l.multiple),
                           l.maximum ? "ridge" : "valley"});
  save(run, labels, "area_labels.tsv");

  if (c.scan.spot_checks > 0) {
    for (const auto& chk : spot_check_nodes(map, c.context(), c.scan.spot_checks, c.ensemble.quadrature.seed, run.jobs))
      run.manifest.spot_checks.push_back({chk.tau, chk.rabi, chk.deviation, chk.deviation < 1e-3});
  }
  return map;
}

int report_spot_checks(const Run& run) {
  bool ok = true;
  for (const auto& s : run.manifest.spot_checks) {
    std::printf("spot check %.3f us, 2pi x %.3f kHz: grid vs ladder %.3e %s\n", s.tau / kUs, s.rabi / kKhz,
                s.max_deviation, s.passed ? "ok" : "FAILED");
    ok = ok && s.passed;
  }
  return ok ? 0 : 1;
}

int cmd_map(Run& run) {
  const auto map = compute_map(run);
  std::printf("map: %zu x %zu nodes, %zu failed\n", map.taus.size(), map.rabis.size(), map.failures());
  return report_spot_checks(run);
}

int cmd_dmp_find(Run& run) {
  const auto& c = run.cfg;
  const auto map = compute_map(run);
  const auto ctx = c.context();
  const auto dmp = find_dmp(map, c.scan.criterion, c.scan.refine, &ctx, &c.ensemble.distribution,
                            &c.ensemble.quadrature);
  std::vector<Column> cols{{"tau_us", "us"}, {"omega_over_2pi_kHz", "kHz"}, {pair_name(c.scan.criterion.resonant), "1"}};
  for (const auto& p : c.scan.criterion.parasitic) cols.push_back({pair_name(p), "1"});
  cols.push_back({"objective", "1"});
  cols.push_back({"dichroic_ratio", "1"});
  cols.push_back({"refined", "1"});
  ResultTable t("dmp", cols);
  describe_ensemble(t, c);
  t.set_meta("result", dmp.message);
  if (dmp.found) {
    std::vector<double> v{dmp.tau / kUs, dmp.rabi / kKhz, dmp.resonant};
    v.insert(v.end(), dmp.parasitic.begin(), dmp.parasitic.end());
    v.push_back(dmp.objective);
    v.push_back(dmp.dichroic_ratio);
    v.push_back(dmp.refined ? 1.0 : 0.0);
    t.add_row(v);
    std::printf("DMP: tau = %.3f us, Omega_R = 2pi x %.3f kHz, %s = %.4f", dmp.tau / kUs, dmp.rabi / kKhz,
                pair_name(c.scan.criterion.resonant).c_str(), dmp.resonant);
    for (std::size_t k = 0; k < dmp.parasitic.size(); ++k)
      std::printf(", %s = %.4f", pair_name(c.scan.criterion.parasitic[k]).c_str(), dmp.parasitic[k]);
    std::printf(", dichroic ratio = %.3g (%s)\n", dmp.dichroic_ratio, dmp.message.c_str());
  } else {
    std::printf("%s\n", dmp.message.c_str());
  }
  save(run, t, "dmp.tsv");
  return report_spot_checks(run);
}

int cmd_mirror_response(Run& run) {
  const auto& c = run.cfg;
  const int n = c.pulse.order;
  std::vector<int> inputs = c.scan.inputs;
  if (inputs.empty()) inputs = class_range(0, n);
  const auto rows = mirror_response(inputs, c.pulse.make(c.physics), c.ensemble.distribution,
                                    c.ensemble.quadrature, c.context(), run.jobs);
  ResultTable t("mirror-response", {{"input", "1"}, {"class", "1"}, {"before", "1"}, {"after", "1"}});
  describe_ensemble(t, c);
  t.set_meta("tau_us", exact(c.pulse.tau / kUs));
  t.set_meta("omega_over_2pi_kHz", exact(c.pulse.rabi / kKhz));
  for (const auto& r : rows) {
    for (int k = 0; k <= n; ++k)
      t.add_row({double(r.input), double(k), r.before[static_cast<std::size_t>(k)], r.after[static_cast<std::size_t>(k)]});
    std::printf("input class %d -> dominant output class %d (%.4f)\n", r.input, r.dominant,
                r.after[static_cast<std::size_t>(r.dominant)]);
  }
  save(run, t, "mirror_response.tsv");
  return 0;
}

struct MziFlags {
  bool path_resolved = false;
  bool phi3_scan = false;
  std::string readout = "output";
};

int cmd_mzi(Run& run, const MziFlags& flags) {
  const auto& c = run.cfg;
  const int n = c.pulse.order;
  const auto seq = mach_zehnder_sequence(c.sequence.params(c.pulse), c.physics);
  const auto ctx = c.context();
  if (flags.path_resolved) run.manifest.command += " --path-resolved";
  if (flags.phi3_scan) run.manifest.command += " --phi3-scan --readout " + flags.readout;

  const auto coherent = run_mzi(seq, n, c.ensemble.distribution, c.ensemble.quadrature, ctx, run.jobs);
  ResultTable ports("mzi-ports", {{"mode", "label"}, {"port_0", "1"}, {"port_n", "1"}, {"undetected", "1"}});
  describe_ensemble(ports, c);
  ports.set_meta("t_free_us", exact(c.sequence.t_free / kUs));
  ports.add_text_row({"coherent", exact(coherent.port0), exact(coherent.portn), exact(coherent.undetected)});
  std::printf("coherent: port 0 = %.4f, port %d = %.4f, undetected = %.4f\n", coherent.port0, n, coherent.portn,
              coherent.undetected);

  if (flags.path_resolved) {
    const auto r = path_resolved_mzi(seq, n, c.ensemble.distribution, c.ensemble.quadrature, ctx,
                                     c.scan.paths, run.jobs);
    ports.add_text_row({"path-resolved", exact(r.ports.port0), exact(r.ports.portn), exact(r.ports.undetected)});
    ResultTable branches("mzi-branches", {{"branch", "label"},
                                          {"depth", "1"},
                                          {"weight", "1"},
                                          {"display_weight", "1"},
                                          {"closing_mass", "1"},
                                          {"closing_fraction", "1"},
                                          {"port_0", "1"},
                                          {"port_n", "1"}});
    describe_ensemble(branches, c);
    branches.set_meta("pruned_mass", exact(r.tree.pruned_mass));
    for (const auto& node : r.tree.nodes) {
      if (node.history.empty()) continue;
      branches.add_text_row({node.key, std::to_string(node.history.size()), exact(node.weight),
                             exact(node.weight * node.display_scale), exact(node.closing_mass),
                             exact(node.closing_fraction()), exact(node.port0), exact(node.portn)});
      if (node.history.size() == 1)
        std::printf("branch %s: weight %.4f, reaches output ports %.4f of its mass\n", node.key.c_str(),
                    node.weight, node.closing_fraction());
    }
    save(run, branches, "branches.tsv");
  }

  if (flags.phi3_scan) {
    std::vector<double> phis(static_cast<std::size_t>(c.scan.phi_points));
    for (std::size_t k = 0; k < phis.size(); ++k)
      phis[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(phis.size());
    const auto scan = fringe_scan(seq, n, phis, c.ensemble.distribution, c.ensemble.quadrature, ctx,
                                  flags.readout == "momentum" ? FringeReadout::momentum
                                                              : FringeReadout::output_region,
                                  run.jobs);
    ResultTable fringe("mzi-fringe", {{"phi3", "rad"},
                                      {"port_0", "1"},
                                      {"port_n", "1"},
                                      {"undetected", "1"},
                                      {"fitted", "1"},
                                      {"residual", "1"}});
    describe_ensemble(fringe, c);
    fringe.set_meta("fit", scan.fit_message);
    fringe.set_meta("readout", flags.readout);
    fringe.set_meta("harmonic", std::to_string(scan.harmonic));
    fringe.set_meta("offset", exact(scan.offset));
    fringe.set_meta("contrast", exact(scan.contrast));
    fringe.set_meta("phase", exact(scan.phase));
    fringe.set_meta("max_residual", exact(scan.max_residual));
    for (const auto& p : scan.points) fringe.add_row({p.phi, p.port0, p.portn, p.undetected, p.fitted, p.residual});
    std::printf("fringe: contrast %.4f, phase %.4f rad, max residual %.3e (%s)\n", scan.contrast, scan.phase,
                scan.max_residual, scan.fit_message.c_str());
    save(run, fringe, "fringe.tsv");
  }
  save(run, ports, "ports.tsv");
  return 0;
}

int cmd_robustness(Run& run) {
  const auto& c = run.cfg;
  const auto spreads = c.scan.spread.values();
  const auto mirror = c.pulse.make(c.physics);
  const auto curve = robustness_curve(mirror, spreads, c.ensemble.distribution.mean, c.ensemble.quadrature,
                                      c.context(), run.jobs);
  const auto pairs = default_pairs(c.pulse.order);
  std::vector<Column> cols{{"spread", "hbar_k"}};
  for (const auto& p : pairs) cols.push_back({pair_name(p), "1"});
  ResultTable t("robustness", cols);
  t.set_meta("order", std::to_string(c.pulse.order));
  t.set_meta("tau_us", exact(c.pulse.tau / kUs));
  t.set_meta("omega_over_2pi_kHz", exact(c.pulse.rabi / kKhz));
  for (const auto& rec : curve) {
    std::vector<double> v{rec.spread};
    for (const auto& p : pairs) v.push_back(rec.pair(p.first, p.second));
    t.add_row(v);
  }
  save(run, t, "robustness.tsv");
  std::printf("robustness: %zu spreads written\n", curve.size());
  return 0;
}

int cmd_check(Run& run) {
  const auto& c = run.cfg;
  const auto lines =
      invariant_suite(c.pulse.make(c.physics), c.ensemble.distribution, c.ensemble.quadrature, c.context());
  ResultTable t("check", {{"check", "label"}, {"value", "1"}, {"limit", "1"}, {"passed", "1"}});
  bool ok = true;
  for (const auto& l : lines) {
    std::printf("%s %s: %.3e (limit %.3e)\n", l.passed ? "PASS" : "FAIL", l.name.c_str(), l.value, l.limit);
    t.add_text_row({"\"" + l.name + "\"", exact(l.value), exact(l.limit), l.passed ? "1" : "0"});
    ok = ok && l.passed;
  }
  save(run, t, "check.tsv");
  return ok ? 0 : 1;
}

int cmd_oracle_diff(Run& run, double threshold) {
  const auto& c = run.cfg;
  const double dev = backend_deviation(c.pulse.make(c.physics), c.context(), run.jobs);
  ResultTable t("oracle-diff", {{"max_deviation", "1"}, {"threshold", "1"}});
  t.set_meta("order", std::to_string(c.pulse.order));
  t.add_row({dev, threshold});
  save(run, t, "oracle_diff.tsv");
  std::printf("grid vs ladder max class-population deviation: %.3e (threshold %.1e) %s\n", dev, threshold,
              dev <= threshold ? "ok" : "EXCEEDED");
  return dev <= threshold ? 0 : 1;
}

int fail(const std::string& type, const std::string& message, int code) {
  nlohmann::json j;
  j["error"] = {{"type", type}, {"message", message}};
  std::cerr << j.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order Bragg diffraction simulator and dichroic mirror pulse designer"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Configuration file (TOML)");
    sub->add_option("--out", common.out, "Output directory");
    sub->add_option("--jobs", common.jobs, "Worker threads (0 = all cores)");
    sub->allow_extras();
    sub->footer("Any config key can be overridden as --section.key value, e.g. --propagator.tol 1e-9");
    return sub;
  };

  int order = 0;
  std::string split_after;
  std::string refine;
  MziFlags mzi_flags;
  double threshold = 1e-3;

  auto* rabi = add_common(app.add_subcommand("rabi-scan", "Class populations versus Rabi frequency"));
  rabi->add_option("--order", order, "Diffraction order");
  auto* map = add_common(app.add_subcommand("map", "Reflectivity map over (tau, Omega_R)"));
  map->add_option("--order", order, "Diffraction order");
  auto* dmp = add_common(app.add_subcommand("dmp-find", "Locate the dichroic mirror operating point"));
  dmp->add_option("--order", order, "Diffraction order");
  dmp->add_option("--refine", refine, "none or local")->check(CLI::IsMember({"none", "local"}));
  auto* mirror = add_common(app.add_subcommand("mirror-response", "Populations before and after the mirror"));
  mirror->add_option("--order", order, "Diffraction order");
  auto* mzi = add_common(app.add_subcommand("mzi", "Mach-Zehnder interferometer"));
  mzi->add_flag("--path-resolved", mzi_flags.path_resolved, "Split into momentum-class branches");
  mzi->add_option("--split-after", split_after, "Comma-separated pulse indices to split after");
  mzi->add_flag("--phi3-scan", mzi_flags.phi3_scan, "Scan the phase of the last pulse");
  mzi->add_option("--readout", mzi_flags.readout, "Fringe ports: output (closing region) or momentum")
      ->check(CLI::IsMember({"output", "momentum"}));
  auto* robust = add_common(app.add_subcommand("robustness", "Reflectivities versus momentum spread"));
  auto* check = add_common(app.add_subcommand("check", "Invariant suite for the configured pulse"));
  auto* oracle = add_common(app.add_subcommand("oracle-diff", "Grid versus ladder backend"));
  oracle->add_option("--threshold", threshold, "Maximum allowed class-population deviation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    auto overrides = collect_overrides(sub->remaining());
    if (order > 0) overrides.emplace_back("pulse.order", std::to_string(order));
    if (!refine.empty()) overrides.emplace_back("scan.refine", "\"" + refine + "\"");
    if (!split_after.empty()) overrides.emplace_back("scan.split_after", "[" + split_after + "]");
    Run run = start(sub->get_name(), common, overrides);

    int code = 0;
    if (sub == rabi) code = cmd_rabi_scan(run);
    else if (sub == map) code = cmd_map(run);
    else if (sub == dmp) code = cmd_dmp_find(run);
    else if (sub == mirror) code = cmd_mirror_response(run);
    else if (sub == mzi) code = cmd_mzi(run, mzi_flags);
    else if (sub == robust) code = cmd_robustness(run);
    else if (sub == check) code = cmd_check(run);
    else if (sub == oracle) code = cmd_oracle_diff(run, threshold);
    finish(run);
    return code;
  } catch (const ConfigError& e) {
    return fail("config", e.what(), 2);
  } catch (const ParameterError& e) {
    return fail("parameter", e.what(), 2);
  } catch (const PropagationError& e) {
    return fail("propagation", e.what(), 3);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 4);
  }
}
