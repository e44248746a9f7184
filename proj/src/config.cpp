#include "bragg/config.hpp"

#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "bragg/errors.hpp"
#include "bragg/hash.hpp"

namespace bragg {

namespace {

struct Unit {
  double scale;
  bool ordinary_frequency;
};

struct Parsed {
  bool two_pi_prefix = false;
  double number = 0.0;
  std::string unit;
};

std::optional<Parsed> split_quantity(const std::string& text) {
  static const std::regex pattern(
      R"(^\s*(2\s*\*?\s*(?:pi|π)\s*(?:\*|×|x)\s*)?([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*((?:[A-Za-z/]|µ)(?:[A-Za-z0-9/_]|µ)*)?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) return std::nullopt;
  Parsed p;
  p.two_pi_prefix = m[1].matched;
  p.number = std::stod(m[2].str());
  p.unit = m[3].str();
  return p;
}

double parse_with(const std::string& text, const std::map<std::string, Unit>& units,
                  const char* what) {
  const auto p = split_quantity(text);
  if (!p) throw ConfigError("cannot read " + std::string(what) + " from '" + text + "'");
  std::string unit = p->unit;
  bool marked = p->two_pi_prefix;
  if (unit.size() > 5 && unit.ends_with("_x2pi")) {
    unit.resize(unit.size() - 5);
    marked = true;
  }
  const auto it = units.find(unit);
  if (it == units.end())
    throw ConfigError("unknown or missing " + std::string(what) + " unit in '" + text + "'");
  if (marked && !it->second.ordinary_frequency)
    throw ConfigError("'" + text + "': the 2 pi marker only applies to Hz, kHz or MHz");
  return p->number * it->second.scale;
}

const std::map<std::string, Unit>& time_units() {
  static const std::map<std::string, Unit> u{
      {"s", {1.0, false}}, {"ms", {1e-3, false}}, {"us", {1e-6, false}}, {"µs", {1e-6, false}},
      {"ns", {1e-9, false}}};
  return u;
}

const std::map<std::string, Unit>& frequency_units() {
  constexpr double tau = 2.0 * std::numbers::pi;
  static const std::map<std::string, Unit> u{
      {"Hz", {tau, true}},          {"kHz", {tau * 1e3, true}},   {"MHz", {tau * 1e6, true}},
      {"rad/s", {1.0, false}},      {"krad/s", {1e3, false}},     {"Mrad/s", {1e6, false}}};
  return u;
}

const std::map<std::string, Unit>& length_units() {
  static const std::map<std::string, Unit> u{
      {"m", {1.0, false}}, {"mm", {1e-3, false}}, {"um", {1e-6, false}}, {"µm", {1e-6, false}},
      {"nm", {1e-9, false}}};
  return u;
}

const std::map<std::string, Unit>& mass_units() {
  static const std::map<std::string, Unit> u{{"u", {constants::atomic_mass_unit, false}},
                                             {"kg", {1.0, false}}};
  return u;
}

}  // namespace

double parse_time(const std::string& text) { return parse_with(text, time_units(), "time"); }
double parse_angular_frequency(const std::string& text) {
  return parse_with(text, frequency_units(), "frequency");
}
double parse_length(const std::string& text) { return parse_with(text, length_units(), "length"); }
double parse_mass(const std::string& text) { return parse_with(text, mass_units(), "mass"); }

Pulse PulseConfig::make(const PhysicalConfig& physics) const {
  Envelope env = envelope == "rectangular" ? Envelope::rectangular(tau) : Envelope::blackman(tau);
  const double p0_si = p0 * constants::hbar * physics.k_eff();
  return on_resonance(order, p0_si, env, rabi, physics, phase, convention);
}

MachZehnderParams SequenceConfig::params(const PulseConfig& mirror) const {
  MachZehnderParams p;
  p.order = mirror.order;
  p.tau_splitter = tau_splitter;
  p.rabi_splitter = rabi_splitter;
  p.tau_mirror = mirror.tau;
  p.rabi_mirror = mirror.rabi;
  p.t_free = t_free;
  for (std::size_t i = 0; i < 3; ++i) p.phases[i] = phases[i];
  p.convention = mirror.convention;
  return p;
}

namespace {

std::string type_name(const toml::node& n) {
  std::ostringstream s;
  s << n.type();
  return s.str();
}

/// Reads one section, remembering which keys were consumed.
class Section {
 public:
  Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  const toml::node* find(const std::string& key) {
    used_.insert(key);
    return table_ ? table_->get(key) : nullptr;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& expected,
                         const std::string& example, const std::string& got = {}) const {
    std::string msg = name_ + "." + key + ": expected " + expected + ", e.g. " + key + " = " + example;
    if (!got.empty()) msg += "; got " + got;
    throw ConfigError(msg);
  }

  std::string text(const std::string& key, const std::string& fallback,
                   std::initializer_list<const char*> allowed, const std::string& example) {
    const auto* n = find(key);
    if (!n) return fallback;
    const auto v = n->value<std::string>();
    std::string expected = "one of";
    for (const char* a : allowed) expected += std::string(" \"") + a + "\"";
    if (!v) fail(key, expected, example, type_name(*n));
    if (allowed.size() &&
        std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return *v == a; }))
      fail(key, expected, example, "\"" + *v + "\"");
    return *v;
  }

  long long integer(const std::string& key, long long fallback, long long min, const std::string& example) {
    const auto* n = find(key);
    if (!n) return fallback;
    const auto v = n->value_exact<int64_t>();
    if (!v || *v < min)
      fail(key, "an integer >= " + std::to_string(min), example,
           v ? std::to_string(*v) : type_name(*n));
    return *v;
  }

  double number(const std::string& key, double fallback, double min, bool strict,
                const std::string& unit, const std::string& example) {
    const auto* n = find(key);
    if (!n) return fallback;
    const auto v = n->value<double>();
    const std::string expected = "a number " + std::string(strict ? "> " : ">= ") + exact(min) +
                                 (unit.empty() ? "" : " in " + unit);
    if (!v) fail(key, expected, example, type_name(*n));
    if (!std::isfinite(*v) || (strict ? !(*v > min) : !(*v >= min))) fail(key, expected, example, exact(*v));
    return *v;
  }

  bool boolean(const std::string& key, bool fallback) {
    const auto* n = find(key);
    if (!n) return fallback;
    const auto v = n->value_exact<bool>();
    if (!v) fail(key, "true or false", "true", type_name(*n));
    return *v;
  }

  double quantity(const std::string& key, double fallback, double (*parse)(const std::string&),
                  const std::string& units, const std::string& example, bool allow_zero = false) {
    const auto* n = find(key);
    if (!n) return fallback;
    const auto v = n->value_exact<std::string>();
    const std::string expected =
        std::string(allow_zero ? "a non-negative" : "a positive") + " quantity with unit (" + units + ")";
    if (!v) fail(key, expected, example, type_name(*n));
    double value = 0.0;
    try {
      value = parse(*v);
    } catch (const ConfigError&) {
      fail(key, expected, example, "\"" + *v + "\"");
    }
    if (!std::isfinite(value) || (allow_zero ? value < 0.0 : value <= 0.0))
      fail(key, expected, example, "\"" + *v + "\"");
    return value;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback,
                              const std::string& example) {
    const auto* n = find(key);
    if (!n) return fallback;
    const auto* arr = n->as_array();
    if (!arr) fail(key, "an array of numbers", example, type_name(*n));
    std::vector<double> out;
    for (const auto& e : *arr) {
      const auto v = e.value<double>();
      if (!v) fail(key, "an array of numbers", example);
      out.push_back(*v);
    }
    return out;
  }

  std::vector<int> integers(const std::string& key, std::vector<int> fallback, int min,
                            const std::string& example) {
    const auto* n = find(key);
    if (!n) return fallback;
    const auto* arr = n->as_array();
    const std::string expected = "an array of integers >= " + std::to_string(min);
    if (!arr) fail(key, expected, example, type_name(*n));
    std::vector<int> out;
    for (const auto& e : *arr) {
      const auto v = e.value_exact<int64_t>();
      if (!v || *v < min) fail(key, expected, example);
      out.push_back(static_cast<int>(*v));
    }
    return out;
  }

  const toml::array* array(const std::string& key) {
    const auto* n = find(key);
    return n ? n->as_array() : nullptr;
  }

  void finish() const {
    if (!table_) return;
    for (const auto& [key, node] : *table_) {
      const std::string k(key.str());
      if (!used_.count(k)) throw ConfigError("unknown key '" + name_ + "." + k + "'");
    }
  }

 private:
  const toml::table* table_;
  std::string name_;
  std::set<std::string> used_;
};

const std::set<std::string> kSections{"physics", "pulse",  "sequence", "ensemble",
                                      "propagator", "scan", "output"};

RunConfig build(const toml::table& root) {
  for (const auto& [key, node] : root) {
    const std::string k(key.str());
    if (!kSections.count(k)) throw ConfigError("unknown section '" + k + "'");
    if (!node.is_table()) throw ConfigError("'" + k + "' must be a section");
  }
  auto section = [&](const char* name) { return Section(root[name].as_table(), name); };
  RunConfig c;

  auto physics = section("physics");
  c.preset = physics.text("preset", "rb87", {"rb87", "custom"}, "\"rb87\"");
  {
    const double mass = physics.quantity("mass", c.physics.atom_mass(), parse_mass, "u, kg", "\"86.909 u\"");
    const double wavelength =
        physics.quantity("wavelength", c.physics.wavelength(), parse_length, "m, mm, um, nm", "\"780.226 nm\"");
    c.physics = PhysicalConfig(mass, wavelength, c.preset);
  }
  physics.finish();

  auto pulse = section("pulse");
  c.pulse.order = static_cast<int>(pulse.integer("order", c.pulse.order, 1, "3"));
  c.pulse.envelope = pulse.text("envelope", c.pulse.envelope, {"blackman", "rectangular"}, "\"blackman\"");
  c.pulse.tau = pulse.quantity("tau", c.pulse.tau, parse_time, "s, ms, us, ns", "\"90 us\"");
  c.pulse.rabi = pulse.quantity("rabi", c.pulse.rabi, parse_angular_frequency,
                                "Hz, kHz, MHz as ordinary frequency; rad/s", "\"2*pi*23 kHz\"", true);
  c.pulse.phase = pulse.number("phase", c.pulse.phase, -1e300, false, "rad", "0.0");
  c.pulse.p0 = pulse.number("p0", c.pulse.p0, -1e300, false, "hbar k_eff", "0.0");
  c.pulse.convention = pulse.text("rabi_convention", "average", {"average", "peak"}, "\"average\"") == "peak"
                           ? RabiConvention::peak
                           : RabiConvention::pulse_average;
  pulse.finish();

  auto seq = section("sequence");
  c.sequence.tau_splitter = seq.quantity("tau_splitter", c.sequence.tau_splitter, parse_time,
                                         "s, ms, us, ns", "\"90 us\"");
  c.sequence.rabi_splitter = seq.quantity("rabi_splitter", c.sequence.rabi_splitter, parse_angular_frequency,
                                          "Hz, kHz, MHz as ordinary frequency; rad/s", "\"2*pi*15.96 kHz\"", true);
  c.sequence.t_free = seq.quantity("t_free", c.sequence.t_free, parse_time, "s, ms, us, ns", "\"1 ms\"", true);
  c.sequence.phases = seq.numbers("phases", c.sequence.phases, "[0.0, 0.0, 0.0]");
  if (c.sequence.phases.size() != 3) seq.fail("phases", "three phases in rad", "[0.0, 0.0, 0.0]");
  seq.finish();

  auto ens = section("ensemble");
  {
    const auto kind = ens.text("distribution", "gaussian", {"delta", "gaussian", "tabulated"}, "\"gaussian\"");
    const double mean = ens.number("mean", 0.0, -1e300, false, "hbar k_eff", "0.0");
    const double spread = ens.number("spread", 0.13, 0.0, false, "hbar k_eff", "0.13");
    if (kind == "delta") {
      c.ensemble.distribution = MomentumDistribution::delta(mean);
    } else if (kind == "gaussian") {
      c.ensemble.distribution = MomentumDistribution::gaussian(mean, spread);
    } else {
      const auto* arr = ens.array("table");
      if (!arr) ens.fail("table", "an array of [momentum, weight] pairs", "[[-0.1, 0.5], [0.1, 0.5]]");
      std::vector<std::pair<double, double>> table;
      for (const auto& e : *arr) {
        const auto* pair = e.as_array();
        if (!pair || pair->size() != 2 || !(*pair)[0].value<double>() || !(*pair)[1].value<double>())
          ens.fail("table", "an array of [momentum, weight] pairs", "[[-0.1, 0.5], [0.1, 0.5]]");
        table.emplace_back(*(*pair)[0].value<double>(), *(*pair)[1].value<double>());
      }
      c.ensemble.distribution = MomentumDistribution::tabulated(std::move(table));
    }
    ens.array("table");
    const auto quad = ens.text("quadrature", "gauss_hermite", {"gauss_hermite", "monte_carlo"}, "\"gauss_hermite\"");
    c.ensemble.quadrature.kind = quad == "monte_carlo" ? QuadratureKind::monte_carlo : QuadratureKind::gauss_hermite;
    c.ensemble.quadrature.nodes = static_cast<int>(ens.integer("nodes", c.ensemble.quadrature.nodes, 1, "41"));
    c.ensemble.quadrature.seed = static_cast<std::uint64_t>(ens.integer("seed", 1, 0, "1"));
  }
  ens.finish();

  auto prop = section("propagator");
  {
    const auto backend = prop.text("backend", "ladder", {"ladder", "grid"}, "\"ladder\"");
    c.propagator.kind = parse_backend(backend);
    const double fallback = c.propagator.kind == BackendKind::ladder ? c.propagator.ladder.abs_tol : c.propagator.grid.tol;
    const double tol = prop.number("tol", fallback, 0.0, true, "", "1e-9");
    if (c.propagator.kind == BackendKind::ladder) {
      c.propagator.ladder.abs_tol = c.propagator.ladder.rel_tol = tol;
    } else {
      c.propagator.grid.tol = tol;
    }
    c.propagator.grid.scheme =
        SplittingScheme::from_name(prop.text("scheme", "pp34a", {"pp34a", "strang"}, "\"pp34a\""));
    c.propagator.grid.num_points = static_cast<int>(prop.integer("grid_points", c.propagator.grid.num_points, 8, "512"));
    c.propagator.grid.periods = static_cast<int>(prop.integer("periods", c.propagator.grid.periods, 1, "8"));
    const int n = c.propagator.grid.num_points;
    if (n & (n - 1)) prop.fail("grid_points", "a power of two >= 8", "512", std::to_string(n));
  }
  prop.finish();

  auto scan = section("scan");
  {
    auto& s = c.scan;
    const std::string t_units = "s, ms, us, ns";
    const std::string f_units = "Hz, kHz, MHz as ordinary frequency; rad/s";
    s.tau.min = scan.quantity("tau_min", s.tau.min, parse_time, t_units, "\"50 us\"");
    s.tau.max = scan.quantity("tau_max", s.tau.max, parse_time, t_units, "\"150 us\"");
    s.tau.count = static_cast<int>(scan.integer("tau_count", s.tau.count, 2, "30"));
    s.rabi.min = scan.quantity("rabi_min", s.rabi.min, parse_angular_frequency, f_units, "\"2*pi*10 kHz\"", true);
    s.rabi.max = scan.quantity("rabi_max", s.rabi.max, parse_angular_frequency, f_units, "\"2*pi*40 kHz\"");
    s.rabi.count = static_cast<int>(scan.integer("rabi_count", s.rabi.count, 2, "30"));
    s.spread.min = scan.number("spread_min", s.spread.min, 0.0, false, "hbar k_eff", "0.0");
    s.spread.max = scan.number("spread_max", s.spread.max, 0.0, false, "hbar k_eff", "0.3");
    s.spread.count = static_cast<int>(scan.integer("spread_count", s.spread.count, 2, "21"));
    if (!(s.tau.max > s.tau.min)) scan.fail("tau_max", "a duration above tau_min", "\"150 us\"");
    if (!(s.rabi.max > s.rabi.min)) scan.fail("rabi_max", "a frequency above rabi_min", "\"2*pi*40 kHz\"");
    if (!(s.spread.max > s.spread.min)) scan.fail("spread_max", "a spread above spread_min", "0.3");
    s.phi_points = static_cast<int>(scan.integer("phi_points", s.phi_points, 3, "25"));
    s.criterion = DmpCriterion::for_order(c.pulse.order);
    s.criterion.penalty = scan.number("penalty", s.criterion.penalty, 0.0, false, "", "1.0");
    s.criterion.min_resonant = scan.number("min_resonant", s.criterion.min_resonant, 0.0, false, "", "0.5");
    s.criterion.max_parasitic = scan.number("max_parasitic", s.criterion.max_parasitic, 0.0, false, "", "0.15");
    s.refine = scan.text("refine", "none", {"none", "local"}, "\"local\"") == "local" ? Refinement::local
                                                                                    : Refinement::none;
    s.spot_checks = static_cast<int>(scan.integer("spot_checks", s.spot_checks, 0, "5"));
    s.cache = scan.boolean("cache", s.cache);
    s.inputs = scan.integers("inputs", s.inputs, 0, "[0, 1, 2, 3]");
    for (int in : s.inputs)
      if (in > c.pulse.order) scan.fail("inputs", "classes within 0..order", "[0, 1, 2, 3]");
    s.paths.split_after = scan.integers("split_after", s.paths.split_after, 0, "[0, 1, 2]");
    s.paths.keep_classes = scan.integers("keep_classes", s.paths.keep_classes, -1000, "[0, 1, 2, 3]");
    s.paths.max_branches = static_cast<int>(scan.integer("max_branches", s.paths.max_branches, 1, "64"));
    s.paths.normalize_display = scan.boolean("normalize_display", s.paths.normalize_display);
  }
  scan.finish();

  auto out = section("output");
  c.output.directory = out.text("directory", "", {}, "\"results/map\"");
  c.output.jobs = static_cast<int>(out.integer("jobs", 0, 0, "4"));
  out.finish();

  c.ensemble.distribution.validate();
  try {
    c.pulse.make(c.physics).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("pulse: ") + e.what());
  }
  return c;
}

toml::table parse_toml(const std::string& text, const std::string& origin) {
  try {
    return toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream s;
    s << origin << ':' << e.source().begin.line << ':' << e.source().begin.column << ": "
      << e.description();
    throw ConfigError(s.str());
  }
}

void apply_overrides(toml::table& root, const std::vector<Override>& overrides) {
  for (const auto& [dotted, raw] : overrides) {
    const auto dot = dotted.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == dotted.size())
      throw ConfigError("override '" + dotted + "' must look like section.key");
    const std::string sec = dotted.substr(0, dot), key = dotted.substr(dot + 1);
    if (!kSections.count(sec)) throw ConfigError("unknown section '" + sec + "' in override");
    if (!root.contains(sec)) root.insert(sec, toml::table{});
    auto* table = root[sec].as_table();
    if (!table) throw ConfigError("'" + sec + "' must be a section");
    // TOML literal if it parses as one, otherwise a bare string.
    toml::table probe;
    try {
      probe = toml::parse("v = " + raw);
    } catch (const toml::parse_error&) {
      table->insert_or_assign(key, raw);
      continue;
    }
    table->insert_or_assign(key, *probe.get("v"));
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::vector<Override>& overrides) {
  auto root = parse_toml(text, "config");
  apply_overrides(root, overrides);
  return build(root);
}

RunConfig parse_config(const std::string& path, const std::vector<Override>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  auto root = parse_toml(buf.str(), path);
  apply_overrides(root, overrides);
  return build(root);
}

std::string render_config(const RunConfig& c) {
  std::ostringstream s;
  auto q = [](double v, const char* unit) { return "\"" + exact(v) + " " + unit + "\""; };
  auto ints = [](const std::vector<int>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
    return out + "]";
  };
  s << "[physics]\npreset = \"" << c.preset << "\"\nmass = " << q(c.physics.atom_mass(), "kg")
    << "\nwavelength = " << q(c.physics.wavelength(), "m") << "\n\n";
  s << "[pulse]\norder = " << c.pulse.order << "\nenvelope = \"" << c.pulse.envelope
    << "\"\ntau = " << q(c.pulse.tau, "s") << "\nrabi = " << q(c.pulse.rabi, "rad/s")
    << "\nphase = " << exact(c.pulse.phase) << "\np0 = " << exact(c.pulse.p0) << "\nrabi_convention = \""
    << (c.pulse.convention == RabiConvention::peak ? "peak" : "average") << "\"\n\n";
  s << "[sequence]\ntau_splitter = " << q(c.sequence.tau_splitter, "s")
    << "\nrabi_splitter = " << q(c.sequence.rabi_splitter, "rad/s") << "\nt_free = " << q(c.sequence.t_free, "s")
    << "\nphases = [" << exact(c.sequence.phases[0]) << ", " << exact(c.sequence.phases[1]) << ", "
    << exact(c.sequence.phases[2]) << "]\n\n";
  const auto& d = c.ensemble.distribution;
  static const char* kinds[] = {"delta", "gaussian", "tabulated"};
  s << "[ensemble]\ndistribution = \"" << kinds[static_cast<int>(d.kind)] << "\"\nmean = " << exact(d.mean)
    << "\nspread = " << exact(d.spread) << "\n";
  if (d.kind == DistributionKind::tabulated) {
    s << "table = [";
    for (std::size_t i = 0; i < d.table.size(); ++i)
      s << (i ? ", " : "") << "[" << exact(d.table[i].first) << ", " << exact(d.table[i].second) << "]";
    s << "]\n";
  }
  s << "quadrature = \""
    << (c.ensemble.quadrature.kind == QuadratureKind::monte_carlo ? "monte_carlo" : "gauss_hermite")
    << "\"\nnodes = " << c.ensemble.quadrature.nodes << "\nseed = " << c.ensemble.quadrature.seed << "\n\n";
  const auto& p = c.propagator;
  s << "[propagator]\nbackend = \"" << to_string(p.kind) << "\"\ntol = "
    << exact(p.kind == BackendKind::ladder ? p.ladder.abs_tol : p.grid.tol) << "\nscheme = \""
    << p.grid.scheme.name << "\"\ngrid_points = " << p.grid.num_points << "\nperiods = " << p.grid.periods
    << "\n\n";
  const auto& sc = c.scan;
  s << "[scan]\ntau_min = " << q(sc.tau.min, "s") << "\ntau_max = " << q(sc.tau.max, "s")
    << "\ntau_count = " << sc.tau.count << "\nrabi_min = " << q(sc.rabi.min, "rad/s")
    << "\nrabi_max = " << q(sc.rabi.max, "rad/s") << "\nrabi_count = " << sc.rabi.count
    << "\nspread_min = " << exact(sc.spread.min) << "\nspread_max = " << exact(sc.spread.max)
    << "\nspread_count = " << sc.spread.count << "\nphi_points = " << sc.phi_points
    << "\npenalty = " << exact(sc.criterion.penalty) << "\nmin_resonant = " << exact(sc.criterion.min_resonant)
    << "\nmax_parasitic = " << exact(sc.criterion.max_parasitic) << "\nrefine = \""
    << (sc.refine == Refinement::local ? "local" : "none") << "\"\nspot_checks = " << sc.spot_checks
    << "\ncache = " << (sc.cache ? "true" : "false") << "\ninputs = " << ints(sc.inputs)
    << "\nsplit_after = " << ints(sc.paths.split_after) << "\nkeep_classes = " << ints(sc.paths.keep_classes)
    << "\nmax_branches = " << sc.paths.max_branches
    << "\nnormalize_display = " << (sc.paths.normalize_display ? "true" : "false") << "\n\n";
  s << "[output]\ndirectory = \"" << c.output.directory << "\"\njobs = " << c.output.jobs << "\n";
  return s.str();
}

}  // namespace bragg
