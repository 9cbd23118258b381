#include "kpqhj/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kpqhj/action.hpp"
#include "kpqhj/bloch.hpp"
#include "kpqhj/model.hpp"
#include "kpqhj/spectrum.hpp"
#include "kpqhj/superposition.hpp"

namespace kpqhj::cli {

using nlohmann::ordered_json;

std::string format_number(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(key + ": not a number: '" + text + "'");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  int v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(key + ": not an integer: '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") {
    return true;
  }
  if (text == "false" || text == "0" || text == "no") {
    return false;
  }
  throw ConfigError(key + ": not a boolean: '" + text + "'");
}

void set_tolerance(RunConfig& cfg, const std::string& name, double value) {
  if (!default_tolerances().contains(name)) {
    throw ConfigError("tol: unknown check name '" + name + "'");
  }
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError("tol." + name + ": must be positive");
  }
  cfg.tolerances[name] = value;
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "v0") {
    cfg.v0 = parse_double(key, value);
  } else if (key == "c") {
    cfg.c = parse_double(key, value);
  } else if (key == "d") {
    cfg.d = parse_double(key, value);
  } else if (key == "emin") {
    cfg.e_min = parse_double(key, value);
  } else if (key == "emax") {
    cfg.e_max = parse_double(key, value);
  } else if (key == "samples") {
    cfg.n_samples = parse_int(key, value);
  } else if (key == "gamma") {
    cfg.gamma = parse_double(key, value);
  } else if (key == "delta") {
    cfg.delta = parse_double(key, value);
  } else if (key == "energy") {
    cfg.energy = parse_double(key, value);
  } else if (key == "format") {
    cfg.format = value;
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "plot_script") {
    cfg.plot_script = parse_bool(key, value);
  } else if (key == "periods") {
    cfg.periods = parse_int(key, value);
  } else if (key.starts_with("tol.")) {
    set_tolerance(cfg, key.substr(4), parse_double(key, value));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

}  // namespace

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> tol{
      {"dispersion_transfer", 1e-12},  {"dispersion_action", 1e-9},
      {"constraint_first", 1e-9},      {"constraint_second", 1e-9},
      {"bloch_relation_tan", 1e-9},    {"bloch_relation_cos2", 1e-9},
      {"constants_transfer", 1e-8},    {"identity_b_minus_a", 1e-12},
      {"identity_gamma_square", 1e-12}, {"bloch_defect", 1e-9},
      {"mobius", 1e-8},                {"bohm_defect", 1e-9},
      {"bohm_f_shift", 1e-9},          {"qshje", 1e-6},
      {"qshje_order", 0.25},           {"schrodinger", 1e-7},
      {"wavefunction_bloch", 1e-9},
  };
  return tol;
}

void apply_config_text(const std::string& text, RunConfig& cfg) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void validate(const RunConfig& cfg, const std::string& command) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(cfg.v0) || cfg.v0 < 0.0) {
    throw ConfigError("v0: must be finite and >= 0");
  }
  if (!finite(cfg.c) || cfg.c <= 0.0) {
    throw ConfigError("c: must be finite and > 0");
  }
  if (!finite(cfg.d) || cfg.d <= 0.0) {
    throw ConfigError("d: must be finite and > 0");
  }
  if (!finite(cfg.gamma) || cfg.gamma < -1.0 || cfg.gamma > 1.0) {
    throw ConfigError("gamma: must lie in [-1, 1]");
  }
  if (!finite(cfg.delta)) {
    throw ConfigError("delta: must be finite");
  }
  if (cfg.format != "csv" && cfg.format != "json") {
    throw ConfigError("format: must be csv or json");
  }
  if (cfg.plot_script && cfg.out.empty()) {
    throw ConfigError("plot_script: requires --out");
  }
  if (command == "dispersion" || command == "bands") {
    if (!finite(cfg.e_min) || cfg.e_min <= 0.0) {
      throw ConfigError("emin: must be finite and > 0");
    }
    if (!finite(cfg.e_max) || cfg.e_max <= cfg.e_min) {
      throw ConfigError("emax: must be finite and > emin");
    }
    if (cfg.n_samples < 2) {
      throw ConfigError("samples: must be >= 2");
    }
  }
  if (command == "action" || command == "verify") {
    if (!cfg.energy) {
      throw ConfigError("energy: required for " + command);
    }
    if (!finite(*cfg.energy) || *cfg.energy <= 0.0) {
      throw ConfigError("energy: must be finite and > 0");
    }
    if (cfg.periods < 1) {
      throw ConfigError("periods: must be >= 1");
    }
  }
  if (command == "action" && cfg.n_samples < 2) {
    throw ConfigError("samples: must be >= 2");
  }
}

namespace {

ordered_json lattice_json(const LatticeSpec& lat) {
  return {{"v0", lat.v0()}, {"c", lat.c()}, {"d", lat.d()}, {"period", lat.period()}};
}

ordered_json config_json(const RunConfig& cfg) {
  ordered_json j{{"v0", cfg.v0},         {"c", cfg.c},
                 {"d", cfg.d},           {"emin", cfg.e_min},
                 {"emax", cfg.e_max},    {"samples", cfg.n_samples},
                 {"gamma", cfg.gamma},   {"delta", cfg.delta},
                 {"format", cfg.format}, {"out", cfg.out},
                 {"plot_script", cfg.plot_script}, {"periods", cfg.periods}};
  j["energy"] = cfg.energy ? ordered_json(*cfg.energy) : ordered_json(nullptr);
  j["tolerances"] = ordered_json::object();
  for (const auto& [k, v] : cfg.tolerances) {
    j["tolerances"][k] = v;
  }
  return j;
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

struct Table {
  std::vector<std::string> comments;
  std::string header;
  std::vector<std::string> rows;
  ordered_json json;
};

std::string csv_text(const Table& t) {
  std::string s;
  for (const auto& c : t.comments) {
    s += "# " + c + "\n";
  }
  s += t.header + "\n";
  for (const auto& r : t.rows) {
    s += r + "\n";
  }
  return s;
}

std::string join(std::initializer_list<std::string> parts) {
  std::string s;
  bool first = true;
  for (const auto& p : parts) {
    if (!first) {
      s += ',';
    }
    s += p;
    first = false;
  }
  return s;
}

Table cmd_dispersion(const RunConfig& cfg, const LatticeSpec& lat) {
  Table t;
  t.header = "energy,cos_ke,allowed,k_bloch";
  ordered_json points = ordered_json::array();
  for (int i = 0; i < cfg.n_samples; ++i) {
    const double e =
        i + 1 == cfg.n_samples
            ? cfg.e_max
            : cfg.e_min + (cfg.e_max - cfg.e_min) * i / static_cast<double>(cfg.n_samples - 1);
    const BlochPoint bp = bloch_wavenumber(e, lat);
    t.rows.push_back(join({format_number(e), format_number(bp.cos_ke), bool_text(bp.allowed),
                           bp.k_bloch ? format_number(*bp.k_bloch) : std::string()}));
    points.push_back({{"energy", e},
                      {"cos_ke", bp.cos_ke},
                      {"allowed", bp.allowed},
                      {"k_bloch", bp.k_bloch ? ordered_json(*bp.k_bloch) : ordered_json(nullptr)}});
  }
  t.json["points"] = std::move(points);
  return t;
}

Table cmd_bands(const RunConfig& cfg, const LatticeSpec& lat) {
  Table t;
  t.header = "band_index,e_lower,e_upper,clipped_lower,clipped_upper";
  ordered_json bands = ordered_json::array();
  for (const Band& b : find_bands(lat, cfg.e_min, cfg.e_max, cfg.n_samples)) {
    t.rows.push_back(join({std::to_string(b.index), format_number(b.e_lo), format_number(b.e_hi),
                           bool_text(b.clipped_lo), bool_text(b.clipped_hi)}));
    bands.push_back({{"band_index", b.index},
                     {"e_lower", b.e_lo},
                     {"e_upper", b.e_hi},
                     {"clipped_lower", b.clipped_lo},
                     {"clipped_upper", b.clipped_hi}});
  }
  t.json["bands"] = std::move(bands);
  return t;
}

SuperpositionParams superposition(const RunConfig& cfg) {
  return SuperpositionParams::from_gamma_delta(cfg.gamma, cfg.delta);
}

BlochAction build_chain(const RunConfig& cfg, const LatticeSpec& lat) {
  const SuperpositionParams sp = superposition(cfg);
  if (!cfg.inject_error) {
    return BlochAction::construct(*cfg.energy, lat, sp, cfg.periods);
  }
  const BlochPoint bp = bloch_wavenumber(*cfg.energy, lat);
  if (!bp.allowed) {
    return BlochAction::construct(*cfg.energy, lat, sp, cfg.periods);
  }
  const BlochConstants bc =
      solve_bloch_constants(*cfg.energy, lat, sp, *bp.k_bloch * lat.period());
  const double corrupted = bc.nu1 + 1e-3 * std::max(1.0, std::abs(bc.nu1));
  return BlochAction::from_constants(*cfg.energy, lat, sp, bc.mu1, corrupted, cfg.periods);
}

Table cmd_action(const RunConfig& cfg, const LatticeSpec& lat) {
  const BlochAction chain = build_chain(cfg, lat);
  Table t;
  t.comments = {"mu1=" + format_number(chain.mu1()), "nu1=" + format_number(chain.nu1()),
                "gamma=" + format_number(cfg.gamma), "delta=" + format_number(cfg.delta),
                "K=" + format_number(chain.k_bloch()),
                "n=" + (chain.n() ? std::to_string(*chain.n()) : std::string("none"))};
  t.header = "x,s0,ds0,r,region";
  ordered_json rows = ordered_json::array();
  const double x0 = chain.x_begin();
  const double x1 = chain.x_end();
  for (int i = 0; i < cfg.n_samples; ++i) {
    const double x =
        i + 1 == cfg.n_samples ? x1 : x0 + (x1 - x0) * i / static_cast<double>(cfg.n_samples - 1);
    const ActionSample s = chain.sample(x);
    const std::string region(to_string(chain.region_at(x).region));
    t.rows.push_back(join(
        {format_number(x), format_number(s.s0), format_number(s.ds0), format_number(s.r), region}));
    rows.push_back(
        {{"x", x}, {"s0", s.s0}, {"ds0", s.ds0}, {"r", s.r}, {"region", region}});
  }
  t.json["header"] = {{"mu1", chain.mu1()},
                      {"nu1", chain.nu1()},
                      {"gamma", cfg.gamma},
                      {"delta", cfg.delta},
                      {"K", chain.k_bloch()},
                      {"n", chain.n() ? ordered_json(*chain.n()) : ordered_json(nullptr)}};
  t.json["rows"] = std::move(rows);
  return t;
}

// ---------------------------------------------------------------- verify

struct Check {
  std::string name;
  double residual;
  double tolerance;
  bool skipped = false;
  std::string note;

  bool pass() const { return skipped || residual <= tolerance; }
};

class Battery {
 public:
  explicit Battery(const RunConfig& cfg) : cfg_(cfg) {}

  void add(const std::string& name, double residual, std::string note = {}) {
    checks_.push_back({name, residual, tolerance(name), false, std::move(note)});
  }
  void skip(const std::string& name, std::string why) {
    checks_.push_back({name, 0.0, tolerance(name), true, std::move(why)});
  }
  // Runs f; a library exception turns into a failed check.
  void guarded(const std::string& name, const std::function<double()>& f) {
    try {
      add(name, f());
    } catch (const Error& e) {
      checks_.push_back({name, HUGE_VAL, tolerance(name), false, e.what()});
    }
  }
  const std::vector<Check>& checks() const { return checks_; }

 private:
  double tolerance(const std::string& name) const {
    const auto it = cfg_.tolerances.find(name);
    return it != cfg_.tolerances.end() ? it->second : default_tolerances().at(name);
  }

  const RunConfig& cfg_;
  std::vector<Check> checks_;
};

std::vector<double> uniform_grid(double center, double h, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    g[static_cast<std::size_t>(i)] = center + (i - n / 2) * h;
  }
  return g;
}

// Richardson-combined QSHJE residual at h and h / 2 on shared points, and the
// observed order of the raw residual.
std::pair<double, double> qshje_check(const BlochAction& chain) {
  constexpr double h = 1e-3;
  double worst_rich = 0.0;
  double worst_h = 0.0;
  double worst_h2 = 0.0;
  for (const RegionAction& reg : chain.regions()) {
    const double center = 0.5 * (reg.x_lo + reg.x_hi);
    const auto coarse = uniform_grid(center, h, 21);
    const auto fine = uniform_grid(center, h / 2, 41);
    auto profile = [&](const std::vector<double>& g) {
      const auto samples = amplitude_profile(g, reg.basis, reg.constants);
      return qshje_residual_profile(g, samples, chain.energy(), chain.lattice());
    };
    const auto rc = profile(coarse);
    const auto rf = profile(fine);
    // coarse interior point i + 1 sits at fine interior point 2 i + 1
    for (std::size_t i = 0; i < rc.size(); ++i) {
      const double f = rf[2 * i + 1];
      worst_rich = std::max(worst_rich, std::abs((4.0 * f - rc[i]) / 3.0));
      worst_h = std::max(worst_h, std::abs(rc[i]));
      worst_h2 = std::max(worst_h2, std::abs(f));
    }
  }
  const double order =
      (worst_h < 1e-12 || worst_h2 == 0.0) ? 2.0 : std::log2(worst_h / worst_h2);
  return {worst_rich, std::abs(order - 2.0)};
}

// Three-point residual of both parts of phi at the spacing that balances
// truncation (h^2 k^4 / 12) against rounding (4 eps / h^2).
double schrodinger_check(const BlochAction& chain) {
  double worst = 0.0;
  for (const RegionAction& reg : chain.regions()) {
    const double v = reg.region == Region::Well ? 0.0 : chain.lattice().v0();
    const double k = std::sqrt(std::max(std::abs(chain.energy() - v), 1e-2));
    const double width = reg.x_hi - reg.x_lo;
    const double h = std::min(2.7e-4 / k, width / 60.0);
    const auto grid = uniform_grid(0.5 * (reg.x_lo + reg.x_hi), h, 41);
    std::vector<double> re, im;
    for (double x : grid) {
      const auto phi = wavefunction_from_basis(x, reg.basis, reg.constants, chain.superposition());
      re.push_back(phi.real());
      im.push_back(phi.imag());
    }
    worst = std::max({worst, schrodinger_residual(re, chain.energy(), chain.lattice(), grid),
                      schrodinger_residual(im, chain.energy(), chain.lattice(), grid)});
  }
  return worst;
}

void bloch_battery(Battery& b, const RunConfig& cfg, const LatticeSpec& lat) {
  const double energy = *cfg.energy;
  const SuperpositionParams sp = superposition(cfg);
  const double gamma = sp.gamma();
  const BlochPoint bp = bloch_wavenumber(energy, lat);
  if (!bp.allowed) {
    b.add("bloch_defect", HUGE_VAL, "energy lies in a gap");
    return;
  }
  if (gamma == 0.0) {
    for (const char* n : {"constraint_first", "constraint_second", "bloch_relation_tan",
                          "bloch_relation_cos2", "constants_transfer", "bloch_defect", "mobius",
                          "qshje", "qshje_order", "schrodinger", "wavefunction_bloch"}) {
      b.skip(n, "gamma = 0");
    }
    return;
  }
  const double ke = *bp.k_bloch * lat.period();
  std::optional<BlochAction> chain;
  try {
    chain = build_chain(cfg, lat);
  } catch (const Error& e) {
    b.add("constraint_first", HUGE_VAL, e.what());
    return;
  }
  const double mu1 = chain->mu1();
  const double nu1 = chain->nu1();
  const Wavenumbers wn = wavenumbers(energy, lat);

  const auto [r1, r2] = constraint_residuals(mu1, nu1, sp, wn, lat);
  b.add("constraint_first", std::abs(r1));
  b.add("constraint_second", std::abs(r2));

  const auto [a_val, b_val] = constraint_arguments(mu1, nu1, wn, lat);
  const BlochRelationResiduals rel = bloch_relation_residuals(a_val, b_val, gamma, ke);
  if (rel.tan_form) {
    b.add("bloch_relation_tan", std::abs(*rel.tan_form));
  } else {
    b.skip("bloch_relation_tan", "tan Ke pole; cos^2 form applies");
  }
  b.add("bloch_relation_cos2", std::abs(rel.cos2_form));

  try {
    const auto [mu_t, nu_t] = bloch_constants_from_transfer(energy, lat, gamma);
    b.add("constants_transfer", std::max(std::abs(mu1 - mu_t) / std::max(1.0, std::abs(mu_t)),
                                         std::abs(nu1 - nu_t) / std::max(1.0, std::abs(nu_t))));
  } catch (const DegenerateError& e) {
    b.skip("constants_transfer", e.what());
  }

  if (std::isfinite(b_val)) {
    const double g2 = gamma * gamma;
    const double lhs = g2 * (b_val - a_val) * (b_val - a_val);
    const double rhs = (1.0 + g2 * b_val * b_val) + (1.0 + g2 * a_val * a_val) -
                       2.0 * (1.0 + g2 * a_val * b_val);
    b.add("identity_gamma_square", std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  } else {
    b.skip("identity_gamma_square", "B infinite");
  }
  if (wn.regime == Regime::AboveBarrier) {
    try {
      const InterfaceQuantities q = interface_quantities(mu1, nu1, wn, lat);
      const double k1 = *wn.k1;
      const double k2 = wn.k2;
      const double factored = mu1 / k2 *
                              (k1 * std::tan(k2 * lat.c()) + k2 * std::tan(k1 * lat.d()));
      b.add("identity_b_minus_a", std::abs((q.b_val - q.a_val) - factored) /
                                      std::max(1.0, std::abs(factored)));
    } catch (const TanPoleError& e) {
      b.skip("identity_b_minus_a", e.what());
    }
  } else {
    b.skip("identity_b_minus_a", "defined above the barrier only");
  }

  const MobiusMap map = mobius_coefficients(sp, ke);
  const double e = lat.period();
  double defect = 0.0, mobius = 0.0, bohm = 0.0, fshift = 0.0, wf = 0.0, wf_max = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double x = chain->x_begin() + e * (i + 0.5) / 20.0;
    const ActionSample s = chain->sample(x);
    const ActionSample se = chain->sample(x + e);
    defect = std::max(defect, bloch_defect(s.s0, se.s0, sp, ke).defect);
    const cplx z = std::polar(1.0, 2.0 * s.s0);
    const cplx ze = std::polar(1.0, 2.0 * se.s0);
    mobius = std::max(mobius, std::abs(ze - apply_mobius(map, z)));
    const BohmDefect bd = bohm_defect(s.s0, se.s0, ke);
    bohm = std::max(bohm, bd.defect);
    fshift = std::max(fshift, std::abs(bd.f_shift - std::round(bd.f_shift)));
    const cplx phi = chain->wavefunction(x);
    const cplx phi_e = chain->wavefunction(x + e);
    wf = std::max(wf, std::abs(phi_e - std::polar(1.0, ke) * phi));
    wf_max = std::max(wf_max, std::abs(phi));
  }
  b.add("bloch_defect", defect);
  b.add("mobius", mobius);
  if (gamma == 1.0 && cfg.delta == 0.0) {
    b.add("bohm_defect", bohm);
    b.add("bohm_f_shift", fshift);
  } else {
    b.skip("bohm_defect", "requires gamma = 1, delta = 0");
    b.skip("bohm_f_shift", "requires gamma = 1, delta = 0");
  }
  const auto [rich, order] = qshje_check(*chain);
  b.add("qshje", rich, "Richardson combination of h = 1e-3 and 5e-4");
  b.add("qshje_order", order, "|observed order - 2|");
  b.add("schrodinger", schrodinger_check(*chain));
  b.add("wavefunction_bloch", wf / wf_max);
}

Table cmd_verify(const RunConfig& cfg, const LatticeSpec& lat, bool& all_pass) {
  Battery b(cfg);
  const double energy = *cfg.energy;
  b.guarded("dispersion_transfer", [&] {
    return std::abs(dispersion_rhs(energy, lat) - transfer_matrix_oracle(energy, lat).half_trace);
  });
  const SuperpositionParams sp = superposition(cfg);
  b.guarded("dispersion_action", [&] {
    return std::abs(dispersion_via_action(energy, lat, sp) - dispersion_rhs(energy, lat));
  });
  bloch_battery(b, cfg, lat);

  Table t;
  t.header = "check,residual,tolerance,status";
  ordered_json checks = ordered_json::array();
  all_pass = true;
  for (const Check& c : b.checks()) {
    const std::string status = c.skipped ? "skip" : (c.pass() ? "pass" : "fail");
    all_pass = all_pass && c.pass();
    t.rows.push_back(join({c.name, format_number(c.residual), format_number(c.tolerance), status}));
    ordered_json j{{"check", c.name},
                   {"residual", c.residual},
                   {"tolerance", c.tolerance},
                   {"status", status}};
    if (!c.note.empty()) {
      j["note"] = c.note;
    }
    checks.push_back(std::move(j));
  }
  t.json["checks"] = std::move(checks);
  t.json["pass"] = all_pass;
  return t;
}

std::string plot_script(const std::string& command, const std::string& data) {
  std::ostringstream s;
  s << "# gnuplot script for " << data << "\n"
    << "set datafile separator ','\n"
    << "set key autotitle columnhead\n";
  if (command == "dispersion") {
    s << "set xlabel 'E'\nset ylabel 'cos Ke'\n"
      << "set arrow from graph 0, first 1 to graph 1, first 1 nohead dt 2\n"
      << "set arrow from graph 0, first -1 to graph 1, first -1 nohead dt 2\n"
      << "plot '" << data << "' using 1:2 with lines\n";
  } else if (command == "bands") {
    s << "set xlabel 'E'\nset ylabel 'band'\n"
      << "plot '" << data << "' using 2:1:3:1 with xerrorbars notitle\n";
  } else if (command == "action") {
    s << "set xlabel 'x'\n"
      << "plot '" << data << "' using 1:2 with lines title 'S0', '' using 1:4 with lines axes "
      << "x1y2 title 'R'\n";
  } else {
    s << "set style data histograms\nset logscale y\n"
      << "plot '" << data << "' using 2:xtic(1) title 'residual', '' using 3 title 'tolerance'\n";
  }
  return s.str();
}

void emit(const Table& t, const std::string& command, const RunConfig& cfg, const LatticeSpec& lat,
          std::ostream& out) {
  std::string text;
  if (cfg.format == "json") {
    ordered_json j;
    j["command"] = command;
    j["lattice"] = lattice_json(lat);
    j["config"] = config_json(cfg);
    for (const auto& [k, v] : t.json.items()) {
      j[k] = v;
    }
    text = j.dump(2) + "\n";
  } else {
    text = csv_text(t);
  }
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) {
    throw ConfigError("out: cannot open '" + cfg.out + "'");
  }
  f << text;
  if (cfg.plot_script) {
    std::ofstream g(cfg.out + ".gp", std::ios::binary);
    if (!g) {
      throw ConfigError("plot_script: cannot open '" + cfg.out + ".gp'");
    }
    g << plot_script(command, cfg.out);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kronig-Penney band structure through the quantum Hamilton-Jacobi reduced action",
               "kpqhj"};
  app.fallthrough();
  app.require_subcommand(1);

  RunConfig flags;
  std::optional<double> energy;
  std::string config_path;
  std::vector<std::string> tol_args;

  auto* o_v0 = app.add_option("--v0", flags.v0, "barrier height");
  auto* o_c = app.add_option("--c", flags.c, "well width");
  auto* o_d = app.add_option("--d", flags.d, "barrier width");
  auto* o_emin = app.add_option("--emin", flags.e_min, "lower end of the energy range");
  auto* o_emax = app.add_option("--emax", flags.e_max, "upper end of the energy range");
  auto* o_samples = app.add_option("--samples", flags.n_samples, "number of samples");
  auto* o_gamma = app.add_option("--gamma", flags.gamma, "(|alpha| - |beta|) / (|alpha| + |beta|)");
  auto* o_delta = app.add_option("--delta", flags.delta, "(a - b) / 2");
  auto* o_energy = app.add_option("--energy", energy, "energy for action and verify");
  auto* o_format = app.add_option("--format", flags.format, "csv or json");
  auto* o_out = app.add_option("--out", flags.out, "output file (default stdout)");
  auto* o_plot = app.add_flag("--plot-script", flags.plot_script,
                              "also write a gnuplot script next to --out");
  auto* o_periods = app.add_option("--periods", flags.periods, "periods for action and verify");
  app.add_option("--config", config_path, "key=value file; flags take precedence");
  app.add_option("--tol", tol_args, "tolerance override, name=value (verify)");
  app.add_flag("--inject-error", flags.inject_error, "corrupt nu1 (testing only)");

  const std::vector<std::string> commands{"dispersion", "bands", "action", "verify"};
  for (const auto& c : commands) {
    app.add_subcommand(c, c + " table");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) {
        throw ConfigError("config: cannot open '" + config_path + "'");
      }
      std::stringstream buf;
      buf << f.rdbuf();
      apply_config_text(buf.str(), cfg);
    }
    auto given = [](CLI::Option* o) { return o->count() > 0; };
    if (given(o_v0)) cfg.v0 = flags.v0;
    if (given(o_c)) cfg.c = flags.c;
    if (given(o_d)) cfg.d = flags.d;
    if (given(o_emin)) cfg.e_min = flags.e_min;
    if (given(o_emax)) cfg.e_max = flags.e_max;
    if (given(o_samples)) cfg.n_samples = flags.n_samples;
    if (given(o_gamma)) cfg.gamma = flags.gamma;
    if (given(o_delta)) cfg.delta = flags.delta;
    if (given(o_energy)) cfg.energy = energy;
    if (given(o_format)) cfg.format = flags.format;
    if (given(o_out)) cfg.out = flags.out;
    if (given(o_plot)) cfg.plot_script = flags.plot_script;
    if (given(o_periods)) cfg.periods = flags.periods;
    cfg.inject_error = flags.inject_error;
    for (const auto& t : tol_args) {
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("tol: expected name=value, got '" + t + "'");
      }
      set_tolerance(cfg, t.substr(0, eq), parse_double("tol", t.substr(eq + 1)));
    }
    validate(cfg, command);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    const LatticeSpec lat(cfg.v0, cfg.c, cfg.d);
    bool pass = true;
    Table t;
    if (command == "dispersion") {
      t = cmd_dispersion(cfg, lat);
    } else if (command == "bands") {
      t = cmd_bands(cfg, lat);
    } else if (command == "action") {
      t = cmd_action(cfg, lat);
    } else {
      t = cmd_verify(cfg, lat, pass);
    }
    emit(t, command, cfg, lat, out);
    if (!pass) {
      err << "verify: at least one check failed\n";
      return kNumericError;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ForbiddenEnergyError& e) {
    err << "ForbiddenEnergy: " << e.what() << "\n";
    return kNumericError;
  } catch (const Error& e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumericError;
  }
}

}  // namespace kpqhj::cli
