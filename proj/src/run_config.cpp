#include "dnf/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <variant>

namespace dnf {

namespace {

// --- strict parser for the TOML subset the run config uses ------------------
// Supported grammar: [section] headers, key = value lines, values being
// quoted strings, booleans, numbers, or flat numeric arrays. Comments start
// at '#' outside quotes.

struct TomlValue {
  std::variant<std::string, bool, double, std::vector<double>> v;
  int line = 0;
};

using TomlTable = std::map<std::string, std::map<std::string, TomlValue>>;

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string drop_comment(const std::string& s) {
  bool in_str = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

double parse_number(const std::string& tok, int line) {
  const std::string t = strip(tok);
  double d = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, d);
  if (ec != std::errc() || ptr != end) {
    throw config_error("line " + std::to_string(line) + ": '" + t + "' is not a number");
  }
  return d;
}

TomlValue parse_value(const std::string& raw, int line) {
  TomlValue out;
  out.line = line;
  const std::string t = strip(raw);
  if (t.empty()) throw config_error("line " + std::to_string(line) + ": missing value");
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"') {
      throw config_error("line " + std::to_string(line) + ": unterminated string");
    }
    out.v = t.substr(1, t.size() - 2);
  } else if (t == "true" || t == "false") {
    out.v = (t == "true");
  } else if (t.front() == '[') {
    if (t.back() != ']') {
      throw config_error("line " + std::to_string(line) + ": unterminated array");
    }
    std::vector<double> arr;
    const std::string inner = t.substr(1, t.size() - 2);
    std::string tok;
    std::istringstream is(inner);
    while (std::getline(is, tok, ',')) {
      if (strip(tok).empty()) continue;
      arr.push_back(parse_number(tok, line));
    }
    out.v = arr;
  } else {
    out.v = parse_number(t, line);
  }
  return out;
}

TomlTable parse_toml(const std::string& text) {
  TomlTable table;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = strip(drop_comment(line));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw config_error("line " + std::to_string(lineno) + ": bad section");
      section = strip(t.substr(1, t.size() - 2));
      if (section.empty()) throw config_error("line " + std::to_string(lineno) + ": bad section");
      table[section];
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw config_error("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    if (section.empty()) {
      throw config_error("line " + std::to_string(lineno) + ": key outside any [section]");
    }
    const std::string key = strip(t.substr(0, eq));
    if (key.empty()) throw config_error("line " + std::to_string(lineno) + ": empty key");
    table[section][key] = parse_value(t.substr(eq + 1), lineno);
  }
  return table;
}

// Typed reads with field-path diagnostics.
struct SectionReader {
  const std::string section;
  std::map<std::string, TomlValue> entries;

  template <typename T>
  T take(const std::string& key, const T& fallback) {
    auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    const TomlValue val = it->second;
    entries.erase(it);
    if (const T* p = std::get_if<T>(&val.v)) return *p;
    throw config_error("[" + section + "] " + key + ": wrong value type");
  }

  double take_num(const std::string& key, double fallback) { return take<double>(key, fallback); }

  void done() const {
    if (!entries.empty()) {
      throw config_error("[" + section + "] " + entries.begin()->first + ": unknown key");
    }
  }
};

SectionReader reader_for(TomlTable& table, const std::string& name) {
  SectionReader r{name, {}};
  auto it = table.find(name);
  if (it != table.end()) {
    r.entries = std::move(it->second);
    table.erase(it);
  }
  return r;
}

PotentialSpec read_potential(TomlTable& table, const std::string& section) {
  SectionReader r = reader_for(table, section);
  PotentialSpec s;
  s.family = r.take<std::string>("family", "quadratic");
  s.epsilon = r.take_num("epsilon", 0.0);
  s.diag = r.take<std::vector<double>>("diag", {});
  const double theta = r.take_num("theta", -1.0);
  if (theta >= 0.0) {
    s.has_bounds_override = true;
    s.bounds_override.theta = theta;
    s.bounds_override.Theta = r.take_num("Theta", theta);
    s.bounds_override.lambda = r.take_num("lambda", theta);
    s.bounds_override.Lambda = r.take_num("Lambda", s.bounds_override.Theta);
    s.bounds_override.alpha = r.take_num("alpha", 1.0);
    s.bounds_override.holder_const = r.take_num("holder_const", 0.0);
  }
  r.done();
  return s;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_array(const std::vector<double>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out + "]";
}

void emit_potential(std::ostringstream& os, const std::string& name, const PotentialSpec& s) {
  os << "[" << name << "]\n";
  os << "family = \"" << s.family << "\"\n";
  os << "epsilon = " << fmt(s.epsilon) << "\n";
  os << "diag = " << fmt_array(s.diag) << "\n";
  if (s.has_bounds_override) {
    os << "theta = " << fmt(s.bounds_override.theta) << "\n";
    os << "Theta = " << fmt(s.bounds_override.Theta) << "\n";
    os << "lambda = " << fmt(s.bounds_override.lambda) << "\n";
    os << "Lambda = " << fmt(s.bounds_override.Lambda) << "\n";
    os << "alpha = " << fmt(s.bounds_override.alpha) << "\n";
    os << "holder_const = " << fmt(s.bounds_override.holder_const) << "\n";
  }
  os << "\n";
}

}  // namespace

void RunConfig::validate() const {
  if (n < 1 || n > kMaxDim) throw config_error("[domain] n: must be 1 or 2");
  for (int d = 0; d < n; ++d) {
    if (!(hi[d] > lo[d])) throw config_error("[domain] extents: need lo < hi");
    if (cells[d] < 3) throw config_error("[domain] cells: need at least 3 per axis");
  }
  if (!(T > 0.0)) throw config_error("[time] T: must be positive");
  if (N < 1) throw config_error("[time] N: must be at least 1");
  if (m < 1) throw config_error("[psi] m: must be at least 1");
  solver.validate();
  if (profile != "zero" && profile != "eigenmode" && profile != "bump" &&
      profile != "random-smooth") {
    throw config_error("[initial] profile: unknown profile '" + profile + "'");
  }
  if (!(amplitude == amplitude)) throw config_error("[initial] amplitude: not a number");
  // analytics windows are validated where they feed computations; the decay
  // parameters are checked eagerly so a bad config fails before any solve
  thresholds(decay_epsilon, decay_rho, decay_vartheta, decay_L, decay_gamma, n, 1.0);
  if (decay_scales < 1) throw config_error("[analytics] decay_scales: must be >= 1");
  if (!(map_radius > 0.0)) throw config_error("[analytics] map_radius: must be positive");
  for (int s : frac_h_steps) {
    if (s < 1) throw config_error("[analytics] h_steps: entries must be >= 1");
  }
  if (output_dir.empty()) throw config_error("[output] dir: must not be empty");
}

RunConfig parse_run_config_text(const std::string& text) {
  TomlTable table = parse_toml(text);
  RunConfig cfg;

  {
    SectionReader r = reader_for(table, "domain");
    cfg.n = static_cast<int>(r.take_num("n", 1));
    const auto lo = r.take<std::vector<double>>("lo", {0.0});
    const auto hi = r.take<std::vector<double>>("hi", {1.0});
    const auto cells = r.take<std::vector<double>>("cells", {99});
    if (static_cast<int>(lo.size()) != cfg.n || static_cast<int>(hi.size()) != cfg.n ||
        static_cast<int>(cells.size()) != cfg.n) {
      throw config_error("[domain] lo/hi/cells: need exactly n entries");
    }
    for (int d = 0; d < cfg.n && d < kMaxDim; ++d) {
      cfg.lo[d] = lo[d];
      cfg.hi[d] = hi[d];
      cfg.cells[d] = static_cast<int>(cells[d]);
    }
    r.done();
  }
  {
    SectionReader r = reader_for(table, "time");
    cfg.T = r.take_num("T", cfg.T);
    cfg.N = static_cast<int>(r.take_num("N", cfg.N));
    r.done();
  }
  {
    SectionReader r = reader_for(table, "psi");
    // [psi] carries m as well as the family selection
    cfg.m = static_cast<int>(r.take_num("m", 1));
    table["psi"] = std::move(r.entries);
  }
  cfg.psi = read_potential(table, "psi");
  cfg.F = read_potential(table, "F");
  {
    SectionReader r = reader_for(table, "initial");
    cfg.profile = r.take<std::string>("profile", cfg.profile);
    cfg.seed = static_cast<unsigned>(r.take_num("seed", cfg.seed));
    cfg.amplitude = r.take_num("amplitude", cfg.amplitude);
    r.done();
  }
  {
    SectionReader r = reader_for(table, "solver");
    cfg.solver.tol = r.take_num("tol", cfg.solver.tol);
    cfg.solver.max_newton = static_cast<int>(r.take_num("max_newton", cfg.solver.max_newton));
    cfg.solver.armijo_slope = r.take_num("armijo_slope", cfg.solver.armijo_slope);
    cfg.solver.armijo_backtrack = r.take_num("armijo_backtrack", cfg.solver.armijo_backtrack);
    cfg.solver.cg_rel_tol = r.take_num("cg_rel_tol", cfg.solver.cg_rel_tol);
    r.done();
  }
  {
    SectionReader r = reader_for(table, "analytics");
    cfg.analytics_seed = static_cast<unsigned>(r.take_num("seed", cfg.analytics_seed));
    cfg.decay_L = r.take_num("decay_L", cfg.decay_L);
    cfg.decay_vartheta = r.take_num("decay_vartheta", cfg.decay_vartheta);
    cfg.decay_epsilon = r.take_num("decay_epsilon", cfg.decay_epsilon);
    cfg.decay_rho = r.take_num("decay_rho", cfg.decay_rho);
    cfg.decay_gamma = r.take_num("decay_gamma", cfg.decay_gamma);
    cfg.decay_scales = static_cast<int>(r.take_num("decay_scales", cfg.decay_scales));
    cfg.map_radius = r.take_num("map_radius", cfg.map_radius);
    cfg.dimension_radii = r.take<std::vector<double>>("dimension_radii", cfg.dimension_radii);
    const auto hs = r.take<std::vector<double>>("h_steps", {1, 2, 4, 8});
    cfg.frac_h_steps.clear();
    for (double h : hs) cfg.frac_h_steps.push_back(static_cast<int>(h));
    const auto region = r.take<std::vector<double>>(
        "region", {cfg.region.xlo[0], cfg.region.xhi[0], cfg.region.t0, cfg.region.t1});
    if (region.size() != static_cast<size_t>(2 * cfg.n + 2)) {
      throw config_error("[analytics] region: need 2n+2 entries (box corners then t0, t1)");
    }
    for (int d = 0; d < cfg.n; ++d) {
      cfg.region.xlo[d] = region[d];
      cfg.region.xhi[d] = region[cfg.n + d];
    }
    cfg.region.t0 = region[2 * cfg.n];
    cfg.region.t1 = region[2 * cfg.n + 1];
    r.done();
  }
  {
    SectionReader r = reader_for(table, "output");
    cfg.output_dir = r.take<std::string>("dir", cfg.output_dir);
    r.done();
  }
  if (!table.empty()) {
    throw config_error("[" + table.begin()->first + "]: unknown section");
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_run_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw config_error("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_run_config_text(ss.str());
}

std::string to_toml(const RunConfig& cfg) {
  std::ostringstream os;
  os << "[domain]\n";
  os << "n = " << cfg.n << "\n";
  std::vector<double> lo(cfg.lo.begin(), cfg.lo.begin() + cfg.n);
  std::vector<double> hi(cfg.hi.begin(), cfg.hi.begin() + cfg.n);
  std::vector<double> cells;
  for (int d = 0; d < cfg.n; ++d) cells.push_back(cfg.cells[d]);
  os << "lo = " << fmt_array(lo) << "\n";
  os << "hi = " << fmt_array(hi) << "\n";
  os << "cells = " << fmt_array(cells) << "\n\n";

  os << "[time]\n";
  os << "T = " << fmt(cfg.T) << "\n";
  os << "N = " << cfg.N << "\n\n";

  std::ostringstream psi_os;
  emit_potential(psi_os, "psi", cfg.psi);
  std::string psi_text = psi_os.str();
  // insert m right after the section header
  psi_text.insert(psi_text.find('\n') + 1, "m = " + std::to_string(cfg.m) + "\n");
  os << psi_text;
  emit_potential(os, "F", cfg.F);

  os << "[initial]\n";
  os << "profile = \"" << cfg.profile << "\"\n";
  os << "seed = " << cfg.seed << "\n";
  os << "amplitude = " << fmt(cfg.amplitude) << "\n\n";

  os << "[solver]\n";
  os << "tol = " << fmt(cfg.solver.tol) << "\n";
  os << "max_newton = " << cfg.solver.max_newton << "\n";
  os << "armijo_slope = " << fmt(cfg.solver.armijo_slope) << "\n";
  os << "armijo_backtrack = " << fmt(cfg.solver.armijo_backtrack) << "\n";
  os << "cg_rel_tol = " << fmt(cfg.solver.cg_rel_tol) << "\n\n";

  os << "[analytics]\n";
  os << "seed = " << cfg.analytics_seed << "\n";
  os << "decay_L = " << fmt(cfg.decay_L) << "\n";
  os << "decay_vartheta = " << fmt(cfg.decay_vartheta) << "\n";
  os << "decay_epsilon = " << fmt(cfg.decay_epsilon) << "\n";
  os << "decay_rho = " << fmt(cfg.decay_rho) << "\n";
  os << "decay_gamma = " << fmt(cfg.decay_gamma) << "\n";
  os << "decay_scales = " << cfg.decay_scales << "\n";
  os << "map_radius = " << fmt(cfg.map_radius) << "\n";
  os << "dimension_radii = " << fmt_array(cfg.dimension_radii) << "\n";
  std::vector<double> hs(cfg.frac_h_steps.begin(), cfg.frac_h_steps.end());
  os << "h_steps = " << fmt_array(hs) << "\n";
  std::vector<double> region;
  for (int d = 0; d < cfg.n; ++d) region.push_back(cfg.region.xlo[d]);
  for (int d = 0; d < cfg.n; ++d) region.push_back(cfg.region.xhi[d]);
  region.push_back(cfg.region.t0);
  region.push_back(cfg.region.t1);
  os << "region = " << fmt_array(region) << "\n\n";

  os << "[output]\n";
  os << "dir = \"" << cfg.output_dir << "\"\n";
  return os.str();
}

SnapshotField initial_datum(const RunConfig& cfg) {
  const BoxDomain dom = cfg.domain();
  SnapshotField g(dom, cfg.m);
  const int nodes = dom.node_count();

  std::vector<double> coeff;
  if (cfg.profile == "random-smooth") {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int j = 1; j <= 4; ++j) coeff.push_back(unif(rng) / (j * j));
  }

  for (int q = 0; q < nodes; ++q) {
    const auto x = dom.node_coord(dom.unflat(q));
    std::array<double, kMaxDim> s{0.0, 0.0};
    for (int d = 0; d < dom.n; ++d) s[d] = (x[d] - dom.lo[d]) / (dom.hi[d] - dom.lo[d]);
    double value = 0.0;
    if (cfg.profile == "zero") {
      value = 0.0;
    } else if (cfg.profile == "eigenmode") {
      value = cfg.amplitude;
      for (int d = 0; d < dom.n; ++d) value *= std::sin(M_PI * s[d]);
    } else if (cfg.profile == "bump") {
      value = cfg.amplitude;
      for (int d = 0; d < dom.n; ++d) value *= 16.0 * s[d] * s[d] * (1.0 - s[d]) * (1.0 - s[d]);
    } else {  // random-smooth
      for (int j = 1; j <= 4; ++j) {
        double mode = coeff[j - 1] * cfg.amplitude;
        for (int d = 0; d < dom.n; ++d) mode *= std::sin(j * M_PI * s[d]);
        value += mode;
      }
    }
    for (int c = 0; c < cfg.m; ++c) g.at(q, c) = value;
  }
  return g;
}

std::pair<ScalarPotential, MatrixPotential> build_potentials(const RunConfig& cfg) {
  ScalarPotential psi = make_scalar_potential(cfg.psi, cfg.m);
  MatrixPotential F = make_matrix_potential(cfg.F, cfg.m, cfg.n);
  return {psi, F};
}

}  // namespace dnf
