#include "dirac/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "dirac/error.hpp"
#include "presets.inc"

namespace dirac {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

bool parse_number(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e;
}

std::variant<double, std::string> parse_scalar(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  double d = 0.0;
  if (parse_number(s, d)) return d;
  fail(line, "cannot read value '" + s + "' (numbers, quoted strings, true/false or [arrays])");
}

ConfigValue parse_value(const std::string& raw, int line) {
  const std::string s = trim(raw);
  ConfigValue v;
  v.line = line;
  if (s.empty()) fail(line, "missing value");
  if (s == "true" || s == "false") {
    v.v = (s == "true");
    return v;
  }
  if (s.front() == '[') {
    if (s.back() != ']') fail(line, "unterminated array");
    ConfigValue::Array arr;
    const std::string body = trim(s.substr(1, s.size() - 2));
    if (!body.empty()) {
      std::string item;
      bool in_str = false;
      for (char c : body) {
        if (c == '"') in_str = !in_str;
        if (c == ',' && !in_str) {
          arr.push_back(parse_scalar(item, line));
          item.clear();
        } else {
          item += c;
        }
      }
      if (in_str) fail(line, "unterminated string");
      arr.push_back(parse_scalar(item, line));
    }
    v.v = arr;
    return v;
  }
  auto sc = parse_scalar(s, line);
  if (std::holds_alternative<double>(sc))
    v.v = std::get<double>(sc);
  else
    v.v = std::get<std::string>(sc);
  return v;
}

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

// Schema: every accepted key.
const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "run.name",          "run.engine",         "run.workers",          "packet.d",
      "packet.delta",      "packet.k0",          "packet.m_axial",       "packet.polarization",
      "grid.n",            "grid.nx",            "grid.ny",              "grid.nz",
      "grid.spacing",      "grid.dt",            "grid.bootstrap",       "schedule.t_end",
      "schedule.snapshots", "schedule.sample_interval", "output.directory", "output.series",
      "output.oracle",     "output.wsplit",      "output.dumps",         "output.slices",
      "output.cylindrical",
      "output.slice_fields"};
  return keys;
}

class Reader {
 public:
  explicit Reader(const ConfigDocument& doc) : doc_(doc) {}

  bool has(const std::string& k) const { return doc_.count(k) != 0; }

  double number(const std::string& k, double def) const {
    auto it = doc_.find(k);
    if (it == doc_.end()) return def;
    if (!std::holds_alternative<double>(it->second.v)) fail(it->second.line, k + " must be a number");
    return std::get<double>(it->second.v);
  }
  double required_number(const std::string& k) const {
    if (!has(k)) throw ConfigError("missing required key " + k);
    return number(k, 0.0);
  }
  std::size_t count(const std::string& k, std::size_t def) const {
    const double v = number(k, static_cast<double>(def));
    if (v < 0.0 || v != std::floor(v)) fail(doc_.at(k).line, k + " must be a non-negative integer");
    return static_cast<std::size_t>(v);
  }
  std::string text(const std::string& k, const std::string& def) const {
    auto it = doc_.find(k);
    if (it == doc_.end()) return def;
    if (!std::holds_alternative<std::string>(it->second.v)) fail(it->second.line, k + " must be a quoted string");
    return std::get<std::string>(it->second.v);
  }
  bool flag(const std::string& k, bool def) const {
    auto it = doc_.find(k);
    if (it == doc_.end()) return def;
    if (!std::holds_alternative<bool>(it->second.v)) fail(it->second.line, k + " must be true or false");
    return std::get<bool>(it->second.v);
  }
  std::vector<double> numbers(const std::string& k) const {
    auto it = doc_.find(k);
    if (it == doc_.end()) return {};
    if (std::holds_alternative<double>(it->second.v)) return {std::get<double>(it->second.v)};
    if (!std::holds_alternative<ConfigValue::Array>(it->second.v))
      fail(it->second.line, k + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : std::get<ConfigValue::Array>(it->second.v)) {
      if (!std::holds_alternative<double>(e)) fail(it->second.line, k + " must contain numbers only");
      out.push_back(std::get<double>(e));
    }
    return out;
  }
  std::vector<std::string> strings(const std::string& k, const std::vector<std::string>& def) const {
    auto it = doc_.find(k);
    if (it == doc_.end()) return def;
    if (std::holds_alternative<std::string>(it->second.v)) return {std::get<std::string>(it->second.v)};
    if (!std::holds_alternative<ConfigValue::Array>(it->second.v))
      fail(it->second.line, k + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : std::get<ConfigValue::Array>(it->second.v)) {
      if (!std::holds_alternative<std::string>(e)) fail(it->second.line, k + " must contain strings only");
      out.push_back(std::get<std::string>(e));
    }
    return out;
  }
  int line(const std::string& k) const { return has(k) ? doc_.at(k).line : 0; }

 private:
  const ConfigDocument& doc_;
};

Engine parse_engine(const std::string& s) {
  if (s == "spectral") return Engine::spectral;
  if (s == "fdtd") return Engine::fdtd;
  if (s == "both") return Engine::both;
  if (s == "none") return Engine::none;
  throw ConfigError("run.engine must be \"spectral\", \"fdtd\", \"both\" or \"none\"; got \"" + s + "\"");
}

Bootstrap parse_bootstrap(const std::string& s) {
  if (s == "discrete-eigen") return Bootstrap::discrete_eigen;
  if (s == "taylor2") return Bootstrap::taylor2;
  if (s == "spectral") return Bootstrap::spectral;
  throw ConfigError("grid.bootstrap must be \"discrete-eigen\", \"taylor2\" or \"spectral\"; got \"" + s + "\"");
}

std::string bootstrap_name(Bootstrap b) {
  switch (b) {
    case Bootstrap::taylor2:
      return "taylor2";
    case Bootstrap::spectral:
      return "spectral";
    default:
      return "discrete-eigen";
  }
}

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

std::string brief(double v) {
  std::ostringstream o;
  o << std::setprecision(6) << v;
  return o.str();
}

}  // namespace

ConfigDocument parse_document(const std::string& text) {
  ConfigDocument doc;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[' && s.find('=') == std::string::npos) {
      if (s.back() != ']') fail(line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) fail(line, "empty section name");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) fail(line, "missing key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (doc.count(full)) fail(line, "duplicate key " + full);
    doc[full] = parse_value(s.substr(eq + 1), line);
  }
  return doc;
}

std::string engine_name(Engine e) {
  switch (e) {
    case Engine::spectral:
      return "spectral";
    case Engine::fdtd:
      return "fdtd";
    case Engine::both:
      return "both";
    default:
      return "none";
  }
}

PositionGrid RunConfig::grid() const { return PositionGrid::centered(nx, ny, nz, spacing); }

PolarizedState RunConfig::state() const { return PolarizedState(packet, polarization); }

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides, bool check_norm) {
  ConfigDocument doc = parse_document(text);
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' must look like section.key=value");
    const std::string key = trim(o.substr(0, eq));
    if (key.find('.') == std::string::npos) throw ConfigError("override key '" + key + "' needs a section");
    std::string value = trim(o.substr(eq + 1));
    // Bare words are strings on the command line.
    double dummy = 0.0;
    if (!value.empty() && value.front() != '"' && value.front() != '[' && value != "true" && value != "false" &&
        !parse_number(value, dummy))
      value = "\"" + value + "\"";
    doc[key] = parse_value(value, 0);
  }
  for (const auto& [k, v] : doc)
    if (!known_keys().count(k))
      throw ConfigError("unknown key " + k + (v.line ? " (line " + std::to_string(v.line) + ")" : ""));

  const Reader r(doc);
  RunConfig c;
  c.name = r.text("run.name", c.name);
  if (!r.has("run.engine")) throw ConfigError("missing required key run.engine");
  c.engine = parse_engine(r.text("run.engine", "spectral"));
  c.workers = r.count("run.workers", 0);

  c.packet.d = r.required_number("packet.d");
  c.packet.delta = r.required_number("packet.delta");
  c.packet.k0 = r.number("packet.k0", 0.0);
  const double m = r.number("packet.m_axial", 0.0);
  if (m != std::floor(m)) throw ConfigError("packet.m_axial must be an integer");
  c.packet.m_axial = static_cast<int>(m);
  if (!(c.packet.d > 0.0)) throw ConfigError("packet.d must be positive");
  if (!(c.packet.delta > 0.0)) throw ConfigError("packet.delta must be positive");
  if (!std::isfinite(c.packet.k0)) throw ConfigError("packet.k0 must be finite");

  if (!r.has("packet.polarization")) throw ConfigError("missing required key packet.polarization");
  const std::vector<double> pol = r.numbers("packet.polarization");
  if (pol.size() != 8)
    throw ConfigError("packet.polarization needs 8 numbers (re, im of the four components); got " +
                      std::to_string(pol.size()));
  for (std::size_t i = 0; i < 4; ++i) c.polarization[i] = cplx{pol[2 * i], pol[2 * i + 1]};
  if (!(c.polarization.norm2() > 0.0)) throw ConfigError("packet.polarization has zero norm");

  const std::size_t n = r.count("grid.n", 128);
  c.nx = r.count("grid.nx", n);
  c.ny = r.count("grid.ny", n);
  c.nz = r.count("grid.nz", n);
  if (c.nx < 8 || c.ny < 8 || c.nz < 8) throw ConfigError("grid needs at least 8 nodes per axis");
  c.spacing = r.number("grid.spacing", c.spacing);
  if (!(c.spacing > 0.0)) throw ConfigError("grid.spacing must be positive");
  if (!(c.spacing < 1.0))
    throw ConfigError("resolution gate: grid.spacing = " + brief(c.spacing) +
                      " must be below one Compton wavelength (1.0)");
  c.bootstrap = parse_bootstrap(r.text("grid.bootstrap", "discrete-eigen"));

  if (r.has("grid.dt") && std::holds_alternative<std::string>(doc.at("grid.dt").v)) {
    if (r.text("grid.dt", "auto") != "auto") throw ConfigError("grid.dt must be a number or \"auto\"");
    c.dt_auto = true;
  } else if (r.has("grid.dt")) {
    c.dt_auto = false;
    c.dt = r.number("grid.dt", 0.0);
    if (!(c.dt > 0.0)) throw ConfigError("grid.dt must be positive");
  }
  if (c.dt_auto) c.dt = 0.5 * max_stable_dt(c.spacing);
  if (c.uses_fdtd()) {
    const double margin = stability_margin(c.spacing, c.dt);
    if (!(margin > 0.0))
      throw ConfigError("stability gate: margin d^4(1-dt^2) - 2d^2dt^2 - 4dt^2 = " + brief(margin) +
                        " for d = " + brief(c.spacing) + ", dt = " + brief(c.dt) + "; largest stable dt is " +
                        brief(max_stable_dt(c.spacing)));
  }

  c.t_end = r.number("schedule.t_end", 0.0);
  if (!(c.t_end >= 0.0)) throw ConfigError("schedule.t_end must be non-negative");
  c.snapshots = r.numbers("schedule.snapshots");
  for (double t : c.snapshots)
    if (t < 0.0 || t > c.t_end + 1e-12)
      throw ConfigError("schedule.snapshots: time " + brief(t) + " lies outside [0, t_end]");
  c.sample_interval = r.number("schedule.sample_interval", c.sample_interval);
  if (!(c.sample_interval > 0.0)) throw ConfigError("schedule.sample_interval must be positive");

  c.directory = r.text("output.directory", "out/" + c.name);
  c.series = r.flag("output.series", c.series);
  c.oracle = r.flag("output.oracle", c.oracle);
  c.wsplit = r.flag("output.wsplit", c.wsplit);
  c.dumps = r.flag("output.dumps", c.dumps);
  c.cylindrical = r.flag("output.cylindrical", c.cylindrical);
  c.slices = r.strings("output.slices", {});
  c.slice_fields = r.strings("output.slice_fields", c.slice_fields);
  for (const std::string& f : c.slice_fields)
    if (f != "density" && f != "spin_x" && f != "spin_y" && f != "spin_z")
      throw ConfigError("output.slice_fields: unknown field \"" + f +
                        "\" (density, spin_x, spin_y, spin_z)");
  for (const std::string& s : c.slices) {
    const auto eq = s.find('=');
    const std::string ax = eq == std::string::npos ? "" : trim(s.substr(0, eq));
    double v = 0.0;
    if ((ax != "x" && ax != "y" && ax != "z") || !parse_number(trim(s.substr(eq + 1)), v))
      throw ConfigError("output.slices: cannot read plane \"" + s + "\" (use x=..., y=... or z=...)");
  }
  if (c.cylindrical && (classify(normalized(c.polarization)) == Example::none || c.packet.m_axial != 0))
    throw ConfigError("output.cylindrical needs the (1,0,1,0) or (1,0,0,1) polarization and packet.m_axial = 0");
  if (c.packet.m_axial != 0 && c.wsplit)
    throw ConfigError("output.wsplit needs packet.m_axial = 0 (axially symmetric envelope)");

  if (check_norm) check_norm_gate(c);
  return c;
}

void check_norm_gate(const RunConfig& c) {
  const SampledState s = initial_bispinor_field(c.state(), c.grid());
  if (s.under_resolved)
    throw ConfigError("norm gate: sampled initial state has discrete norm " + brief(s.discrete_norm) +
                      ", more than 1% away from 1; refine grid.spacing or enlarge the lattice");
}

std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  auto str = [](const std::string& s) { return "\"" + s + "\""; };
  auto list = [&](const std::vector<std::string>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + str(v[i]);
    return s + "]";
  };
  o << "[run]\n"
    << "name = " << str(c.name) << "\n"
    << "engine = " << str(engine_name(c.engine)) << "\n"
    << "workers = " << c.workers << "\n\n"
    << "[packet]\n"
    << "d = " << fmt(c.packet.d) << "\n"
    << "delta = " << fmt(c.packet.delta) << "\n"
    << "k0 = " << fmt(c.packet.k0) << "\n"
    << "m_axial = " << c.packet.m_axial << "\n"
    << "polarization = [";
  for (std::size_t i = 0; i < 4; ++i)
    o << (i ? ", " : "") << fmt(c.polarization[i].real()) << ", " << fmt(c.polarization[i].imag());
  o << "]\n\n"
    << "[grid]\n"
    << "nx = " << c.nx << "\n"
    << "ny = " << c.ny << "\n"
    << "nz = " << c.nz << "\n"
    << "spacing = " << fmt(c.spacing) << "\n"
    << "dt = " << fmt(c.dt) << "\n"
    << "bootstrap = " << str(bootstrap_name(c.bootstrap)) << "\n\n"
    << "[schedule]\n"
    << "t_end = " << fmt(c.t_end) << "\n"
    << "snapshots = [";
  for (std::size_t i = 0; i < c.snapshots.size(); ++i) o << (i ? ", " : "") << fmt(c.snapshots[i]);
  o << "]\n"
    << "sample_interval = " << fmt(c.sample_interval) << "\n\n"
    << "[output]\n"
    << "directory = " << str(c.directory) << "\n"
    << "series = " << (c.series ? "true" : "false") << "\n"
    << "oracle = " << (c.oracle ? "true" : "false") << "\n"
    << "wsplit = " << (c.wsplit ? "true" : "false") << "\n"
    << "dumps = " << (c.dumps ? "true" : "false") << "\n"
    << "cylindrical = " << (c.cylindrical ? "true" : "false") << "\n"
    << "slices = " << list(c.slices) << "\n"
    << "slice_fields = " << list(c.slice_fields) << "\n";
  return o.str();
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : kPresets) names.emplace_back(p.name);
  return names;
}

std::string preset_text(const std::string& name) {
  for (const auto& p : kPresets)
    if (name == p.name) return p.text;
  std::string known;
  for (const auto& p : kPresets) known += std::string(known.empty() ? "" : ", ") + p.name;
  throw ConfigError("unknown preset \"" + name + "\" (known: " + known + ")");
}

}  // namespace dirac
