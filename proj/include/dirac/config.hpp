#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "dirac/packet.hpp"
#include "dirac/fdtd.hpp"

namespace dirac {

/// A parsed document: "section.key" -> value. Values are numbers, strings,
/// booleans or flat arrays of numbers/strings.
struct ConfigValue {
  using Array = std::vector<std::variant<double, std::string>>;
  std::variant<double, std::string, bool, Array> v;
  int line = 0;
};
using ConfigDocument = std::map<std::string, ConfigValue>;

/// Flat-section key/value text:
///   # comment
///   [section]
///   key = 1.5 | "text" | true | [1, 2, "a"]
/// Throws ConfigError with the line number on malformed input.
ConfigDocument parse_document(const std::string& text);

enum class Engine { spectral, fdtd, both, none };

struct RunConfig {
  std::string name = "run";
  Engine engine = Engine::spectral;
  std::size_t workers = 0;

  GaussianPacket packet;
  Bispinor polarization;  // as given; normalized when the state is built

  std::size_t nx = 128, ny = 128, nz = 128;
  double spacing = 0.5;
  bool dt_auto = true;
  double dt = 0.0;  // resolved time step for the fdtd engine
  Bootstrap bootstrap = Bootstrap::discrete_eigen;

  double t_end = 0.0;
  std::vector<double> snapshots;
  double sample_interval = 0.25;

  std::string directory = "out";
  bool series = true;
  bool oracle = true;
  bool wsplit = false;
  bool dumps = true;
  /// Bessel-quadrature (rho, z) density at each snapshot (examples i and ii).
  bool cylindrical = false;
  std::vector<std::string> slices;  // plane specs such as "z=0"
  std::vector<std::string> slice_fields = {"density"};

  PositionGrid grid() const;
  PolarizedState state() const;
  bool uses_fdtd() const { return engine == Engine::fdtd || engine == Engine::both; }
  bool uses_spectral() const { return engine == Engine::spectral || engine == Engine::both; }
};

/// Builds and validates a RunConfig. overrides are "section.key=value" items
/// applied on top of the text (the CLI's --set flags). Unknown keys, missing
/// required keys (packet.d, packet.delta, packet.polarization, run.engine) and
/// gate violations raise ConfigError naming the key or gate. The gates are
/// the resolution gate (spacing below one Compton wavelength), the stability
/// gate for the fdtd engine and the 1% norm gate on the sampled state (only
/// when check_norm is set, since it samples the whole lattice).
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                       bool check_norm = false);

/// Runs the norm gate on its own.
void check_norm_gate(const RunConfig& cfg);

/// Resolved configuration in the same text format (all defaults explicit).
std::string to_text(const RunConfig& cfg);

std::string engine_name(Engine e);

/// Built-in presets, one per reproduced figure panel.
std::vector<std::string> preset_names();
/// Preset text; throws ConfigError for an unknown name.
std::string preset_text(const std::string& name);

}  // namespace dirac
