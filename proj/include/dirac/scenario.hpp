#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dirac/config.hpp"

namespace dirac {

struct ScenarioOutcome {
  std::string directory;
  std::string report_path;
  std::vector<std::string> files;  // every file written, relative to directory
  bool partial = false;
};

/// Runs a validated configuration and writes into cfg.directory:
///   config.toml               resolved configuration
///   oracle_series.csv         quadrature series (examples i and ii)
///   wsplit.csv                W+- curves
///   <engine>/series.csv       grid-moment series
///   <engine>/field_t<t>.dfd   field dumps
///   <engine>/<q>_<plane>_t<t>.txt  slices of density and spin densities
///   <engine>/cylindrical_t<t>.txt  Bessel-quadrature density (spectral only)
///   report.json               fits, symmetry metrics, flags
/// Progress goes to log. Engine failures are recorded in the report (with
/// partial = true) and rethrown.
ScenarioOutcome run_scenario(const RunConfig& cfg, std::ostream& log);

/// Time grid 0, dt, 2 dt, ... up to t_end (inclusive within rounding).
std::vector<double> sample_times(double t_end, double interval);

/// Oracle-only outputs used by the "series" and "wsplit" subcommands.
std::string oracle_series_csv(const RunConfig& cfg);
std::string wsplit_csv(const RunConfig& cfg);

}  // namespace dirac
