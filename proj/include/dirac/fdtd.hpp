#pragma once

#include <cstdint>
#include <vector>

#include "dirac/grid.hpp"

namespace dirac {

/// H Psi with symmetric differences (f[i+1] - f[i-1]) / 2h along each axis
/// and zero values outside the lattice (hard wall).
void hamiltonian_apply(const BispinorField& in, BispinorField& out);
BispinorField hamiltonian_apply(const BispinorField& in);

/// d^4 (1 - dt^2) - 2 d^2 dt^2 - 4 dt^2 for bin size d. Positive means stable
/// according to the plane-wave analysis of the scheme.
double stability_margin(double d, double dt);
/// Same, for a lattice; throws ConfigError unless dx = dy = dz.
double stability_margin(const PositionGrid& grid, double dt);
/// Root of the margin in dt: d^2 / sqrt(d^4 + 2 d^2 + 4).
double max_stable_dt(double d);

/// 1 / sqrt(1 + sum_a 1/h_a^2): the time step at which dt times the largest
/// eigenvalue of the discrete operator reaches 1. Beyond it the recurrence
/// has growing modes; below it every mode has unit amplification.
double discrete_stability_limit(const PositionGrid& grid);

enum class Bootstrap {
  /// Psi - i dt H Psi - dt^2/2 H^2 Psi.
  taylor2,
  /// [sqrt(1 - dt^2 H^2) - i dt H] Psi, summed as a power series in dt^2 H^2.
  /// This is the recurrence's own forward branch, so no backward-running
  /// (parasitic) component is seeded and the norm is conserved to rounding.
  discrete_eigen,
  /// exp(-i H dt) of the continuum operator, by the spectral engine.
  spectral,
};

/// Psi(dt) from Psi(0).
BispinorField bootstrap_first_step(const BispinorField& field0, double dt, Bootstrap mode = Bootstrap::taylor2);

/// Two-level state of the recurrence
///   Psi(t + 2 dt) = Psi(t) - 2 i dt H Psi(t + dt).
/// psi_prev holds Psi(t), psi_curr holds Psi(t + dt), with t = step_count dt.
/// norm_history[k] is the discrete norm of psi_prev after k steps.
struct LeapFrogState {
  BispinorField psi_prev;
  BispinorField psi_curr;
  double dt = 0.0;
  std::size_t step_count = 0;
  std::vector<double> norm_history;
  /// Norm the instability check compares against (the sampled initial norm).
  double reference_norm = 1.0;
  /// Mass fraction within two cells of the walls at the last step.
  double boundary_fraction = 0.0;
  /// Discrete norm of psi_curr.
  double curr_norm = 0.0;

  double time() const { return psi_prev.time; }
};

/// Builds the state from Psi(0). With check_gate the stability margin must be
/// positive (ConfigError otherwise).
LeapFrogState make_leapfrog(const BispinorField& field0, double dt, Bootstrap mode = Bootstrap::discrete_eigen,
                            bool check_gate = true);

/// Advances one step. Throws NumericalError when the norm departs from the
/// reference by more than norm_tol (relative).
void step(LeapFrogState& state, double norm_tol = 1e-3);

struct RunOptions {
  std::vector<std::size_t> snapshot_steps;
  double norm_tol = 1e-3;
  /// Boundary-layer mass fraction that counts as waves reaching the walls.
  double reflection_threshold = 1e-6;
  bool stop_on_reflection = false;
};

struct RunResult {
  LeapFrogState state;
  std::vector<BispinorField> snapshots;
  /// Set when the boundary-layer mass exceeded the threshold; reflected waves
  /// may have re-entered the interior from that step on.
  bool reflection_flag = false;
  std::size_t reflection_step = 0;
};

/// Iterates step. Snapshots (of psi_prev) are copied at the scheduled step
/// counts; a scheduled 0 copies the initial field. Requires the initial
/// boundary mass fraction below the reflection threshold (ConfigError).
RunResult run(LeapFrogState state, std::size_t n_steps, const RunOptions& options = {});

/// Adds seeded complex Gaussian noise of the given amplitude to every node.
void perturb(BispinorField& field, double amplitude, std::uint64_t seed);

}  // namespace dirac
