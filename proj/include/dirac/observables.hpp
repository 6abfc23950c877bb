#pragma once

#include <string>
#include <vector>

#include "dirac/grid.hpp"
#include "dirac/packet.hpp"
#include "dirac/quadrature.hpp"
#include "dirac/spectral.hpp"

namespace dirac {

enum class Provenance { grid_moment, quadrature_oracle };

/// Time-stamped 3-vectors (velocities in c, spins dimensionless) or scalars
/// stored in the x slot.
struct ObservableSeries {
  std::string label;
  Provenance provenance = Provenance::grid_moment;
  std::vector<double> times;
  std::vector<Vec3> values;

  std::vector<double> component(Axis a) const;
  /// Times strictly increasing, values finite; velocity series also need
  /// |components| <= 1 (checked with a 1e-12 allowance).
  void validate(bool is_velocity = false) const;
};

// ---------------------------------------------------------------------------
// Densities.

ScalarField probability_density(const BispinorField& field);

struct SpinDensityField {
  ScalarField sx, sy, sz;
  double time = 0.0;
};

/// Sigma_x = 2 Re(Psi1* Psi2 + Psi3* Psi4), Sigma_y = 2 Im(Psi1* Psi2 + Psi3* Psi4),
/// Sigma_z = |Psi1|^2 - |Psi2|^2 + |Psi3|^2 - |Psi4|^2.
SpinDensityField spin_density(const BispinorField& field);

// ---------------------------------------------------------------------------
// Grid moments. Alpha and Sigma act pointwise, so the same sums apply to a
// position-space field and to a momentum-space field.

struct GridMoments {
  Vec3 velocity{};  // <alpha>, normalized by the field norm
  Vec3 spin{};      // <Sigma>, normalized
  double norm = 0.0;
};

GridMoments grid_moments(const BispinorField& field);
/// <alpha> of a momentum-space field (SpectralEvolver::momentum_field).
Vec3 velocity_expectation_grid(const BispinorField& field_momentum);
/// <alpha> and <Sigma> from the spectral engine at time t, normalized.
GridMoments spectral_moments(const SpectralEvolver& engine, double t);
ObservableSeries spectral_velocity_series(const SpectralEvolver& engine, const std::vector<double>& times);
ObservableSeries spectral_spin_series(const SpectralEvolver& engine, const std::vector<double>& times);

/// Mean position sum r |Psi|^2 / sum |Psi|^2 of a position-space field.
Vec3 mean_position(const BispinorField& field);

// ---------------------------------------------------------------------------
// Quadrature oracles for the two closed-form polarizations. The integrands
// are the momentum-space velocity and spin densities weighted by |f(p)|^2;
// the transverse components that vanish by symmetry are computed anyway.

Vec3 velocity_oracle_example_i(const GaussianPacket& packet, double t);
Vec3 velocity_oracle_example_ii(const GaussianPacket& packet, double t);
Vec3 spin_oracle(const GaussianPacket& packet, Example polarization, double t);

/// Same integrals on one shared rule for a whole time grid.
ObservableSeries velocity_oracle_series(const GaussianPacket& packet, Example polarization,
                                        const std::vector<double>& times);
ObservableSeries spin_oracle_series(const GaussianPacket& packet, Example polarization,
                                    const std::vector<double>& times);

/// Time-independent part of the velocity in closed form: the integral of the
/// non-oscillating term (p_z^2/lambda^2 for example i along z, p_x^2/lambda^2
/// for example ii along x).
double drift_constant_example_i(const GaussianPacket& packet);
double drift_constant_example_ii(const GaussianPacket& packet);

// ---------------------------------------------------------------------------
// Drift velocity for an arbitrary polarization.

struct DriftVelocity {
  /// int |f|^2 p_mu / lambda^2 [<beta> + sum_nu p_nu <alpha_nu>] d^3p.
  double total = 0.0;
  /// <alpha_mu> int |f|^2 p_mu^2 / lambda^2 d^3p.
  double initial_velocity_term = 0.0;
  /// <beta> int |f|^2 p_mu / lambda^2 d^3p.
  double mass_term = 0.0;
  /// sum_{nu != mu} <alpha_nu> int |f|^2 p_mu p_nu / lambda^2 d^3p; zero for
  /// envelopes even in each transverse component.
  double cross_term = 0.0;
  /// Independent route: int |f|^2 p_mu / lambda (|C_1|^2 + |C_2|^2 - |C_3|^2 - |C_4|^2) d^3p.
  double via_coefficients = 0.0;
};

/// The rule carries the envelope |f|^2 (MomentumQuadrature::for_packet or
/// for_density); phi is normalized internally.
DriftVelocity drift_velocity_general(const Bispinor& phi, const MomentumQuadrature& rule, Axis mu);

// ---------------------------------------------------------------------------
// Zitterbewegung extraction.

struct ZbFit {
  /// Constant part: Hann-weighted mean over [T/2, T].
  double drift = 0.0;
  /// Dominant angular frequency of the detrended series (0 when there is no
  /// oscillation).
  double frequency = 0.0;
  /// |x(t_0) - drift|.
  double initial_amplitude = 0.0;
  /// Largest envelope value.
  double amplitude = 0.0;
  /// Envelope through the local maxima of |x - drift|, starting at t_0.
  std::vector<double> envelope_times;
  std::vector<double> envelope;

  /// Last time the envelope is at or above fraction * initial_amplitude
  /// (linear interpolation to the downward crossing).
  double decay_time(double fraction) const;
};

struct ZbFitOptions {
  /// Shortest accepted series span.
  double min_span = 20.0;
  /// Largest accepted sample spacing (8 points per period pi).
  double max_spacing = 3.14159265358979323846 / 8.0;
};

/// Requires uniformly spaced samples. Throws InvalidInput when the series is
/// too short or undersampled.
ZbFit zb_fit(const std::vector<double>& times, const std::vector<double>& values, const ZbFitOptions& opt = {});
ZbFit zb_fit(const ObservableSeries& series, Axis component, const ZbFitOptions& opt = {});

// ---------------------------------------------------------------------------
// Symmetries.

enum class SymmetryKind { axial, z_parity, xy_parity };

/// max |rho(r) - rho(T r)| / max rho. Parities reflect lattice indices
/// (periodic wrap for the unpaired edge node of an even lattice). The axial
/// metric compares every node inside the inscribed cylinder with its images
/// under 15 rotations by multiples of 2 pi / 16 about the z axis, evaluated
/// by bilinear interpolation in the plane.
double symmetry_metric(const ScalarField& density, SymmetryKind kind);

/// Axial metric of the spectral solution in the lattice plane z_index at time
/// t, with band-limited (trigonometric) evaluation at rotated points so no
/// interpolation error enters. Base points lie on 8 rays out to the largest
/// radius inside the box; each is compared with its 15 rotations. Normalized
/// by the peak density of the whole field at t.
double axial_metric_spectral(const SpectralEvolver& engine, double t, std::size_t z_index);

enum class DiscreteSymmetry { P, P_xy, P_x, P_y, P_z, antiunitary_z };

/// P = beta R, P_xy = Sigma_z R_x R_y, P_x = Sigma_x beta R_x,
/// P_y = Sigma_y beta R_y, P_z = Sigma_z beta R_z and
/// Psi'(x, y, z) = alpha_x Psi*(x, y, -z). Every operator squares to the
/// identity (no extra phase).
BispinorField apply_discrete_symmetry(const BispinorField& field, DiscreteSymmetry op);

}  // namespace dirac
