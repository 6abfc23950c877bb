#pragma once

#include <string>

#include "dirac/grid.hpp"
#include "dirac/spinor.hpp"

namespace dirac {

/// Gaussian envelope
///   F(r) = exp(-rho^2/2d^2 - z^2/2Delta^2 + i k0 z) / (d sqrt(Delta) pi^{3/4})
/// optionally multiplied by exp(i m alpha).
struct GaussianPacket {
  double d = 1.0;      // transverse width
  double delta = 1.0;  // longitudinal width
  double k0 = 0.0;     // mean longitudinal wavenumber
  int m_axial = 0;

  void validate() const;
};

/// Envelope plus a polarization normalized on construction.
class PolarizedState {
 public:
  PolarizedState(const GaussianPacket& packet, const Bispinor& phi);

  const GaussianPacket& packet() const { return packet_; }
  const Bispinor& phi() const { return phi_; }

 private:
  GaussianPacket packet_;
  Bispinor phi_;
};

// The two polarizations studied in detail.
Bispinor polarization_example_i();   // (1, 0, 1, 0) / sqrt 2
Bispinor polarization_example_ii();  // (1, 0, 0, 1) / sqrt 2

/// Which closed-form family a polarization belongs to, if any.
enum class Example { none, i, ii };
Example classify(const Bispinor& phi, double tol = 1e-12);

cplx envelope_position(const GaussianPacket& packet, double x, double y, double z);
cplx envelope_momentum(const GaussianPacket& packet, const Momentum3& p);
/// |f(p)|^2 without forming the complex value.
double envelope_momentum_density(const GaussianPacket& packet, const Momentum3& p);

struct SampledState {
  BispinorField field;
  double discrete_norm = 0.0;
  /// Set when |discrete_norm - 1| exceeds the 1% resolution threshold.
  bool under_resolved = false;
  std::string warning;
};

/// Samples F(r) phi on every node. Under-resolution is reported rather than
/// thrown; callers that need the gate use require_resolved().
SampledState initial_bispinor_field(const PolarizedState& state, const PositionGrid& grid);

/// Throws ConfigError when the sampled state missed the norm gate.
void require_resolved(const SampledState& s);

/// Fraction of the norm carried by nodes within `layer` cells of the
/// lattice boundary.
double boundary_mass_fraction(const BispinorField& field, std::size_t layer = 2);

}  // namespace dirac
