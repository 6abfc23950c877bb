#include "dirac/packet.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dirac/error.hpp"

namespace dirac {

void GaussianPacket::validate() const {
  if (!(d > 0.0) || !(delta > 0.0) || !std::isfinite(d) || !std::isfinite(delta))
    throw InvalidInput("packet widths d and delta must be positive");
  if (!std::isfinite(k0)) throw InvalidInput("packet k0 must be finite");
}

PolarizedState::PolarizedState(const GaussianPacket& packet, const Bispinor& phi)
    : packet_(packet), phi_(normalized(phi)) {
  packet_.validate();
}

Bispinor polarization_example_i() {
  const double s = 1.0 / std::sqrt(2.0);
  return Bispinor{{s, 0.0, s, 0.0}};
}

Bispinor polarization_example_ii() {
  const double s = 1.0 / std::sqrt(2.0);
  return Bispinor{{s, 0.0, 0.0, s}};
}

Example classify(const Bispinor& phi, double tol) {
  const Bispinor a = normalized(phi);
  // Up to a global phase.
  auto same = [&](const Bispinor& ref) { return std::abs(std::abs(inner(ref, a)) - 1.0) <= tol; };
  if (same(polarization_example_i())) return Example::i;
  if (same(polarization_example_ii())) return Example::ii;
  return Example::none;
}

cplx envelope_position(const GaussianPacket& g, double x, double y, double z) {
  const double norm = 1.0 / (g.d * std::sqrt(g.delta) * std::pow(std::numbers::pi, 0.75));
  const double rho2 = x * x + y * y;
  const double mag = norm * std::exp(-rho2 / (2.0 * g.d * g.d) - z * z / (2.0 * g.delta * g.delta));
  double phase = g.k0 * z;
  if (g.m_axial != 0) phase += static_cast<double>(g.m_axial) * std::atan2(y, x);
  return std::polar(mag, phase);
}

cplx envelope_momentum(const GaussianPacket& g, const Momentum3& p) {
  if (g.m_axial != 0) throw InvalidInput("closed-form momentum envelope requires m_axial = 0");
  const double norm = g.d * std::sqrt(g.delta) / std::pow(std::numbers::pi, 0.75);
  const double pp2 = p.x * p.x + p.y * p.y;
  const double dz = p.z - g.k0;
  return norm * std::exp(-0.5 * pp2 * g.d * g.d - 0.5 * dz * dz * g.delta * g.delta);
}

double envelope_momentum_density(const GaussianPacket& g, const Momentum3& p) {
  const double pp2 = p.x * p.x + p.y * p.y;
  const double dz = p.z - g.k0;
  return g.d * g.d * g.delta / std::pow(std::numbers::pi, 1.5) *
         std::exp(-pp2 * g.d * g.d - dz * dz * g.delta * g.delta);
}

SampledState initial_bispinor_field(const PolarizedState& state, const PositionGrid& grid) {
  grid.validate();
  SampledState out;
  out.field = BispinorField(grid, 0.0);
  const Bispinor& phi = state.phi();
  const GaussianPacket& g = state.packet();
  for_each_slab(grid.nx, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t j = 0; j < grid.ny; ++j)
        for (std::size_t k = 0; k < grid.nz; ++k) {
          const cplx F = envelope_position(g, grid.x(i), grid.y(j), grid.z(k));
          out.field.at(i, j, k) = F * phi;
        }
  });
  out.discrete_norm = out.field.norm();
  if (std::abs(out.discrete_norm - 1.0) > 0.01) {
    out.under_resolved = true;
    std::ostringstream msg;
    msg << "grid does not resolve the packet: discrete norm " << out.discrete_norm
        << " deviates from 1 by more than 1%";
    out.warning = msg.str();
  }
  return out;
}

void require_resolved(const SampledState& s) {
  if (s.under_resolved) throw ConfigError(s.warning);
}

double boundary_mass_fraction(const BispinorField& f, std::size_t layer) {
  const PositionGrid& g = f.grid;
  auto near = [layer](std::size_t i, std::size_t n) { return i < layer || i + layer >= n; };
  double edge = 0.0, total = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t k = 0; k < g.nz; ++k) {
        const double v = f.at(i, j, k).norm2();
        total += v;
        if (near(i, g.nx) || near(j, g.ny) || near(k, g.nz)) edge += v;
      }
  return total > 0.0 ? edge / total : 0.0;
}

}  // namespace dirac
