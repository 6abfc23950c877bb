#pragma once

#include <array>
#include <vector>

#include "dirac/grid.hpp"
#include "dirac/packet.hpp"
#include "dirac/spinor.hpp"

namespace dirac {

// ---------------------------------------------------------------------------
// Per-mode evolution (envelope factor f(p) excluded; evolution is linear).

/// sum_r C_r U_r(p) exp(-i E_r t) with C_r from project_coefficients.
Bispinor evolve_mode_general(const Bispinor& phi, const Momentum3& p, double t);

/// exp(-i H(p) t) = cos(lambda t) - i sin(lambda t) H(p) / lambda.
DiracMatrix mode_propagator(const Momentum3& p, double t);

/// Closed form for polarization (1,0,1,0)/sqrt2. Psi_2 == Psi_4.
Bispinor evolve_mode_example_i(const Momentum3& p, double t);

/// Closed form for polarization (1,0,0,1)/sqrt2. Psi_2 == -Psi_3.
Bispinor evolve_mode_example_ii(const Momentum3& p, double t);

struct EnergySplit {
  double w_plus = 0.0;
  double w_minus = 0.0;
};

/// Positive/negative-energy weights of the polarization at momentum p, per
/// unit |f(p)|^2: sums of |C_r|^2 over r in {1,2} and {3,4}.
EnergySplit energy_split(const Bispinor& phi, const Momentum3& p);
EnergySplit energy_split(const PolarizedState& state, const Momentum3& p);
/// (1 +- p_z / lambda_p) / 2, the example-i closed form.
EnergySplit energy_split_example_i(const Momentum3& p);

struct WCurve {
  std::vector<double> pz;
  std::vector<double> w_plus;
  std::vector<double> w_minus;
};

/// W_pm(p_z) = 2 pi int_0^inf |Psi_pm(p)|^2 p_perp dp_perp at each sample.
WCurve w_curve(const PolarizedState& state, const std::vector<double>& pz_samples);

/// Evenly spaced p_z samples covering the envelope support.
std::vector<double> default_pz_samples(const GaussianPacket& packet, std::size_t count = 401);

/// Trapezoid integral of W_+ + W_- over a curve on an evenly spaced grid.
double w_curve_total(const WCurve& c);

// ---------------------------------------------------------------------------
// Cartesian spectral engine.

/// Momentum-space representation of a lattice field. The FFT uses the
/// continuous-transform normalization
///   Psi(k_m) = (2 pi)^{-3/2} h^3 sum_j exp(-i k_m x_j) Psi_j,
/// with k_m = 2 pi m / (n h), m in [-n/2, n/2). The forward/backward pair is
/// exact to rounding, so evolving by t = 0 reproduces the input field.
/// Modes are evolved exactly with exp(-i H(k) t). On an even lattice the
/// Nyquist mode stands for both +-pi/h; it is evolved with k = 0 along that
/// axis and interpolated as a cosine, so reflections of the lattice commute
/// with the evolution.
class SpectralEvolver {
 public:
  /// Throws NumericalError when the spectral mass on the Nyquist planes
  /// exceeds aliasing_tol of the total (the lattice does not resolve the
  /// state's momenta).
  explicit SpectralEvolver(const BispinorField& initial, double aliasing_tol = 1e-6);
  SpectralEvolver(const SpectralEvolver&) = delete;
  SpectralEvolver& operator=(const SpectralEvolver&) = delete;

  const PositionGrid& grid() const { return grid_; }
  double initial_time() const { return t0_; }
  double nyquist_fraction() const { return nyquist_fraction_; }

  /// Wavenumber of FFT index i along an axis.
  double wavenumber(Axis a, std::size_t i) const;
  double dk(Axis a) const;

  /// Momentum-space field Psi(k, t), lattice laid out in FFT index order.
  /// The returned field's grid stores n and dk; origin is unused.
  BispinorField momentum_field(double t) const;

  /// Position-space field at time t.
  BispinorField position_field(double t) const;

  /// Band-limited evaluation of Psi at arbitrary (x, y) in the plane z = z_k
  /// (z_k a lattice plane) at time t. Used where rotated sample points must
  /// not pick up interpolation error.
  class PlaneSampler {
   public:
    Bispinor operator()(double x, double y) const;

   private:
    friend class SpectralEvolver;
    std::size_t nx_ = 0, ny_ = 0;
    std::vector<double> kx_, ky_;
    std::vector<Bispinor> coeff_;  // nx * ny partial transform along z
    std::array<double, 2> origin_{};
    double scale_ = 1.0;
  };
  PlaneSampler plane_sampler(double t, std::size_t z_index) const;

  /// sum_k Psi^dagger(k) M Psi(k) dk^3 at time t without going back to
  /// position space.
  cplx momentum_bilinear(const DiracMatrix& M, double t) const;

  /// Raw momentum-space sums at time t: sum Psi^dag alpha_i Psi dk^3,
  /// sum Psi^dag Sigma_i Psi dk^3 and sum |Psi|^2 dk^3, in one pass.
  struct Moments {
    Vec3 alpha{};
    Vec3 sigma{};
    double norm = 0.0;
  };
  Moments moments(double t) const;
  double momentum_norm() const;

 private:
  void evolve_into(double t, std::vector<Bispinor>& out) const;

  PositionGrid grid_;
  double t0_ = 0.0;
  std::vector<Bispinor> psi_k_;  // at t0
  std::array<std::vector<double>, 3> k_;
  std::array<std::vector<double>, 3> k_evolve_;  // k_ with the Nyquist entry zeroed
  double nyquist_fraction_ = 0.0;
};

/// Samples the state on the lattice and evolves it spectrally to t. Checks
/// that the packet fits in the box (boundary mass < 1e-6).
BispinorField synthesize_cartesian(const PolarizedState& state, const PositionGrid& grid, double t);

// ---------------------------------------------------------------------------
// Cylindrical synthesis by Hankel (Bessel-kernel) quadrature.

/// Psi_i(rho, alpha, z) = sum_n exp(i n alpha) f_{i,n}(rho, z) with
/// azimuthal harmonics n in {-1, 0, +1}.
/// Example i:  Psi_1 = f_{1,0}, Psi_2 = e^{i alpha} f_{2,1}, Psi_3 = f_{3,0}, Psi_4 = Psi_2.
/// Example ii: Psi_1 = f_{1,0} + e^{-i alpha} f_{1,-1}, Psi_2 = -Psi_3 = f_{2,0},
///             Psi_4 = f_{4,0} + e^{i alpha} f_{4,1}.
struct CylindricalField {
  Example example = Example::none;
  double time = 0.0;
  std::vector<double> rho;
  std::vector<double> z;
  /// harmonics[i][n + 1][r * z.size() + k]
  std::array<std::array<std::vector<cplx>, 3>, 4> harmonics;
  /// Largest difference between the base rule and the refined rule.
  double error_estimate = 0.0;

  Bispinor at(std::size_t r, std::size_t k, double alpha) const;
  /// sum_i |f_i|^2, independent of alpha for example i.
  double density(std::size_t r, std::size_t k, double alpha = 0.0) const;
};

/// Evaluates the Bessel-kernel double integrals at every (rho, z) sample.
/// The p_perp integral is split at zeros of J_0 when rho is large. Throws
/// NumericalError when a rule twice as fine disagrees by more than tol.
CylindricalField synthesize_cylindrical(const PolarizedState& state, const std::vector<double>& rho,
                                        const std::vector<double>& z, double t, double tol = 1e-9);

}  // namespace dirac
