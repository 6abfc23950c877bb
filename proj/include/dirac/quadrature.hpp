#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "dirac/spinor.hpp"

namespace dirac {

struct GaussianPacket;

/// Neumaier-compensated running sum; the error does not grow with the number
/// of terms, which matters for rules with 10^5 - 10^7 nodes.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double u = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - u) + v : (v - u) + sum;
    sum = u;
  }
  double value() const { return sum + carry; }
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
};

/// Cached n-point rule (Newton iteration on P_n, accurate to rounding).
const GaussLegendre& gauss_legendre(std::size_t n);

/// Composite Gauss-Legendre rule over consecutive panels [b_i, b_{i+1}].
struct PanelRule {
  std::vector<double> x;
  std::vector<double> w;

  static PanelRule uniform(double a, double b, std::size_t panels, std::size_t order = 16);
  static PanelRule from_breaks(const std::vector<double>& breaks, std::size_t order = 16);

  template <class F>
  auto integrate(F&& f) const {
    decltype(f(0.0)) s{};
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(x[i]);
    return s;
  }
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive panel bisection: a panel is accepted when its 16-point value and
/// the sum over its two halves agree within max(abs_tol, rel_tol |I|)
/// (apportioned by width). Throws NumericalError with the achieved estimate
/// when max_depth is exhausted.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol = 1e-13, double rel_tol = 1e-12, int max_depth = 30);

/// Half-width of a Gaussian exp(-u^2 w^2) support: |f|^2 / peak < 1e-14 beyond it.
double gaussian_cutoff(double width);

/// Tensor-product rule over momentum space in cylindrical coordinates
/// (p_perp panels x azimuth trapezoid x p_z panels) carrying the weight
/// |f(p)|^2 d^3p. Shared by every oracle integral so one cutoff/panel policy
/// governs all of them.
///
/// The azimuthal trapezoid with n_theta points integrates trigonometric
/// polynomials of degree < n_theta exactly; oracle integrands are at most
/// quadratic in (p_x, p_y), so transverse components that vanish by symmetry
/// come out at rounding level rather than being assumed zero.
class MomentumQuadrature {
 public:
  struct Ring {
    double p_perp = 0.0;
    double p_z = 0.0;
    double lambda = 1.0;
    double weight = 0.0;  // |f|^2 p_perp dp_perp dp_z (azimuth weights separate)
  };

  /// Rule for a Gaussian packet, resolving oscillations cos(2 lambda t) up
  /// to t_max. The panel count is doubled until a probe integral at t_max
  /// changes by less than tol; NumericalError otherwise.
  static MomentumQuadrature for_packet(const GaussianPacket& packet, double t_max, double tol = 1e-12);

  /// Rule for an arbitrary density |f(p)|^2 supported in p_perp <= p_perp_max,
  /// p_z in [pz_lo, pz_hi]. The density may depend on the azimuth.
  static MomentumQuadrature for_density(const std::function<double(const Momentum3&)>& density,
                                        double p_perp_max, double pz_lo, double pz_hi,
                                        std::size_t perp_panels, std::size_t z_panels,
                                        std::size_t n_theta = 16);

  const std::vector<Ring>& rings() const { return rings_; }
  std::size_t n_theta() const { return n_theta_; }
  const std::vector<double>& cos_theta() const { return cos_; }
  const std::vector<double>& sin_theta() const { return sin_; }
  /// Azimuth-resolved density factor for ring r and angle index a (1 for
  /// axially symmetric envelopes).
  double azimuth_factor(std::size_t r, std::size_t a) const {
    return azimuthal_.empty() ? 1.0 : azimuthal_[r * n_theta_ + a];
  }
  std::size_t node_count() const { return rings_.size() * n_theta_; }

  /// Integral of |f|^2 g(p) d^3p.
  double integrate(const std::function<double(const Momentum3&, double lambda)>& g) const;

  /// Calls visit(p, lambda, weight) for every node, in a fixed order.
  void for_each_node(const std::function<void(const Momentum3&, double, double)>& visit) const;

 private:
  std::vector<Ring> rings_;
  std::vector<double> cos_, sin_;
  std::vector<double> azimuthal_;
  std::size_t n_theta_ = 16;
};

}  // namespace dirac
