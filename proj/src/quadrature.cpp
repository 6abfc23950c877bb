#include "dirac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "dirac/error.hpp"
#include "dirac/packet.hpp"

namespace dirac {

const GaussLegendre& gauss_legendre(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussLegendre rule;
  rule.x.resize(n);
  rule.w.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * static_cast<double>(j) - 1.0) * z * p2 - (static_cast<double>(j) - 1.0) * p3) /
             static_cast<double>(j);
      }
      pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p1 = 1.0, p2 = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * static_cast<double>(j) - 1.0) * z * p2 - (static_cast<double>(j) - 1.0) * p3) /
           static_cast<double>(j);
    }
    pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.x[i] = -z;
    rule.x[n - 1 - i] = z;
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.x[n / 2] = 0.0;
  return cache.emplace(n, std::move(rule)).first->second;
}

PanelRule PanelRule::uniform(double a, double b, std::size_t panels, std::size_t order) {
  std::vector<double> breaks(panels + 1);
  for (std::size_t i = 0; i <= panels; ++i)
    breaks[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(panels);
  return from_breaks(breaks, order);
}

PanelRule PanelRule::from_breaks(const std::vector<double>& breaks, std::size_t order) {
  const GaussLegendre& gl = gauss_legendre(order);
  PanelRule r;
  if (breaks.size() < 2) return r;
  r.x.reserve((breaks.size() - 1) * order);
  r.w.reserve((breaks.size() - 1) * order);
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double c = 0.5 * (breaks[p] + breaks[p + 1]);
    const double h = 0.5 * (breaks[p + 1] - breaks[p]);
    for (std::size_t i = 0; i < order; ++i) {
      r.x.push_back(c + h * gl.x[i]);
      r.w.push_back(h * gl.w[i]);
    }
  }
  return r;
}

namespace {

double gl16(const std::function<double(double)>& f, double a, double b) {
  const GaussLegendre& gl = gauss_legendre(16);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < gl.x.size(); ++i) s += gl.w[i] * f(c + h * gl.x[i]);
  return s * h;
}

struct Adaptive {
  const std::function<double(double)>& f;
  double tol_density;  // allowed error per unit length
  int max_depth;
  bool failed = false;

  QuadResult run(double a, double b, double whole, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gl16(f, a, m);
    const double right = gl16(f, m, b);
    const double err = std::abs(left + right - whole);
    if (err <= tol_density * (b - a) || err < 1e-300) return {left + right, err};
    if (depth >= max_depth) {
      failed = true;
      return {left + right, err};
    }
    const QuadResult l = run(a, m, left, depth + 1);
    const QuadResult r = run(m, b, right, depth + 1);
    return {l.value + r.value, l.error + r.error};
  }
};

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, double rel_tol, int max_depth) {
  if (a == b) return {};
  // Coarse pass over 8 panels fixes the scale used by the relative tolerance.
  double scale = 0.0;
  for (int i = 0; i < 8; ++i) scale += std::abs(gl16(f, a + (b - a) * i / 8.0, a + (b - a) * (i + 1) / 8.0));
  const double tol = std::max(abs_tol, rel_tol * scale);
  Adaptive ad{f, tol / std::abs(b - a), max_depth};
  QuadResult total;
  for (int i = 0; i < 8; ++i) {
    const double lo = a + (b - a) * i / 8.0, hi = a + (b - a) * (i + 1) / 8.0;
    const QuadResult r = ad.run(lo, hi, gl16(f, lo, hi), 0);
    total.value += r.value;
    total.error += r.error;
  }
  if (ad.failed)
    throw NumericalError("adaptive quadrature did not converge (estimate " + std::to_string(total.value) +
                             ", error " + std::to_string(total.error) + ")",
                         total.value);
  return total;
}

double gaussian_cutoff(double width) { return std::sqrt(14.0 * std::log(10.0)) / width; }

namespace {

std::vector<MomentumQuadrature::Ring> packet_rings(const GaussianPacket& g, std::size_t perp_panels,
                                                   std::size_t z_panels) {
  const PanelRule perp = PanelRule::uniform(0.0, gaussian_cutoff(g.d), perp_panels);
  const double zc = gaussian_cutoff(g.delta);
  const PanelRule along = PanelRule::uniform(g.k0 - zc, g.k0 + zc, z_panels);
  std::vector<MomentumQuadrature::Ring> rings;
  rings.reserve(perp.x.size() * along.x.size());
  for (std::size_t i = 0; i < perp.x.size(); ++i) {
    for (std::size_t j = 0; j < along.x.size(); ++j) {
      MomentumQuadrature::Ring r;
      r.p_perp = perp.x[i];
      r.p_z = along.x[j];
      r.lambda = std::sqrt(1.0 + r.p_perp * r.p_perp + r.p_z * r.p_z);
      r.weight = envelope_momentum_density(g, {r.p_perp, 0.0, r.p_z}) * r.p_perp * perp.w[i] * along.w[j];
      rings.push_back(r);
    }
  }
  return rings;
}

// Probe integral: oscillatory moments at t that the oracles rely on.
// Compensated (Neumaier) sums, so rounding does not grow with the node count
// and mask convergence.
std::array<double, 3> probe(const std::vector<MomentumQuadrature::Ring>& rings, double t) {
  std::array<CompensatedSum, 3> acc;
  for (const auto& r : rings) {
    const double ph = 2.0 * r.lambda * t;
    acc[0].add(r.weight);
    acc[1].add(r.weight * std::cos(ph));
    acc[2].add(r.weight * std::sin(ph) * r.p_z / r.lambda);
  }
  std::array<double, 3> s{};
  for (std::size_t k = 0; k < 3; ++k) s[k] = 2.0 * std::numbers::pi * acc[k].value();
  return s;
}

void set_angles(std::size_t n, std::vector<double>& c, std::vector<double>& s) {
  c.resize(n);
  s.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(n);
    c[a] = std::cos(th);
    s[a] = std::sin(th);
  }
}

}  // namespace

MomentumQuadrature MomentumQuadrature::for_packet(const GaussianPacket& packet, double t_max, double tol) {
  packet.validate();
  if (packet.m_axial != 0) throw InvalidInput("momentum quadrature needs m_axial = 0");
  t_max = std::abs(t_max);
  // Panels narrow enough for the Gaussian (a few per width) and for the
  // phase 2 lambda t (|d lambda / dp| <= 1): about 6 radians per panel.
  auto panels_for = [t_max](double range, double width) {
    const double h = std::min(0.5 * width, 6.0 / (2.0 * t_max + 1e-300));
    return std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(range / h)));
  };
  std::size_t np = panels_for(gaussian_cutoff(packet.d), 1.0 / packet.d);
  std::size_t nz = panels_for(2.0 * gaussian_cutoff(packet.delta), 1.0 / packet.delta);

  auto rings = packet_rings(packet, np, nz);
  auto ref = probe(rings, t_max);
  double diff = 0.0;
  for (int level = 0; level < 6; ++level) {
    auto finer = packet_rings(packet, 2 * np, 2 * nz);
    const auto val = probe(finer, t_max);
    diff = 0.0;
    for (std::size_t k = 0; k < 3; ++k) diff = std::max(diff, std::abs(val[k] - ref[k]));
    if (diff <= tol) {
      MomentumQuadrature q;
      q.rings_ = std::move(rings);
      q.n_theta_ = 8;
      set_angles(q.n_theta_, q.cos_, q.sin_);
      return q;
    }
    np *= 2;
    nz *= 2;
    rings = std::move(finer);
    ref = val;
  }
  throw NumericalError("momentum quadrature did not converge at t = " + std::to_string(t_max), diff);
}

MomentumQuadrature MomentumQuadrature::for_density(const std::function<double(const Momentum3&)>& density,
                                                   double p_perp_max, double pz_lo, double pz_hi,
                                                   std::size_t perp_panels, std::size_t z_panels,
                                                   std::size_t n_theta) {
  if (n_theta < 4) throw InvalidInput("need at least 4 azimuth nodes");
  const PanelRule perp = PanelRule::uniform(0.0, p_perp_max, perp_panels);
  const PanelRule along = PanelRule::uniform(pz_lo, pz_hi, z_panels);
  MomentumQuadrature q;
  q.n_theta_ = n_theta;
  set_angles(n_theta, q.cos_, q.sin_);
  for (std::size_t i = 0; i < perp.x.size(); ++i) {
    for (std::size_t j = 0; j < along.x.size(); ++j) {
      Ring r;
      r.p_perp = perp.x[i];
      r.p_z = along.x[j];
      r.lambda = std::sqrt(1.0 + r.p_perp * r.p_perp + r.p_z * r.p_z);
      r.weight = r.p_perp * perp.w[i] * along.w[j];
      q.rings_.push_back(r);
      for (std::size_t a = 0; a < n_theta; ++a)
        q.azimuthal_.push_back(density({r.p_perp * q.cos_[a], r.p_perp * q.sin_[a], r.p_z}));
    }
  }
  return q;
}

void MomentumQuadrature::for_each_node(const std::function<void(const Momentum3&, double, double)>& visit) const {
  const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(n_theta_);
  for (std::size_t r = 0; r < rings_.size(); ++r) {
    const Ring& ring = rings_[r];
    for (std::size_t a = 0; a < n_theta_; ++a) {
      const Momentum3 p{ring.p_perp * cos_[a], ring.p_perp * sin_[a], ring.p_z};
      visit(p, ring.lambda, ring.weight * azimuth_factor(r, a) * dtheta);
    }
  }
}

double MomentumQuadrature::integrate(const std::function<double(const Momentum3&, double)>& g) const {
  CompensatedSum s;
  for_each_node([&](const Momentum3& p, double lam, double w) { s.add(w * g(p, lam)); });
  return s.value();
}

}  // namespace dirac
