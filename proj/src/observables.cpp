#include "dirac/observables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dirac/error.hpp"

namespace dirac {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kSlabs = 16;

std::size_t axis_index(Axis a) { return static_cast<std::size_t>(a); }

// Pointwise bilinears.
inline Vec3 alpha_bilinear(const Bispinor& v) {
  const cplx a14 = std::conj(v[0]) * v[3], a23 = std::conj(v[1]) * v[2];
  const cplx a13 = std::conj(v[0]) * v[2], a24 = std::conj(v[1]) * v[3];
  return {2.0 * (a14.real() + a23.real()), 2.0 * (a14.imag() - a23.imag()), 2.0 * (a13.real() - a24.real())};
}

inline Vec3 sigma_bilinear(const Bispinor& v) {
  const cplx s = std::conj(v[0]) * v[1] + std::conj(v[2]) * v[3];
  return {2.0 * s.real(), 2.0 * s.imag(), std::norm(v[0]) - std::norm(v[1]) + std::norm(v[2]) - std::norm(v[3])};
}

using Integrand = Vec3 (*)(double p1, double p2, double p3, double lam, double c2, double s2);

Vec3 vel_i(double p1, double p2, double p3, double lam, double c2, double s2) {
  const double l2 = lam * lam;
  return {p1 * p3 / l2 * (1.0 - c2) + p2 / lam * s2, p2 * p3 / l2 * (1.0 - c2) - p1 / lam * s2,
          p3 * p3 / l2 + (1.0 - p3 * p3 / l2) * c2};
}

Vec3 vel_ii(double p1, double p2, double p3, double lam, double c2, double s2) {
  const double l2 = lam * lam;
  return {p1 * p1 / l2 + (1.0 - p1 * p1 / l2) * c2, p1 * p2 / l2 * (1.0 - c2) + s2 / lam,
          p1 * p3 / l2 * (1.0 - c2)};
}

Vec3 spin_i(double p1, double p2, double p3, double lam, double c2, double s2) {
  const double l2 = lam * lam, pp2 = p1 * p1 + p2 * p2;
  return {(p2 * lam * s2 + p3 * p1 * (1.0 - c2)) / l2, (-p1 * lam * s2 + p3 * p2 * (1.0 - c2)) / l2,
          ((l2 - pp2) + pp2 * c2) / l2};
}

Vec3 spin_ii(double p1, double p2, double p3, double lam, double c2, double s2) {
  const double l2 = lam * lam;
  return {-p3 * (1.0 - c2) / l2, p3 * s2 / lam, (-p2 * s2 + p1 / lam * (1.0 - c2)) / lam};
}

Integrand pick(Example ex, bool velocity) {
  if (ex == Example::i) return velocity ? vel_i : spin_i;
  if (ex == Example::ii) return velocity ? vel_ii : spin_ii;
  throw InvalidInput("oracles exist for the (1,0,1,0) and (1,0,0,1) polarizations only");
}

ObservableSeries oracle_series(const GaussianPacket& packet, const std::vector<double>& times, Integrand g,
                               const std::string& label) {
  double t_max = 0.0;
  for (double t : times) t_max = std::max(t_max, std::abs(t));
  const MomentumQuadrature rule = MomentumQuadrature::for_packet(packet, t_max);
  const auto& rings = rule.rings();
  const auto& cs = rule.cos_theta();
  const auto& sn = rule.sin_theta();
  const std::size_t nth = rule.n_theta();
  const double dtheta = 2.0 * kPi / static_cast<double>(nth);

  // Every integrand is affine in (cos 2 lambda t, sin 2 lambda t), so each
  // ring reduces to three time-independent vectors a + b cos + c sin.
  struct RingTerms {
    double two_lambda;
    Vec3 a, b, c;
  };
  std::vector<RingTerms> terms(rings.size());
  for (std::size_t r = 0; r < rings.size(); ++r) {
    const auto& ring = rings[r];
    RingTerms rt{2.0 * ring.lambda, {}, {}, {}};
    for (std::size_t k = 0; k < nth; ++k) {
      const double px = ring.p_perp * cs[k], py = ring.p_perp * sn[k];
      const double w = ring.weight * dtheta * rule.azimuth_factor(r, k);
      const Vec3 v0 = g(px, py, ring.p_z, ring.lambda, 0.0, 0.0);
      const Vec3 vc = g(px, py, ring.p_z, ring.lambda, 1.0, 0.0);
      const Vec3 vs = g(px, py, ring.p_z, ring.lambda, 0.0, 1.0);
      for (std::size_t c = 0; c < 3; ++c) {
        rt.a[c] += w * v0[c];
        rt.b[c] += w * (vc[c] - v0[c]);
        rt.c[c] += w * (vs[c] - v0[c]);
      }
    }
    terms[r] = rt;
  }

  // On a uniform time grid the phase advances by a fixed rotation; it is
  // re-seeded from cos/sin every 32 samples so rounding cannot build up.
  const std::size_t nt = times.size();
  bool uniform = nt > 2;
  const double step = nt > 1 ? (times.back() - times.front()) / static_cast<double>(nt - 1) : 0.0;
  for (std::size_t n = 0; uniform && n < nt; ++n)
    uniform = std::abs(times[n] - (times.front() + static_cast<double>(n) * step)) <=
              1e-12 * std::max(1.0, std::abs(times[n]));

  // Rings are summed naively in blocks of 64 and the block totals with
  // compensation, which keeps the error at the level of one block.
  constexpr std::size_t kBlock = 64;
  std::vector<std::vector<std::array<CompensatedSum, 3>>> partial(kSlabs);
  for_each_slab(rings.size(), [&](std::size_t b, std::size_t e, std::size_t slab) {
    auto& acc = partial[slab];
    acc.assign(nt, {});
    std::vector<std::array<double, 3>> block(nt);
    for (std::size_t r0 = b; r0 < e; r0 += kBlock) {
      std::fill(block.begin(), block.end(), std::array<double, 3>{});
      for (std::size_t r = r0; r < std::min(e, r0 + kBlock); ++r) {
        const RingTerms& rt = terms[r];
        const cplx rot = std::polar(1.0, rt.two_lambda * step);
        cplx z;
        for (std::size_t n = 0; n < nt; ++n) {
          if (!uniform || n % 32 == 0)
            z = std::polar(1.0, rt.two_lambda * times[n]);
          else
            z *= rot;
          for (std::size_t c = 0; c < 3; ++c) block[n][c] += rt.b[c] * z.real() + rt.c[c] * z.imag();
        }
      }
      for (std::size_t n = 0; n < nt; ++n)
        for (std::size_t c = 0; c < 3; ++c) acc[n][c].add(block[n][c]);
    }
  }, kSlabs);

  std::array<CompensatedSum, 3> constant;
  for (const RingTerms& rt : terms)
    for (std::size_t c = 0; c < 3; ++c) constant[c].add(rt.a[c]);

  ObservableSeries out;
  out.label = label;
  out.provenance = Provenance::quadrature_oracle;
  out.times = times;
  out.values.assign(nt, Vec3{});
  for (std::size_t n = 0; n < nt; ++n)
    for (std::size_t c = 0; c < 3; ++c) {
      CompensatedSum total = constant[c];
      for (const auto& slab : partial)
        if (!slab.empty()) {
          total.add(slab[n][c].sum);
          total.add(slab[n][c].carry);
        }
      out.values[n][c] = total.value();
    }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> ObservableSeries::component(Axis a) const {
  std::vector<double> v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v[i] = values[i][axis_index(a)];
  return v;
}

void ObservableSeries::validate(bool is_velocity) const {
  if (times.size() != values.size()) throw InvalidInput("series '" + label + "': times and values differ in length");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw InvalidInput("series '" + label + "': non-finite time");
    if (i > 0 && !(times[i] > times[i - 1])) throw InvalidInput("series '" + label + "': times not increasing");
    for (double v : values[i]) {
      if (!std::isfinite(v)) throw InvalidInput("series '" + label + "': non-finite value");
      if (is_velocity && std::abs(v) > 1.0 + 1e-12)
        throw InvalidInput("series '" + label + "': velocity component exceeds c");
    }
  }
}

// ---------------------------------------------------------------------------

ScalarField probability_density(const BispinorField& field) {
  ScalarField out(field.grid, field.time);
  for (std::size_t n = 0; n < field.data.size(); ++n) out.data[n] = field.data[n].norm2();
  return out;
}

SpinDensityField spin_density(const BispinorField& field) {
  SpinDensityField out;
  out.time = field.time;
  out.sx = ScalarField(field.grid, field.time);
  out.sy = ScalarField(field.grid, field.time);
  out.sz = ScalarField(field.grid, field.time);
  for (std::size_t n = 0; n < field.data.size(); ++n) {
    const Vec3 s = sigma_bilinear(field.data[n]);
    out.sx.data[n] = s[0];
    out.sy.data[n] = s[1];
    out.sz.data[n] = s[2];
  }
  return out;
}

GridMoments grid_moments(const BispinorField& field) {
  const PositionGrid& g = field.grid;
  const std::size_t plane = g.ny * g.nz;
  std::vector<GridMoments> parts(kSlabs);
  for_each_slab(
      g.nx,
      [&](std::size_t b, std::size_t e, std::size_t slab) {
        GridMoments m;
        for (std::size_t n = b * plane; n < e * plane; ++n) {
          const Bispinor& v = field.data[n];
          const Vec3 a = alpha_bilinear(v), s = sigma_bilinear(v);
          for (std::size_t c = 0; c < 3; ++c) {
            m.velocity[c] += a[c];
            m.spin[c] += s[c];
          }
          m.norm += v.norm2();
        }
        parts[slab] = m;
      },
      kSlabs);
  GridMoments total;
  for (const GridMoments& p : parts) {
    for (std::size_t c = 0; c < 3; ++c) {
      total.velocity[c] += p.velocity[c];
      total.spin[c] += p.spin[c];
    }
    total.norm += p.norm;
  }
  if (total.norm > 0.0)
    for (std::size_t c = 0; c < 3; ++c) {
      total.velocity[c] /= total.norm;
      total.spin[c] /= total.norm;
    }
  total.norm *= g.cell_volume();
  return total;
}

Vec3 velocity_expectation_grid(const BispinorField& field_momentum) { return grid_moments(field_momentum).velocity; }

GridMoments spectral_moments(const SpectralEvolver& engine, double t) {
  const SpectralEvolver::Moments m = engine.moments(t);
  GridMoments out;
  out.norm = m.norm;
  for (std::size_t c = 0; c < 3; ++c) {
    out.velocity[c] = m.alpha[c] / m.norm;
    out.spin[c] = m.sigma[c] / m.norm;
  }
  return out;
}

namespace {

std::pair<ObservableSeries, ObservableSeries> spectral_series(const SpectralEvolver& engine,
                                                              const std::vector<double>& times) {
  ObservableSeries v, s;
  v.label = "velocity";
  s.label = "spin";
  v.provenance = s.provenance = Provenance::grid_moment;
  v.times = s.times = times;
  for (double t : times) {
    const GridMoments m = spectral_moments(engine, t);
    v.values.push_back(m.velocity);
    s.values.push_back(m.spin);
  }
  return {v, s};
}

}  // namespace

ObservableSeries spectral_velocity_series(const SpectralEvolver& engine, const std::vector<double>& times) {
  return spectral_series(engine, times).first;
}

ObservableSeries spectral_spin_series(const SpectralEvolver& engine, const std::vector<double>& times) {
  return spectral_series(engine, times).second;
}

Vec3 mean_position(const BispinorField& field) {
  const PositionGrid& g = field.grid;
  double sx = 0.0, sy = 0.0, sz = 0.0, w = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t k = 0; k < g.nz; ++k) {
        const double r = field.at(i, j, k).norm2();
        sx += r * g.x(i);
        sy += r * g.y(j);
        sz += r * g.z(k);
        w += r;
      }
  return {sx / w, sy / w, sz / w};
}

// ---------------------------------------------------------------------------

Vec3 velocity_oracle_example_i(const GaussianPacket& packet, double t) {
  return oracle_series(packet, {t}, vel_i, "velocity").values[0];
}

Vec3 velocity_oracle_example_ii(const GaussianPacket& packet, double t) {
  return oracle_series(packet, {t}, vel_ii, "velocity").values[0];
}

Vec3 spin_oracle(const GaussianPacket& packet, Example polarization, double t) {
  return oracle_series(packet, {t}, pick(polarization, false), "spin").values[0];
}

ObservableSeries velocity_oracle_series(const GaussianPacket& packet, Example polarization,
                                        const std::vector<double>& times) {
  return oracle_series(packet, times, pick(polarization, true), "velocity");
}

ObservableSeries spin_oracle_series(const GaussianPacket& packet, Example polarization,
                                    const std::vector<double>& times) {
  return oracle_series(packet, times, pick(polarization, false), "spin");
}

double drift_constant_example_i(const GaussianPacket& packet) {
  const MomentumQuadrature rule = MomentumQuadrature::for_packet(packet, 0.0);
  return rule.integrate([](const Momentum3& p, double lam) { return p.z * p.z / (lam * lam); });
}

double drift_constant_example_ii(const GaussianPacket& packet) {
  const MomentumQuadrature rule = MomentumQuadrature::for_packet(packet, 0.0);
  return rule.integrate([](const Momentum3& p, double lam) { return p.x * p.x / (lam * lam); });
}

// ---------------------------------------------------------------------------

DriftVelocity drift_velocity_general(const Bispinor& phi_in, const MomentumQuadrature& rule, Axis mu) {
  const Bispinor phi = normalized(phi_in);
  const Vec3 a0 = alpha_bilinear(phi);
  const double beta0 = std::norm(phi[0]) + std::norm(phi[1]) - std::norm(phi[2]) - std::norm(phi[3]);
  const std::size_t m = axis_index(mu);
  CompensatedSum initial, mass, cross_sum, total, coeff;
  rule.for_each_node([&](const Momentum3& p, double lam, double w) {
    const double pv[3] = {p.x, p.y, p.z};
    const double l2 = lam * lam;
    const double pm = pv[m] / l2;
    double cross = 0.0;
    for (std::size_t n = 0; n < 3; ++n)
      if (n != m) cross += pv[n] * a0[n];
    initial.add(w * pm * pv[m] * a0[m]);
    mass.add(w * pm * beta0);
    cross_sum.add(w * pm * cross);
    total.add(w * pm * (beta0 + pv[0] * a0[0] + pv[1] * a0[1] + pv[2] * a0[2]));
    const EnergySplit e = energy_split(phi, p);
    coeff.add(w * pv[m] / lam * (e.w_plus - e.w_minus));
  });
  DriftVelocity out;
  out.initial_velocity_term = initial.value();
  out.mass_term = mass.value();
  out.cross_term = cross_sum.value();
  out.total = total.value();
  out.via_coefficients = coeff.value();
  return out;
}

// ---------------------------------------------------------------------------

double ZbFit::decay_time(double fraction) const {
  const double level = fraction * initial_amplitude;
  if (envelope.empty()) return 0.0;
  std::size_t last = envelope.size();
  for (std::size_t i = envelope.size(); i-- > 0;)
    if (envelope[i] >= level) {
      last = i;
      break;
    }
  if (last == envelope.size()) return envelope_times.front();
  if (last + 1 == envelope.size()) return envelope_times.back();
  const double a = envelope[last], b = envelope[last + 1];
  const double s = (a - level) / (a - b);
  return envelope_times[last] + s * (envelope_times[last + 1] - envelope_times[last]);
}

ZbFit zb_fit(const std::vector<double>& t, const std::vector<double>& x, const ZbFitOptions& opt) {
  if (t.size() != x.size()) throw InvalidInput("zb_fit: times and values differ in length");
  if (t.size() < 16) throw InvalidInput("zb_fit: series too short (need at least 16 samples)");
  const double h = t[1] - t[0];
  for (std::size_t i = 1; i < t.size(); ++i)
    if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw InvalidInput("zb_fit: samples must be uniformly spaced");
  if (!(h > 0.0)) throw InvalidInput("zb_fit: times must increase");
  const double span = t.back() - t.front();
  if (span < opt.min_span) {
    std::ostringstream msg;
    msg << "zb_fit: series spans " << span << ", need at least " << opt.min_span;
    throw InvalidInput(msg.str());
  }
  if (h > opt.max_spacing * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "zb_fit: sample spacing " << h << " undersamples the oscillation (max " << opt.max_spacing << ")";
    throw InvalidInput(msg.str());
  }
  const std::size_t n = t.size();

  ZbFit fit;
  // Hann-weighted mean over the second half.
  {
    const double mid = t.front() + 0.5 * span;
    std::size_t first = 0;
    while (first < n && t[first] < mid) ++first;
    const std::size_t m = n - first;
    double sw = 0.0, sx = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double w = m > 1 ? std::sin(kPi * static_cast<double>(i) / static_cast<double>(m - 1)) : 1.0;
      sw += w * w;
      sx += w * w * x[first + i];
    }
    fit.drift = sw > 0.0 ? sx / sw : x.back();
  }

  std::vector<double> y(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = x[i] - fit.drift;
    scale = std::max(scale, std::abs(x[i]));
  }

  // Envelope through the local maxima of |y|.
  fit.initial_amplitude = std::abs(y[0]);
  fit.envelope_times.push_back(t[0]);
  fit.envelope.push_back(fit.initial_amplitude);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double a = std::abs(y[i]);
    if (a >= std::abs(y[i - 1]) && a > std::abs(y[i + 1])) {
      fit.envelope_times.push_back(t[i]);
      fit.envelope.push_back(a);
    }
  }
  fit.amplitude = *std::max_element(fit.envelope.begin(), fit.envelope.end());
  double ymax = 0.0;
  for (double v : y) ymax = std::max(ymax, std::abs(v));
  if (ymax <= 1e-14 * std::max(scale, 1e-300) || ymax == 0.0) {
    fit.amplitude = 0.0;
    fit.frequency = 0.0;
    return fit;
  }

  // Hann-windowed spectrum, zero-padded 8x, parabolic peak interpolation.
  const std::size_t pad = 8 * n;
  const double dw = 2.0 * kPi / (static_cast<double>(pad) * h);
  std::vector<double> yw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1));
    yw[i] = w * y[i];
  }
  const std::size_t kmin = 16;  // two unpadded bins: window leakage of any residual offset
  const std::size_t kmax = pad / 2;
  std::vector<double> mag(kmax + 1, 0.0);
  for (std::size_t k = kmin - 1; k <= kmax; ++k) {
    const double w = dw * static_cast<double>(k);
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ph = w * h * static_cast<double>(i);
      re += yw[i] * std::cos(ph);
      im -= yw[i] * std::sin(ph);
    }
    mag[k] = std::hypot(re, im);
  }
  std::size_t best = kmin;
  for (std::size_t k = kmin; k < kmax; ++k)
    if (mag[k] > mag[best]) best = k;
  double delta = 0.0;
  if (best > kmin - 1 && best + 1 <= kmax) {
    const double a = mag[best - 1], b = mag[best], c = mag[best + 1];
    const double den = a - 2.0 * b + c;
    if (den != 0.0) delta = 0.5 * (a - c) / den;
  }
  fit.frequency = (static_cast<double>(best) + delta) * dw;
  return fit;
}

ZbFit zb_fit(const ObservableSeries& series, Axis component, const ZbFitOptions& opt) {
  return zb_fit(series.times, series.component(component), opt);
}

// ---------------------------------------------------------------------------

namespace {

double bilinear(const ScalarField& f, std::size_t k, double x, double y) {
  const PositionGrid& g = f.grid;
  const double u = (x - g.origin[0]) / g.dx, v = (y - g.origin[1]) / g.dy;
  if (u < 0.0 || v < 0.0) return 0.0;
  auto i = static_cast<std::size_t>(u), j = static_cast<std::size_t>(v);
  if (i + 1 >= g.nx || j + 1 >= g.ny) return 0.0;
  const double a = u - static_cast<double>(i), b = v - static_cast<double>(j);
  return (1 - a) * (1 - b) * f.at(i, j, k) + a * (1 - b) * f.at(i + 1, j, k) + (1 - a) * b * f.at(i, j + 1, k) +
         a * b * f.at(i + 1, j + 1, k);
}

}  // namespace

double symmetry_metric(const ScalarField& f, SymmetryKind kind) {
  const PositionGrid& g = f.grid;
  const double peak = f.max();
  if (!(peak > 0.0)) return 0.0;
  std::vector<double> worst(kSlabs, 0.0);
  if (kind == SymmetryKind::z_parity || kind == SymmetryKind::xy_parity) {
    for_each_slab(
        g.nx,
        [&](std::size_t b, std::size_t e, std::size_t slab) {
          double w = 0.0;
          for (std::size_t i = b; i < e; ++i)
            for (std::size_t j = 0; j < g.ny; ++j)
              for (std::size_t k = 0; k < g.nz; ++k) {
                const double other = kind == SymmetryKind::z_parity
                                         ? f.at(i, j, g.mirror(Axis::z, k))
                                         : f.at(g.mirror(Axis::x, i), g.mirror(Axis::y, j), k);
                w = std::max(w, std::abs(f.at(i, j, k) - other));
              }
          worst[slab] = w;
        },
        kSlabs);
  } else {
    // Rotations about the z axis through (0, 0).
    const double rmax = std::min({-g.origin[0], g.origin[0] + (g.nx - 1) * g.dx, -g.origin[1],
                                  g.origin[1] + (g.ny - 1) * g.dy}) -
                        std::max(g.dx, g.dy);
    double cs[16], sn[16];
    for (int a = 0; a < 16; ++a) {
      cs[a] = std::cos(2.0 * kPi * a / 16.0);
      sn[a] = std::sin(2.0 * kPi * a / 16.0);
    }
    for_each_slab(
        g.nx,
        [&](std::size_t b, std::size_t e, std::size_t slab) {
          double w = 0.0;
          for (std::size_t i = b; i < e; ++i)
            for (std::size_t j = 0; j < g.ny; ++j) {
              const double x = g.x(i), y = g.y(j);
              if (x * x + y * y > rmax * rmax) continue;
              for (std::size_t k = 0; k < g.nz; ++k) {
                const double base = f.at(i, j, k);
                for (int a = 1; a < 16; ++a)
                  w = std::max(w, std::abs(base - bilinear(f, k, cs[a] * x - sn[a] * y, sn[a] * x + cs[a] * y)));
              }
            }
          worst[slab] = w;
        },
        kSlabs);
  }
  return *std::max_element(worst.begin(), worst.end()) / peak;
}

double axial_metric_spectral(const SpectralEvolver& engine, double t, std::size_t z_index) {
  const PositionGrid& g = engine.grid();
  const BispinorField field = engine.position_field(t);
  double peak = 0.0;
  for (const Bispinor& v : field.data) peak = std::max(peak, v.norm2());
  if (!(peak > 0.0)) return 0.0;

  const SpectralEvolver::PlaneSampler sampler = engine.plane_sampler(t, z_index);
  const double rmax = std::min({-g.origin[0], g.origin[0] + (g.nx - 1) * g.dx, -g.origin[1],
                                g.origin[1] + (g.ny - 1) * g.dy});
  const double h = std::max(g.dx, g.dy);
  const auto n_r = static_cast<std::size_t>(std::floor(rmax / h));
  struct Point {
    double x, y;
  };
  std::vector<Point> base;
  base.push_back({0.0, 0.0});
  for (std::size_t r = 1; r <= n_r; ++r)
    for (int ray = 0; ray < 8; ++ray) {
      // Rays offset from the lattice axes so points do not all sit on nodes.
      const double th = 2.0 * kPi * (ray + 0.37) / 8.0;
      base.push_back({r * h * std::cos(th), r * h * std::sin(th)});
    }
  std::vector<double> worst(kSlabs, 0.0);
  for_each_slab(base.size(), [&](std::size_t b, std::size_t e, std::size_t slab) {
    double w = 0.0;
    for (std::size_t q = b; q < e; ++q) {
      const double r0 = sampler(base[q].x, base[q].y).norm2();
      for (int a = 1; a < 16; ++a) {
        const double c = std::cos(2.0 * kPi * a / 16.0), s = std::sin(2.0 * kPi * a / 16.0);
        const double x = c * base[q].x - s * base[q].y, y = s * base[q].x + c * base[q].y;
        w = std::max(w, std::abs(r0 - sampler(x, y).norm2()));
      }
    }
    worst[slab] = w;
  });
  return *std::max_element(worst.begin(), worst.end()) / peak;
}

BispinorField apply_discrete_symmetry(const BispinorField& field, DiscreteSymmetry op) {
  const PositionGrid& g = field.grid;
  BispinorField out(g, field.time);
  bool rx = false, ry = false, rz = false;
  DiracMatrix M = DiracMatrix::identity();
  switch (op) {
    case DiscreteSymmetry::P:
      rx = ry = rz = true;
      M = beta();
      break;
    case DiscreteSymmetry::P_xy:
      rx = ry = true;
      M = sigma_z();
      break;
    case DiscreteSymmetry::P_x:
      rx = true;
      M = sigma_x() * beta();
      break;
    case DiscreteSymmetry::P_y:
      ry = true;
      M = sigma_y() * beta();
      break;
    case DiscreteSymmetry::P_z:
      rz = true;
      M = sigma_z() * beta();
      break;
    case DiscreteSymmetry::antiunitary_z:
      rz = true;
      M = alpha_x();
      break;
  }
  const bool conj = op == DiscreteSymmetry::antiunitary_z;
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t k = 0; k < g.nz; ++k) {
        Bispinor s = field.at(rx ? g.mirror(Axis::x, i) : i, ry ? g.mirror(Axis::y, j) : j,
                              rz ? g.mirror(Axis::z, k) : k);
        if (conj)
          for (std::size_t c = 0; c < 4; ++c) s[c] = std::conj(s[c]);
        out.at(i, j, k) = apply_matrix(M, s);
      }
  return out;
}

}  // namespace dirac
