#include "dirac/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dirac/bessel.hpp"
#include "dirac/error.hpp"
#include "dirac/quadrature.hpp"

namespace dirac {

namespace {

constexpr double kPi = std::numbers::pi;

/// H(p) psi without forming the matrix.
inline Bispinor apply_hamiltonian(double px, double py, double pz, const Bispinor& s) {
  const cplx pp{px, py}, pm{px, -py};
  Bispinor o;
  o[0] = s[0] + pz * s[2] + pm * s[3];
  o[1] = s[1] + pp * s[2] - pz * s[3];
  o[2] = pz * s[0] + pm * s[1] - s[2];
  o[3] = pp * s[0] - pz * s[1] - s[3];
  return o;
}

inline Bispinor propagate(double px, double py, double pz, double t, const Bispinor& s) {
  const double lam = std::sqrt(1.0 + px * px + py * py + pz * pz);
  const double c = std::cos(lam * t);
  const double sn = std::sin(lam * t) / lam;
  const Bispinor h = apply_hamiltonian(px, py, pz, s);
  Bispinor o;
  for (std::size_t i = 0; i < 4; ++i) o[i] = c * s[i] + cplx{0.0, -sn} * h[i];
  return o;
}

void fft3(std::vector<Bispinor>& data, const PositionGrid& g, int sign) {
  const int n[3] = {static_cast<int>(g.nx), static_cast<int>(g.ny), static_cast<int>(g.nz)};
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan = fftw_plan_many_dft(3, n, 4, ptr, nullptr, 4, 1, ptr, nullptr, 4, 1, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw NumericalError("FFTW could not build a plan for the lattice");
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

std::vector<double> wavenumbers(std::size_t n, double h) {
  std::vector<double> k(n);
  const double dk = 2.0 * kPi / (static_cast<double>(n) * h);
  for (std::size_t i = 0; i < n; ++i) {
    const auto m = static_cast<long long>(i) - (i < (n + 1) / 2 ? 0 : static_cast<long long>(n));
    k[i] = dk * static_cast<double>(m);
  }
  return k;
}

}  // namespace

// ---------------------------------------------------------------------------

DiracMatrix mode_propagator(const Momentum3& p, double t) {
  const double lam = energy(p);
  const double c = std::cos(lam * t);
  const double s = std::sin(lam * t) / lam;
  DiracMatrix H = hamiltonian(p);
  DiracMatrix U;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) U.m[i][j] = (i == j ? c : 0.0) + cplx{0.0, -s} * H.m[i][j];
  return U;
}

Bispinor evolve_mode_general(const Bispinor& phi, const Momentum3& p, double t) {
  const auto C = project_coefficients(phi, p);
  const double lam = energy(p);
  Bispinor out;
  for (int r = 1; r <= 4; ++r) {
    const FreeSpinor u = free_spinor(r, p);
    const double E = u.energy_sign() * lam;
    out += (C[static_cast<std::size_t>(r - 1)] * std::polar(1.0, -E * t)) * u.u;
  }
  return out;
}

Bispinor evolve_mode_example_i(const Momentum3& p, double t) {
  const double lam = energy(p);
  const cplx em = std::polar(1.0, -lam * t), ep = std::polar(1.0, lam * t);
  const double k = 1.0 / (2.0 * std::sqrt(2.0));
  const double a = (1.0 + p.z) / lam;
  const double b = (1.0 - p.z) / lam;
  Bispinor o;
  o[0] = k * (em * (1.0 + a) + ep * (1.0 - a));
  o[1] = cplx{0.0, -1.0} * cplx{p.x, p.y} * (std::sin(lam * t) / (lam * std::sqrt(2.0)));
  o[2] = k * (em * (1.0 - b) + ep * (1.0 + b));
  o[3] = o[1];
  return o;
}

Bispinor evolve_mode_example_ii(const Momentum3& p, double t) {
  const double lam = energy(p);
  const cplx em = std::polar(1.0, -lam * t), ep = std::polar(1.0, lam * t);
  const double k = 1.0 / (2.0 * std::sqrt(2.0));
  const cplx a = (1.0 + cplx{p.x, -p.y}) / lam;
  const cplx b = (1.0 - cplx{p.x, p.y}) / lam;
  Bispinor o;
  o[0] = k * (em * (1.0 + a) + ep * (1.0 - a));
  o[1] = cplx{0.0, 1.0} * (p.z * std::sin(lam * t) / (lam * std::sqrt(2.0)));
  o[2] = -o[1];
  o[3] = k * (em * (1.0 - b) + ep * (1.0 + b));
  return o;
}

EnergySplit energy_split(const Bispinor& phi, const Momentum3& p) {
  const auto C = project_coefficients(phi, p);
  return {std::norm(C[0]) + std::norm(C[1]), std::norm(C[2]) + std::norm(C[3])};
}

EnergySplit energy_split(const PolarizedState& state, const Momentum3& p) {
  return energy_split(state.phi(), p);
}

EnergySplit energy_split_example_i(const Momentum3& p) {
  const double r = p.z / energy(p);
  return {0.5 * (1.0 + r), 0.5 * (1.0 - r)};
}

WCurve w_curve(const PolarizedState& state, const std::vector<double>& pz_samples) {
  const GaussianPacket& g = state.packet();
  if (g.m_axial != 0) throw InvalidInput("w_curve needs an axially symmetric envelope (m_axial = 0)");
  const double cut = gaussian_cutoff(g.d);
  WCurve out;
  out.pz = pz_samples;
  out.w_plus.reserve(pz_samples.size());
  out.w_minus.reserve(pz_samples.size());
  for (double pz : pz_samples) {
    // The split may depend on the azimuth for a general polarization; average
    // it with an 8-point trapezoid (exact for the low-degree dependence).
    auto split_at = [&](double pp) {
      EnergySplit s{};
      for (int a = 0; a < 8; ++a) {
        const double th = 2.0 * kPi * a / 8.0;
        const EnergySplit e = energy_split(state.phi(), {pp * std::cos(th), pp * std::sin(th), pz});
        s.w_plus += e.w_plus / 8.0;
        s.w_minus += e.w_minus / 8.0;
      }
      return s;
    };
    const QuadResult plus = integrate_adaptive(
        [&](double pp) { return envelope_momentum_density(g, {pp, 0.0, pz}) * split_at(pp).w_plus * pp; }, 0.0, cut,
        1e-15, 1e-12);
    const QuadResult minus = integrate_adaptive(
        [&](double pp) { return envelope_momentum_density(g, {pp, 0.0, pz}) * split_at(pp).w_minus * pp; }, 0.0, cut,
        1e-15, 1e-12);
    out.w_plus.push_back(2.0 * kPi * plus.value);
    out.w_minus.push_back(2.0 * kPi * minus.value);
  }
  return out;
}

std::vector<double> default_pz_samples(const GaussianPacket& packet, std::size_t count) {
  if (count < 2) throw InvalidInput("need at least two p_z samples");
  const double half = gaussian_cutoff(packet.delta);
  std::vector<double> pz(count);
  for (std::size_t i = 0; i < count; ++i)
    pz[i] = packet.k0 - half + 2.0 * half * static_cast<double>(i) / static_cast<double>(count - 1);
  return pz;
}

double w_curve_total(const WCurve& c) {
  if (c.pz.size() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < c.pz.size(); ++i) {
    const double h = c.pz[i + 1] - c.pz[i];
    s += 0.5 * h * (c.w_plus[i] + c.w_minus[i] + c.w_plus[i + 1] + c.w_minus[i + 1]);
  }
  return s;
}

// ---------------------------------------------------------------------------

SpectralEvolver::SpectralEvolver(const BispinorField& initial, double aliasing_tol)
    : grid_(initial.grid), t0_(initial.time), psi_k_(initial.data) {
  grid_.validate();
  k_[0] = wavenumbers(grid_.nx, grid_.dx);
  k_[1] = wavenumbers(grid_.ny, grid_.dy);
  k_[2] = wavenumbers(grid_.nz, grid_.dz);
  k_evolve_ = k_;
  for (std::size_t a = 0; a < 3; ++a)
    if (k_[a].size() % 2 == 0) k_evolve_[a][k_[a].size() / 2] = 0.0;

  fft3(psi_k_, grid_, FFTW_FORWARD);

  const double scale = std::pow(2.0 * kPi, -1.5) * grid_.cell_volume();
  const auto& o = grid_.origin;
  double total = 0.0, nyq = 0.0;
  for (std::size_t i = 0; i < grid_.nx; ++i) {
    const bool ni = grid_.nx % 2 == 0 && i == grid_.nx / 2;
    for (std::size_t j = 0; j < grid_.ny; ++j) {
      const bool nj = grid_.ny % 2 == 0 && j == grid_.ny / 2;
      for (std::size_t k = 0; k < grid_.nz; ++k) {
        const bool nk = grid_.nz % 2 == 0 && k == grid_.nz / 2;
        const double phase = -(k_[0][i] * o[0] + k_[1][j] * o[1] + k_[2][k] * o[2]);
        Bispinor& s = psi_k_[grid_.index(i, j, k)];
        s *= std::polar(scale, phase);
        const double w = s.norm2();
        total += w;
        if (ni || nj || nk) nyq += w;
      }
    }
  }
  nyquist_fraction_ = total > 0.0 ? nyq / total : 0.0;
  if (nyquist_fraction_ > aliasing_tol)
    throw NumericalError("spectral mass on the Nyquist planes is " + std::to_string(nyquist_fraction_) +
                             " of the total; refine the lattice",
                         nyquist_fraction_);
}

double SpectralEvolver::wavenumber(Axis a, std::size_t i) const { return k_[static_cast<std::size_t>(a)][i]; }

double SpectralEvolver::dk(Axis a) const {
  return 2.0 * kPi / (static_cast<double>(grid_.extent(a)) * grid_.spacing(a));
}

void SpectralEvolver::evolve_into(double t, std::vector<Bispinor>& out) const {
  out.resize(psi_k_.size());
  const double tau = t - t0_;
  for_each_slab(grid_.nx, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t j = 0; j < grid_.ny; ++j)
        for (std::size_t k = 0; k < grid_.nz; ++k) {
          const std::size_t n = grid_.index(i, j, k);
          out[n] = tau == 0.0 ? psi_k_[n] : propagate(k_evolve_[0][i], k_evolve_[1][j], k_evolve_[2][k], tau, psi_k_[n]);
        }
  });
}

BispinorField SpectralEvolver::momentum_field(double t) const {
  BispinorField f;
  f.grid = grid_;
  f.grid.dx = dk(Axis::x);
  f.grid.dy = dk(Axis::y);
  f.grid.dz = dk(Axis::z);
  f.grid.origin = {0.0, 0.0, 0.0};
  f.time = t;
  evolve_into(t, f.data);
  return f;
}

BispinorField SpectralEvolver::position_field(double t) const {
  BispinorField f(grid_, t);
  evolve_into(t, f.data);
  const double scale = std::pow(2.0 * kPi, -1.5) * dk(Axis::x) * dk(Axis::y) * dk(Axis::z);
  const auto& o = grid_.origin;
  for (std::size_t i = 0; i < grid_.nx; ++i)
    for (std::size_t j = 0; j < grid_.ny; ++j)
      for (std::size_t k = 0; k < grid_.nz; ++k) {
        const double phase = k_[0][i] * o[0] + k_[1][j] * o[1] + k_[2][k] * o[2];
        f.data[grid_.index(i, j, k)] *= std::polar(scale, phase);
      }
  fft3(f.data, grid_, FFTW_BACKWARD);
  return f;
}

SpectralEvolver::PlaneSampler SpectralEvolver::plane_sampler(double t, std::size_t z_index) const {
  if (z_index >= grid_.nz) throw InvalidInput("plane index outside the lattice");
  PlaneSampler s;
  s.nx_ = grid_.nx;
  s.ny_ = grid_.ny;
  s.kx_ = k_[0];
  s.ky_ = k_[1];
  s.origin_ = {grid_.origin[0], grid_.origin[1]};
  s.coeff_.assign(grid_.nx * grid_.ny, Bispinor{});
  s.scale_ = std::pow(2.0 * kPi, -1.5) * dk(Axis::x) * dk(Axis::y) * dk(Axis::z);
  const double z0 = grid_.z(z_index);
  const double tau = t - t0_;
  std::vector<cplx> ez(grid_.nz);
  for (std::size_t k = 0; k < grid_.nz; ++k) ez[k] = std::polar(1.0, k_[2][k] * z0);
  for (std::size_t i = 0; i < grid_.nx; ++i)
    for (std::size_t j = 0; j < grid_.ny; ++j) {
      Bispinor acc;
      for (std::size_t k = 0; k < grid_.nz; ++k) {
        const Bispinor v = propagate(k_evolve_[0][i], k_evolve_[1][j], k_evolve_[2][k], tau, psi_k_[grid_.index(i, j, k)]);
        acc += ez[k] * v;
      }
      s.coeff_[i * grid_.ny + j] = acc;
    }
  return s;
}

namespace {

// exp(i k v) for every wavenumber; the Nyquist entry of an even lattice
// becomes exp(i k o) cos(k (v - o)), which takes the same lattice values and
// is even about the lattice origin.
std::vector<cplx> basis(const std::vector<double>& k, double v, double origin) {
  std::vector<cplx> e(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) e[i] = std::polar(1.0, k[i] * v);
  if (k.size() % 2 == 0) {
    const double kn = k[k.size() / 2];
    e[k.size() / 2] = std::polar(1.0, kn * origin) * std::cos(kn * (v - origin));
  }
  return e;
}

}  // namespace

Bispinor SpectralEvolver::PlaneSampler::operator()(double x, double y) const {
  const std::vector<cplx> ex = basis(kx_, x, origin_[0]);
  const std::vector<cplx> ey = basis(ky_, y, origin_[1]);
  Bispinor out;
  for (std::size_t i = 0; i < nx_; ++i) {
    Bispinor row;
    const Bispinor* c = &coeff_[i * ny_];
    for (std::size_t j = 0; j < ny_; ++j) row += ey[j] * c[j];
    out += ex[i] * row;
  }
  out *= scale_;
  return out;
}

cplx SpectralEvolver::momentum_bilinear(const DiracMatrix& M, double t) const {
  const double tau = t - t0_;
  std::vector<cplx> parts(16);
  for_each_slab(grid_.nx, [&](std::size_t b, std::size_t e, std::size_t slab) {
    cplx acc = 0.0;
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t j = 0; j < grid_.ny; ++j)
        for (std::size_t k = 0; k < grid_.nz; ++k) {
          const Bispinor v = propagate(k_evolve_[0][i], k_evolve_[1][j], k_evolve_[2][k], tau, psi_k_[grid_.index(i, j, k)]);
          acc += inner(v, apply_matrix(M, v));
        }
    parts[slab] = acc;
  });
  cplx total = 0.0;
  for (const cplx& p : parts) total += p;
  return total * (dk(Axis::x) * dk(Axis::y) * dk(Axis::z));
}

SpectralEvolver::Moments SpectralEvolver::moments(double t) const {
  const double tau = t - t0_;
  std::vector<Moments> parts(16);
  for_each_slab(grid_.nx, [&](std::size_t b, std::size_t e, std::size_t slab) {
    Moments m;
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t j = 0; j < grid_.ny; ++j)
        for (std::size_t k = 0; k < grid_.nz; ++k) {
          const Bispinor v = propagate(k_evolve_[0][i], k_evolve_[1][j], k_evolve_[2][k], tau, psi_k_[grid_.index(i, j, k)]);
          const cplx a = std::conj(v[0]) * v[3] + std::conj(v[1]) * v[2];  // alpha_x, alpha_y pieces
          const cplx s = std::conj(v[0]) * v[1] + std::conj(v[2]) * v[3];  // Sigma_x, Sigma_y pieces
          const double n0 = std::norm(v[0]), n1 = std::norm(v[1]), n2 = std::norm(v[2]), n3 = std::norm(v[3]);
          m.alpha[0] += 2.0 * a.real();
          // alpha_y: 2 Im(psi1* psi4) - 2 Im(psi2* psi3)
          m.alpha[1] += 2.0 * (std::conj(v[0]) * v[3]).imag() - 2.0 * (std::conj(v[1]) * v[2]).imag();
          m.alpha[2] += 2.0 * ((std::conj(v[0]) * v[2]).real() - (std::conj(v[1]) * v[3]).real());
          m.sigma[0] += 2.0 * s.real();
          m.sigma[1] += 2.0 * s.imag();
          m.sigma[2] += n0 - n1 + n2 - n3;
          m.norm += n0 + n1 + n2 + n3;
        }
    parts[slab] = m;
  });
  Moments total;
  for (const Moments& p : parts) {
    for (std::size_t a = 0; a < 3; ++a) {
      total.alpha[a] += p.alpha[a];
      total.sigma[a] += p.sigma[a];
    }
    total.norm += p.norm;
  }
  const double dv = dk(Axis::x) * dk(Axis::y) * dk(Axis::z);
  for (std::size_t a = 0; a < 3; ++a) {
    total.alpha[a] *= dv;
    total.sigma[a] *= dv;
  }
  total.norm *= dv;
  return total;
}

double SpectralEvolver::momentum_norm() const {
  double s = 0.0;
  for (const Bispinor& v : psi_k_) s += v.norm2();
  return s * dk(Axis::x) * dk(Axis::y) * dk(Axis::z);
}

BispinorField synthesize_cartesian(const PolarizedState& state, const PositionGrid& grid, double t) {
  const SampledState s = initial_bispinor_field(state, grid);
  const double edge = boundary_mass_fraction(s.field);
  if (edge > 1e-6)
    throw NumericalError("packet is not contained in the box: boundary mass fraction " + std::to_string(edge), edge);
  SpectralEvolver ev(s.field);
  return ev.position_field(t);
}

// ---------------------------------------------------------------------------

Bispinor CylindricalField::at(std::size_t r, std::size_t k, double alpha) const {
  const std::size_t idx = r * z.size() + k;
  Bispinor out;
  for (std::size_t i = 0; i < 4; ++i)
    for (int n = -1; n <= 1; ++n) {
      const auto& h = harmonics[i][static_cast<std::size_t>(n + 1)];
      if (h.empty()) continue;
      out[i] += (n == 0 ? cplx{1.0, 0.0} : std::polar(1.0, n * alpha)) * h[idx];
    }
  return out;
}

double CylindricalField::density(std::size_t r, std::size_t k, double alpha) const {
  return at(r, k, alpha).norm2();
}

namespace {

// Panel breaks for the p_perp integral at radius rho.
std::vector<double> perp_breaks(double cut, double width, double t, double rho, int refine) {
  double h = std::min(0.5 * width, 3.0 / (t + 1e-300));
  h /= static_cast<double>(refine);
  const auto n = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(cut / h)));
  std::vector<double> b;
  for (std::size_t i = 0; i <= n; ++i) b.push_back(cut * static_cast<double>(i) / static_cast<double>(n));
  if (rho * cut > 20.0) {
    // Zeros of J_0 (McMahon), so each panel holds one half-oscillation at most.
    for (int s = 1;; ++s) {
      const double beta = (s - 0.25) * kPi;
      const double zero = beta + 1.0 / (8.0 * beta);
      const double p = zero / rho;
      if (p >= cut) break;
      if (refine > 1) b.push_back(p - 0.5 * kPi / rho);
      b.push_back(p);
    }
    std::sort(b.begin(), b.end());
    std::vector<double> merged;
    for (double v : b)
      if (v >= 0.0 && v <= cut && (merged.empty() || v - merged.back() > 1e-12 * cut)) merged.push_back(v);
    b.swap(merged);
  }
  return b;
}

struct CylRules {
  PanelRule pz;
};

CylindricalField cylindrical_pass(const PolarizedState& state, Example ex, const std::vector<double>& rho,
                                  const std::vector<double>& zs, double t, int refine) {
  const GaussianPacket& g = state.packet();
  const double zmax = zs.empty() ? 0.0 : std::max(std::abs(zs.front()), std::abs(zs.back()));
  double zabs = 0.0;
  for (double z : zs) zabs = std::max(zabs, std::abs(z));
  (void)zmax;
  // Amplitude integrals: cut where f itself (not |f|^2) drops below 1e-14.
  const double zc = std::sqrt(2.0) * gaussian_cutoff(g.delta);
  double hz = std::min({0.5 / g.delta, 3.0 / (t + 1e-300), 6.0 / (zabs + 1e-300)});
  hz /= static_cast<double>(refine);
  const auto nz_panels = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(2.0 * zc / hz)));
  const PanelRule pz_rule = PanelRule::uniform(g.k0 - zc, g.k0 + zc, nz_panels);
  const double cut = std::sqrt(2.0) * gaussian_cutoff(g.d);

  CylindricalField out;
  out.example = ex;
  out.time = t;
  out.rho = rho;
  out.z = zs;
  const std::size_t npts = rho.size() * zs.size();
  auto alloc = [&](std::size_t i, int n) { out.harmonics[i][static_cast<std::size_t>(n + 1)].assign(npts, 0.0); };
  if (ex == Example::i) {
    alloc(0, 0);
    alloc(1, 1);
    alloc(2, 0);
    alloc(3, 1);
  } else {
    alloc(0, 0);
    alloc(0, -1);
    alloc(1, 0);
    alloc(2, 0);
    alloc(3, 0);
    alloc(3, 1);
  }

  const double c4 = 1.0 / (4.0 * std::sqrt(kPi));
  const double c2 = 1.0 / (2.0 * std::sqrt(kPi));
  const std::size_t nzn = pz_rule.x.size();

  // e^{i p_z z} w_z for every (z sample, p_z node).
  std::vector<cplx> ephase(zs.size() * nzn);
  for (std::size_t k = 0; k < zs.size(); ++k)
    for (std::size_t j = 0; j < nzn; ++j) ephase[k * nzn + j] = std::polar(pz_rule.w[j], pz_rule.x[j] * zs[k]);

  for_each_slab(rho.size(), [&](std::size_t rb, std::size_t re, std::size_t) {
    std::vector<std::array<cplx, 6>> G(nzn);
    for (std::size_t r = rb; r < re; ++r) {
      const double rr = rho[r];
      const PanelRule perp = PanelRule::from_breaks(perp_breaks(cut, 1.0 / g.d, t, rr, refine));
      std::vector<double> j0(perp.x.size()), j1(perp.x.size());
      for (std::size_t q = 0; q < perp.x.size(); ++q) {
        j0[q] = bessel_j(0, perp.x[q] * rr);
        j1[q] = bessel_j(1, perp.x[q] * rr);
      }
      for (std::size_t j = 0; j < nzn; ++j) {
        const double pz = pz_rule.x[j];
        std::array<cplx, 6> acc{};
        for (std::size_t q = 0; q < perp.x.size(); ++q) {
          const double pp = perp.x[q];
          const double lam = std::sqrt(1.0 + pp * pp + pz * pz);
          const double f = envelope_momentum(g, {pp, 0.0, pz}).real();
          const double w = perp.w[q] * f * pp;
          const double cs = std::cos(lam * t), sn = std::sin(lam * t);
          if (ex == Example::i) {
            const cplx em{cs, -sn}, ep{cs, sn};
            const double a = (1.0 + pz) / lam, b = (1.0 - pz) / lam;
            acc[0] += (w * j0[q]) * (em * (1.0 + a) + ep * (1.0 - a));
            acc[1] += w * pp / lam * sn * j1[q];
            acc[2] += (w * j0[q]) * (em * (1.0 - b) + ep * (1.0 + b));
          } else {
            acc[0] += (w * j0[q]) * cplx{cs, -sn / lam};
            acc[1] += w * pp / lam * sn * j1[q];
            acc[2] += w / lam * sn * j0[q];
            acc[3] += (w * j0[q]) * cplx{cs, sn / lam};
          }
        }
        G[j] = acc;
      }
      for (std::size_t k = 0; k < zs.size(); ++k) {
        std::array<cplx, 6> s{};
        const cplx* e = &ephase[k * nzn];
        for (std::size_t j = 0; j < nzn; ++j) {
          for (std::size_t m = 0; m < 4; ++m) s[m] += e[j] * G[j][m];
          s[4] += e[j] * pz_rule.x[j] * G[j][2];
        }
        const std::size_t idx = r * zs.size() + k;
        if (ex == Example::i) {
          out.harmonics[0][1][idx] = c4 * s[0];
          out.harmonics[1][2][idx] = c2 * s[1];
          out.harmonics[2][1][idx] = c4 * s[2];
          out.harmonics[3][2][idx] = c2 * s[1];
        } else {
          out.harmonics[0][1][idx] = c2 * s[0];
          out.harmonics[0][0][idx] = c2 * s[1];
          out.harmonics[1][1][idx] = cplx{0.0, c2} * s[4];
          out.harmonics[2][1][idx] = -cplx{0.0, c2} * s[4];
          out.harmonics[3][1][idx] = c2 * s[3];
          out.harmonics[3][2][idx] = c2 * s[1];
        }
      }
    }
  });
  return out;
}

}  // namespace

CylindricalField synthesize_cylindrical(const PolarizedState& state, const std::vector<double>& rho,
                                        const std::vector<double>& z, double t, double tol) {
  const Example ex = classify(state.phi());
  if (ex == Example::none)
    throw InvalidInput("cylindrical synthesis is available for the (1,0,1,0) and (1,0,0,1) polarizations only");
  if (state.packet().m_axial != 0) throw InvalidInput("cylindrical synthesis needs m_axial = 0");
  for (double r : rho)
    if (r < 0.0) throw InvalidInput("rho samples must be non-negative");
  t = std::abs(t) > 0.0 ? t : 0.0;
  CylindricalField base = cylindrical_pass(state, ex, rho, z, std::abs(t), 1);
  const CylindricalField fine = cylindrical_pass(state, ex, rho, z, std::abs(t), 2);
  double err = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t n = 0; n < 3; ++n)
      for (std::size_t q = 0; q < base.harmonics[i][n].size(); ++q)
        err = std::max(err, std::abs(base.harmonics[i][n][q] - fine.harmonics[i][n][q]));
  if (err > tol) throw NumericalError("cylindrical quadrature did not converge", err);
  // Keep the finer values; the estimate belongs to the coarser rule.
  CylindricalField out = fine;
  out.error_estimate = err;
  return out;
}

}  // namespace dirac
