#include "dirac/fdtd.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "dirac/error.hpp"
#include "dirac/packet.hpp"
#include "dirac/spectral.hpp"

namespace dirac {

namespace {

constexpr std::size_t kSlabs = 16;

inline cplx times_minus_i(cplx z) { return {z.imag(), -z.real()}; }

/// Runs visit(n, i, j, k, H psi at n) over all nodes, slab-parallel in i.
template <class Visit>
void stencil(const BispinorField& in, Visit&& visit) {
  const PositionGrid& g = in.grid;
  const double ax = 0.5 / g.dx, ay = 0.5 / g.dy, az = 0.5 / g.dz;
  const Bispinor zero{};
  const std::size_t ny = g.ny, nz = g.nz;
  for_each_slab(
      g.nx,
      [&](std::size_t b, std::size_t e, std::size_t slab) {
        for (std::size_t i = b; i < e; ++i)
          for (std::size_t j = 0; j < ny; ++j) {
            const Bispinor* row = &in.data[g.index(i, j, 0)];
            const Bispinor* xm = i > 0 ? &in.data[g.index(i - 1, j, 0)] : nullptr;
            const Bispinor* xp = i + 1 < g.nx ? &in.data[g.index(i + 1, j, 0)] : nullptr;
            const Bispinor* ym = j > 0 ? &in.data[g.index(i, j - 1, 0)] : nullptr;
            const Bispinor* yp = j + 1 < ny ? &in.data[g.index(i, j + 1, 0)] : nullptr;
            for (std::size_t k = 0; k < nz; ++k) {
              const Bispinor& s = row[k];
              const Bispinor& sxm = xm ? xm[k] : zero;
              const Bispinor& sxp = xp ? xp[k] : zero;
              const Bispinor& sym = ym ? ym[k] : zero;
              const Bispinor& syp = yp ? yp[k] : zero;
              const Bispinor& szm = k > 0 ? row[k - 1] : zero;
              const Bispinor& szp = k + 1 < nz ? row[k + 1] : zero;
              cplx Dx[4], Dy[4], Dz[4];
              for (std::size_t c = 0; c < 4; ++c) {
                Dx[c] = ax * (sxp[c] - sxm[c]);
                Dy[c] = ay * (syp[c] - sym[c]);
                Dz[c] = az * (szp[c] - szm[c]);
              }
              // -i (alpha . D) + beta, with i Dy written out.
              auto iD = [](cplx z) { return cplx{-z.imag(), z.real()}; };
              Bispinor h;
              h[0] = times_minus_i(Dx[3] - iD(Dy[3]) + Dz[2]) + s[0];
              h[1] = times_minus_i(Dx[2] + iD(Dy[2]) - Dz[3]) + s[1];
              h[2] = times_minus_i(Dx[1] - iD(Dy[1]) + Dz[0]) - s[2];
              h[3] = times_minus_i(Dx[0] + iD(Dy[0]) - Dz[1]) - s[3];
              visit(g.index(i, j, k), i, j, k, h, slab);
            }
          }
      },
      kSlabs);
}

void require_same_grid(const BispinorField& a, const BispinorField& b) {
  if (a.grid.nx != b.grid.nx || a.grid.ny != b.grid.ny || a.grid.nz != b.grid.nz)
    throw InvalidInput("fields live on different lattices");
}

}  // namespace

void hamiltonian_apply(const BispinorField& in, BispinorField& out) {
  if (&in == &out) throw InvalidInput("hamiltonian_apply cannot work in place");
  if (out.data.size() != in.data.size()) out = BispinorField(in.grid, in.time);
  out.grid = in.grid;
  out.time = in.time;
  stencil(in, [&](std::size_t n, std::size_t, std::size_t, std::size_t, const Bispinor& h, std::size_t) {
    out.data[n] = h;
  });
}

BispinorField hamiltonian_apply(const BispinorField& in) {
  BispinorField out(in.grid, in.time);
  hamiltonian_apply(in, out);
  return out;
}

double stability_margin(double d, double dt) {
  const double d2 = d * d, t2 = dt * dt;
  return d2 * d2 * (1.0 - t2) - 2.0 * d2 * t2 - 4.0 * t2;
}

double stability_margin(const PositionGrid& grid, double dt) {
  if (!grid.uniform())
    throw ConfigError("the stability gate needs uniform spacing dx = dy = dz; got (" + std::to_string(grid.dx) +
                      ", " + std::to_string(grid.dy) + ", " + std::to_string(grid.dz) + ")");
  return stability_margin(grid.dx, dt);
}

double max_stable_dt(double d) {
  const double d2 = d * d;
  return d2 / std::sqrt(d2 * d2 + 2.0 * d2 + 4.0);
}

double discrete_stability_limit(const PositionGrid& g) {
  return 1.0 / std::sqrt(1.0 + 1.0 / (g.dx * g.dx) + 1.0 / (g.dy * g.dy) + 1.0 / (g.dz * g.dz));
}

BispinorField bootstrap_first_step(const BispinorField& field0, double dt, Bootstrap mode) {
  BispinorField out = field0;
  out.time = field0.time + dt;
  if (dt == 0.0) return out;

  if (mode == Bootstrap::spectral) {
    SpectralEvolver ev(field0);
    BispinorField f = ev.position_field(field0.time + dt);
    f.time = field0.time + dt;
    return f;
  }

  BispinorField h1 = hamiltonian_apply(field0);
  if (mode == Bootstrap::taylor2) {
    const BispinorField h2 = hamiltonian_apply(h1);
    for (std::size_t n = 0; n < out.data.size(); ++n)
      for (std::size_t c = 0; c < 4; ++c)
        out.data[n][c] += dt * times_minus_i(h1.data[n][c]) - 0.5 * dt * dt * h2.data[n][c];
    return out;
  }

  // sqrt(1 - x) = sum c_k x^k with c_0 = 1, c_k = c_{k-1} (k - 3/2) / k.
  if (dt >= discrete_stability_limit(field0.grid))
    throw NumericalError("dt exceeds the recurrence's stability limit; the forward branch is undefined", dt);
  const double base = std::sqrt(field0.norm());
  BispinorField v = field0, tmp(field0.grid), tmp2(field0.grid);
  double c = 1.0;
  bool converged = false;
  for (int k = 1; k <= 200; ++k) {
    hamiltonian_apply(v, tmp);
    hamiltonian_apply(tmp, tmp2);
    c *= (static_cast<double>(k) - 1.5) / static_cast<double>(k);
    double term2 = 0.0;
    for (std::size_t n = 0; n < v.data.size(); ++n) {
      v.data[n] = tmp2.data[n];
      v.data[n] *= dt * dt;
      Bispinor t = v.data[n];
      t *= c;
      out.data[n] += t;
      term2 += t.norm2();
    }
    if (std::sqrt(term2 * field0.grid.cell_volume()) <= 1e-16 * base) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericalError("bootstrap series did not converge", dt);
  for (std::size_t n = 0; n < out.data.size(); ++n)
    for (std::size_t i = 0; i < 4; ++i) out.data[n][i] += dt * times_minus_i(h1.data[n][i]);
  return out;
}

LeapFrogState make_leapfrog(const BispinorField& field0, double dt, Bootstrap mode, bool check_gate) {
  field0.grid.validate();
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (check_gate) {
    const double m = stability_margin(field0.grid, dt);
    if (!(m > 0.0)) {
      std::ostringstream msg;
      msg << "stability margin d^4(1-dt^2) - 2d^2dt^2 - 4dt^2 = " << m << " for d = " << field0.grid.dx
          << ", dt = " << dt << " (largest stable dt " << max_stable_dt(field0.grid.dx) << ")";
      throw ConfigError(msg.str());
    }
  }
  LeapFrogState s;
  s.dt = dt;
  s.psi_prev = field0;
  s.psi_curr = bootstrap_first_step(field0, dt, mode);
  s.reference_norm = field0.norm();
  s.norm_history.push_back(s.reference_norm);
  s.boundary_fraction = boundary_mass_fraction(field0);
  s.curr_norm = s.psi_curr.norm();
  return s;
}

void step(LeapFrogState& s, double norm_tol) {
  require_same_grid(s.psi_prev, s.psi_curr);
  const PositionGrid& g = s.psi_curr.grid;
  const double two_dt = 2.0 * s.dt;
  std::vector<double> mass(kSlabs, 0.0), edge(kSlabs, 0.0);
  std::vector<Bispinor>& prev = s.psi_prev.data;
  auto near = [](std::size_t i, std::size_t n) { return i < 2 || i + 2 >= n; };
  // Each node of prev is read and written only by its own visit, so the
  // update can overwrite prev in place.
  stencil(s.psi_curr, [&](std::size_t n, std::size_t i, std::size_t j, std::size_t k, const Bispinor& h,
                          std::size_t slab) {
    Bispinor& p = prev[n];
    for (std::size_t c = 0; c < 4; ++c) p[c] += two_dt * times_minus_i(h[c]);
    const double w = p.norm2();
    mass[slab] += w;
    if (near(i, g.nx) || near(j, g.ny) || near(k, g.nz)) edge[slab] += w;
  });
  double total = 0.0, boundary = 0.0;
  for (std::size_t b = 0; b < kSlabs; ++b) {
    total += mass[b];
    boundary += edge[b];
  }
  const double new_norm = total * g.cell_volume();
  std::swap(s.psi_prev, s.psi_curr);
  s.psi_curr.time = s.psi_prev.time + s.dt;
  s.step_count += 1;
  s.norm_history.push_back(s.curr_norm);
  s.curr_norm = new_norm;
  s.boundary_fraction = total > 0.0 ? boundary / total : 0.0;
  const double dev = std::abs(new_norm / s.reference_norm - 1.0);
  if (!(dev <= norm_tol)) {
    std::ostringstream msg;
    msg << "leap-frog instability at step " << s.step_count << " (t = " << s.psi_curr.time
        << "): relative norm deviation " << dev << " exceeds " << norm_tol << "; dt = " << s.dt
        << ", stability margin " << stability_margin(g.dx, s.dt);
    throw NumericalError(msg.str(), dev);
  }
}

RunResult run(LeapFrogState state, std::size_t n_steps, const RunOptions& opt) {
  RunResult r;
  const double edge0 = boundary_mass_fraction(state.psi_prev);
  if (edge0 >= opt.reflection_threshold) {
    std::ostringstream msg;
    msg << "initial packet touches the walls: boundary mass fraction " << edge0 << " >= "
        << opt.reflection_threshold << "; enlarge the lattice";
    throw ConfigError(msg.str());
  }
  auto scheduled = [&](std::size_t k) {
    for (std::size_t s : opt.snapshot_steps)
      if (s == k) return true;
    return false;
  };
  if (scheduled(state.step_count)) r.snapshots.push_back(state.psi_prev);
  for (std::size_t n = 0; n < n_steps; ++n) {
    step(state, opt.norm_tol);
    if (!r.reflection_flag && state.boundary_fraction > opt.reflection_threshold) {
      r.reflection_flag = true;
      r.reflection_step = state.step_count;
    }
    if (scheduled(state.step_count)) r.snapshots.push_back(state.psi_prev);
    if (r.reflection_flag && opt.stop_on_reflection) break;
  }
  r.state = std::move(state);
  return r;
}

void perturb(BispinorField& field, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, amplitude);
  for (Bispinor& s : field.data)
    for (std::size_t c = 0; c < 4; ++c) s[c] += cplx{normal(rng), normal(rng)};
}

}  // namespace dirac
