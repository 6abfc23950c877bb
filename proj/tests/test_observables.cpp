#include <doctest.h>

#include <cmath>
#include <random>

#include "dirac/error.hpp"
#include "dirac/observables.hpp"

using namespace dirac;

namespace {

std::vector<double> grid_times(double t_end, double dt) {
  std::vector<double> t;
  for (std::size_t n = 0; n * dt <= t_end + 1e-12; ++n) t.push_back(static_cast<double>(n) * dt);
  return t;
}

Bispinor random_bispinor(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Bispinor s;
  for (std::size_t i = 0; i < 4; ++i) s[i] = {n(rng), n(rng)};
  return s;
}

}  // namespace

TEST_CASE("oracles at t = 0 are the polarization bilinears") {
  const GaussianPacket g{1, 5, 0, 0};
  // <alpha> at t = 0 is the bilinear of phi: (0, 0, 1) for i, (1, 0, 0) for ii.
  const Vec3 vi = velocity_oracle_example_i(g, 0.0);
  const Vec3 vii = velocity_oracle_example_ii(g, 0.0);
  CHECK(vi[2] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(vi[0]) < 1e-12);
  CHECK(vii[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(vii[2]) < 1e-12);
  const Vec3 si = spin_oracle(g, Example::i, 0.0);
  CHECK(si[2] == doctest::Approx(1.0).epsilon(1e-10));
  const Vec3 sii = spin_oracle(g, Example::ii, 0.0);
  for (double v : sii) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("oracle series agree with the pointwise oracles") {
  const GaussianPacket g{2.5, 5, 1, 0};
  const std::vector<double> ts{0.0, 1.3, 4.0};
  const ObservableSeries s = velocity_oracle_series(g, Example::ii, ts);
  s.validate(true);
  for (std::size_t n = 0; n < ts.size(); ++n) {
    const Vec3 v = velocity_oracle_example_ii(g, ts[n]);
    for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(s.values[n][c] - v[c]) < 1e-10);
  }
}

TEST_CASE("uniform time grids: the phase recurrence matches direct evaluation") {
  const GaussianPacket g{1, 5, 0, 0};
  const std::vector<double> ts = grid_times(30, 0.05);
  const ObservableSeries s = velocity_oracle_series(g, Example::i, ts);
  for (std::size_t n : {std::size_t{0}, std::size_t{31}, std::size_t{333}, std::size_t{599}}) {
    // Two samples ending at the same t_max: same rule, direct cos/sin.
    const ObservableSeries one = velocity_oracle_series(g, Example::i, {ts[n], ts.back()});
    for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(s.values[n][c] - one.values[0][c]) < 1e-13);
  }
}

TEST_CASE("spectral grid moments follow the oracle") {
  const PolarizedState s({1.5, 1.5, 0.5, 0}, polarization_example_ii());
  const SpectralEvolver ev(initial_bispinor_field(s, PositionGrid::centered(64, 0.4)).field);
  for (double t : {0.0, 0.7, 2.0}) {
    const GridMoments m = spectral_moments(ev, t);
    const Vec3 v = velocity_oracle_example_ii(s.packet(), t);
    const Vec3 sp = spin_oracle(s.packet(), Example::ii, t);
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(std::abs(m.velocity[c] - v[c]) < 1e-3);
      CHECK(std::abs(m.spin[c] - sp[c]) < 1e-3);
    }
  }
  // Position-space grid moments equal the momentum-space ones (Parseval).
  const GridMoments a = grid_moments(ev.position_field(1.0));
  const GridMoments b = spectral_moments(ev, 1.0);
  for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(a.velocity[c] - b.velocity[c]) < 1e-10);
}

TEST_CASE("mean position moves with the velocity") {
  // d<r>/dt = <alpha>, checked by a centered difference.
  const PolarizedState s({1.5, 1.5, 0.6, 0}, polarization_example_i());
  const SpectralEvolver ev(initial_bispinor_field(s, PositionGrid::centered(64, 0.4)).field);
  const double t = 1.0, h = 1e-3;
  const Vec3 a = mean_position(ev.position_field(t + h));
  const Vec3 b = mean_position(ev.position_field(t - h));
  const GridMoments m = spectral_moments(ev, t);
  for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs((a[c] - b[c]) / (2 * h) - m.velocity[c]) < 1e-5);
}

TEST_CASE("spin density components") {
  const PositionGrid g = PositionGrid::centered(2, 1.0);
  BispinorField f(g);
  f.data[0] = Bispinor{{1, 0, 0, 0}};
  f.data[1] = Bispinor{{1, 1, 0, 0}};
  f.data[2] = Bispinor{{1, kI, 0, 0}};
  f.data[3] = Bispinor{{0, 0, 0, 1}};
  const SpinDensityField s = spin_density(f);
  CHECK(s.sz.data[0] == 1.0);
  CHECK(s.sx.data[1] == 2.0);
  CHECK(s.sy.data[2] == 2.0);
  CHECK(s.sz.data[3] == -1.0);
  const ScalarField rho = probability_density(f);
  CHECK(rho.data[1] == 2.0);
}

TEST_CASE("example i: the transverse spin density is radial") {
  // Sigma_x = x g(rho, z, t), Sigma_y = y g(rho, z, t), so y Sigma_x = x Sigma_y.
  const PolarizedState s({1, 2, 0, 0}, polarization_example_i());
  const SpectralEvolver ev(initial_bispinor_field(s, PositionGrid::centered(64, 0.4)).field);
  const BispinorField f = ev.position_field(2.0);
  const SpinDensityField sd = spin_density(f);
  const PositionGrid& g = f.grid;
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t k : {std::size_t{32}, std::size_t{36}}) {
        const std::size_t n = g.index(i, j, k);
        worst = std::max(worst, std::abs(g.y(j) * sd.sx.data[n] - g.x(i) * sd.sy.data[n]));
        scale = std::max(scale, std::hypot(g.x(i), g.y(j)) * std::hypot(sd.sx.data[n], sd.sy.data[n]));
      }
  CHECK(scale > 1e-3);
  CHECK(worst < 1e-12 * scale);
}

TEST_CASE("discrete symmetries are involutions and P_z fixes example ii at k0 = 0") {
  std::mt19937_64 rng(5);
  const PositionGrid g = PositionGrid::centered(6, 0.5);
  BispinorField f(g);
  for (auto& v : f.data) v = random_bispinor(rng);
  for (DiscreteSymmetry op : {DiscreteSymmetry::P, DiscreteSymmetry::P_xy, DiscreteSymmetry::P_x, DiscreteSymmetry::P_y,
                              DiscreteSymmetry::P_z, DiscreteSymmetry::antiunitary_z})
    CHECK(relative_l2(apply_discrete_symmetry(apply_discrete_symmetry(f, op), op), f) == 0.0);

  const PolarizedState s({1, 2, 0, 0}, polarization_example_ii());
  // Box of +-3.2 Delta: the truncated tails put mass on the Nyquist mode,
  // which must evolve symmetrically too.
  const SpectralEvolver ev(initial_bispinor_field(s, PositionGrid::centered(32, 0.4)).field);
  const BispinorField ft = ev.position_field(1.5);
  CHECK(relative_l2(apply_discrete_symmetry(ft, DiscreteSymmetry::P_z), ft) < 1e-12);
}

TEST_CASE("zb_fit") {
  const std::vector<double> t = grid_times(30, 0.05);
  std::vector<double> x(t.size());
  for (std::size_t n = 0; n < t.size(); ++n) x[n] = 0.3 + 0.5 * std::exp(-t[n] / 5.0) * std::cos(2.0 * t[n]);
  const ZbFit f = zb_fit(t, x);
  CHECK(f.drift == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(f.frequency == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(f.initial_amplitude == doctest::Approx(0.5).epsilon(1e-3));
  // Envelope 0.5 exp(-t/5) reaches 10% at t = 5 ln 10.
  CHECK(f.decay_time(0.1) == doctest::Approx(5.0 * std::log(10.0)).epsilon(0.03));

  std::vector<double> flat(t.size(), 0.25);
  const ZbFit c = zb_fit(t, flat);
  CHECK(c.drift == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(c.frequency == 0.0);

  CHECK_THROWS_AS(zb_fit(grid_times(5, 0.05), std::vector<double>(101, 0.0)), InvalidInput);
  CHECK_THROWS_AS(zb_fit(grid_times(30, 1.0), std::vector<double>(31, 0.0)), InvalidInput);
}

TEST_CASE("drift velocity: closed-form constants and the two routes") {
  const GaussianPacket g{5, 5, 0, 0};
  const MomentumQuadrature rule = MomentumQuadrature::for_packet(g, 0.0);
  const DriftVelocity di = drift_velocity_general(polarization_example_i(), rule, Axis::z);
  CHECK(std::abs(di.total - drift_constant_example_i(g)) < 1e-12);
  CHECK(std::abs(di.total - di.via_coefficients) < 1e-12);
  CHECK(std::abs(di.mass_term) < 1e-14);
  const DriftVelocity dii = drift_velocity_general(polarization_example_ii(), rule, Axis::x);
  CHECK(std::abs(dii.total - drift_constant_example_ii(g)) < 1e-12);

  std::mt19937_64 rng(3);
  const GaussianPacket h{1.5, 2, 0.7, 0};
  const MomentumQuadrature r2 = MomentumQuadrature::for_packet(h, 0.0);
  for (int n = 0; n < 10; ++n) {
    const Bispinor phi = random_bispinor(rng);
    for (Axis mu : {Axis::x, Axis::y, Axis::z}) {
      const DriftVelocity d = drift_velocity_general(phi, r2, mu);
      CHECK(std::abs(d.initial_velocity_term + d.mass_term + d.cross_term - d.total) < 1e-12);
      CHECK(std::abs(d.via_coefficients - d.total) < 1e-12);
    }
  }
}

TEST_CASE("symmetry metrics") {
  const PositionGrid g = PositionGrid::centered(32, 0.25);
  ScalarField round(g), skew(g);
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t k = 0; k < g.nz; ++k) {
        const double r2 = g.x(i) * g.x(i) + g.y(j) * g.y(j);
        round.data[g.index(i, j, k)] = std::exp(-r2) * std::exp(-g.z(k) * g.z(k));
        skew.data[g.index(i, j, k)] = std::exp(-r2 - g.x(i)) * std::exp(-(g.z(k) - 0.5) * (g.z(k) - 0.5));
      }
  CHECK(symmetry_metric(round, SymmetryKind::z_parity) < 1e-15);
  CHECK(symmetry_metric(round, SymmetryKind::xy_parity) < 1e-15);
  CHECK(symmetry_metric(round, SymmetryKind::axial) < 0.05);
  CHECK(symmetry_metric(skew, SymmetryKind::z_parity) > 0.1);
  CHECK(symmetry_metric(skew, SymmetryKind::xy_parity) > 0.1);
  CHECK(symmetry_metric(skew, SymmetryKind::axial) > 0.1);

  // The band-limited axial metric has no interpolation error.
  const PolarizedState s({1, 2, 0, 0}, polarization_example_i());
  const SpectralEvolver ev(initial_bispinor_field(s, PositionGrid::centered(32, 0.4)).field);
  CHECK(axial_metric_spectral(ev, 1.0, 16) < 1e-8);
  const PolarizedState s2({1, 2, 0, 0}, polarization_example_ii());
  const SpectralEvolver ev2(initial_bispinor_field(s2, PositionGrid::centered(32, 0.4)).field);
  CHECK(axial_metric_spectral(ev2, 1.0, 16) > 0.05);
}

TEST_CASE("series validation") {
  ObservableSeries s;
  s.times = {0.0, 1.0};
  s.values = {Vec3{0.1, 0, 0}, Vec3{1.5, 0, 0}};
  CHECK_NOTHROW(s.validate(false));
  CHECK_THROWS_AS(s.validate(true), InvalidInput);
  s.times = {1.0, 1.0};
  CHECK_THROWS_AS(s.validate(false), InvalidInput);
}

TEST_CASE("results do not depend on the worker count") {
  const GaussianPacket g{1.5, 1.5, 1, 0};
  const PolarizedState s(g, polarization_example_ii());
  const BispinorField f0 = initial_bispinor_field(s, PositionGrid::centered(32, 0.4)).field;
  auto run_all = [&] {
    const ObservableSeries o = velocity_oracle_series(g, Example::ii, grid_times(20, 0.25));
    const SpectralEvolver ev(f0);
    const GridMoments m = spectral_moments(ev, 1.5);
    return std::make_pair(o.values, m.velocity);
  };
  set_worker_count(1);
  const auto one = run_all();
  set_worker_count(4);
  const auto four = run_all();
  set_worker_count(0);
  CHECK(one.first == four.first);
  CHECK(one.second == four.second);
}
