#include <doctest.h>

#include <cmath>
#include <random>

#include "dirac/error.hpp"
#include "dirac/fdtd.hpp"
#include "dirac/packet.hpp"
#include "dirac/spectral.hpp"

using namespace dirac;

namespace {

BispinorField random_field(const PositionGrid& g, std::uint64_t seed) {
  BispinorField f(g);
  perturb(f, 1.0, seed);
  return f;
}

cplx inner(const BispinorField& a, const BispinorField& b) {
  cplx s = 0.0;
  for (std::size_t n = 0; n < a.data.size(); ++n) s += dirac::inner(a.data[n], b.data[n]);
  return s;
}

double max_diff(const BispinorField& a, const BispinorField& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.data.size(); ++n)
    for (std::size_t c = 0; c < 4; ++c) m = std::max(m, std::abs(a.data[n][c] - b.data[n][c]));
  return m;
}

bool interior(const PositionGrid& g, std::size_t i, std::size_t j, std::size_t k) {
  return i > 0 && j > 0 && k > 0 && i + 1 < g.nx && j + 1 < g.ny && k + 1 < g.nz;
}

}  // namespace

TEST_CASE("stencil on a constant spinor is the mass term") {
  const PositionGrid g = PositionGrid::centered(8, 0.3);
  const Bispinor phi{{cplx{0.3, 0.1}, cplx{-0.2, 0.5}, 0.7, cplx{0, -0.4}}};
  BispinorField f(g);
  for (auto& s : f.data) s = phi;
  const BispinorField h = hamiltonian_apply(f);
  const Bispinor ref = apply_matrix(beta(), phi);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t k = 0; k < g.nz; ++k)
        if (interior(g, i, j, k))
          for (std::size_t c = 0; c < 4; ++c) worst = std::max(worst, std::abs(h.at(i, j, k)[c] - ref[c]));
  CHECK(worst < 1e-15);
}

TEST_CASE("plane wave: the difference symbol is sin(kh)/h") {
  const double h = 0.4;
  const PositionGrid g = PositionGrid::centered(10, h);
  const Momentum3 k{0.7, -1.3, 2.1};
  const Bispinor phi = normalized(Bispinor{{1, cplx{0, 1}, 0.5, -0.25}});
  BispinorField f(g);
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t l = 0; l < g.nz; ++l)
        f.at(i, j, l) = std::exp(kI * (k.x * g.x(i) + k.y * g.y(j) + k.z * g.z(l))) * phi;
  const Momentum3 symbol{std::sin(k.x * h) / h, std::sin(k.y * h) / h, std::sin(k.z * h) / h};
  const DiracMatrix H = hamiltonian(symbol);
  const BispinorField out = hamiltonian_apply(f);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t l = 0; l < g.nz; ++l)
        if (interior(g, i, j, l)) {
          const Bispinor ref = apply_matrix(H, f.at(i, j, l));
          for (std::size_t c = 0; c < 4; ++c) worst = std::max(worst, std::abs(out.at(i, j, l)[c] - ref[c]));
        }
  CHECK(worst < 1e-14);
}

TEST_CASE("the discrete operator is Hermitian with the hard wall") {
  const PositionGrid g = PositionGrid::centered(9, 8, 7, 0.5);
  const BispinorField a = random_field(g, 1), b = random_field(g, 2);
  const cplx lhs = inner(a, hamiltonian_apply(b));
  const cplx rhs = inner(hamiltonian_apply(a), b);
  CHECK(std::abs(lhs - rhs) < 1e-11 * std::abs(lhs));
  CHECK_THROWS_AS(hamiltonian_apply(a, const_cast<BispinorField&>(a)), InvalidInput);
}

TEST_CASE("stability margin and limits") {
  CHECK(stability_margin(0.5, 0.2) == doctest::Approx(-0.12).epsilon(1e-12));
  CHECK(max_stable_dt(0.5) == doctest::Approx(0.117041).epsilon(1e-5));
  CHECK(std::abs(stability_margin(0.5, max_stable_dt(0.5))) < 1e-15);
  CHECK(stability_margin(0.5, 0.11) > 0.0);
  CHECK(stability_margin(0.5, 0.12) < 0.0);
  for (double d : {0.1, 0.4, 0.9})
    CHECK(max_stable_dt(d) == doctest::Approx(d * d / std::sqrt(d * d * d * d + 2 * d * d + 4)).epsilon(1e-15));
  CHECK(discrete_stability_limit(PositionGrid::centered(8, 0.5)) == doctest::Approx(1.0 / std::sqrt(13.0)).epsilon(1e-15));
  CHECK(stability_margin(PositionGrid::centered(8, 0.5), 0.2) == doctest::Approx(-0.12).epsilon(1e-12));
  PositionGrid skew = PositionGrid::centered(8, 0.5);
  skew.dz = 0.4;
  CHECK_THROWS_AS(stability_margin(skew, 0.05), ConfigError);
}

TEST_CASE("bootstrap") {
  const PolarizedState s({1.0, 1.2, 0.3, 0}, polarization_example_i());
  const BispinorField f0 = initial_bispinor_field(s, PositionGrid::centered(24, 0.4)).field;

  for (Bootstrap m : {Bootstrap::taylor2, Bootstrap::discrete_eigen, Bootstrap::spectral})
    CHECK(max_diff(bootstrap_first_step(f0, 0.0, m), f0) == 0.0);

  // Forward branch of the recurrence: unitary to rounding.
  const BispinorField e = bootstrap_first_step(f0, 0.1, Bootstrap::discrete_eigen);
  CHECK(std::abs(e.norm() / f0.norm() - 1.0) < 1e-13);
  CHECK(e.time == doctest::Approx(0.1));

  // taylor2 matches the exact discrete propagator up to dt^3 terms.
  auto gap = [&](double dt) {
    return max_diff(bootstrap_first_step(f0, dt, Bootstrap::taylor2), bootstrap_first_step(f0, dt, Bootstrap::discrete_eigen));
  };
  const double r = gap(0.04) / gap(0.02);
  CHECK(r > 7.0);
  CHECK(r < 17.0);

  CHECK_THROWS_AS(bootstrap_first_step(f0, 0.5, Bootstrap::discrete_eigen), NumericalError);
}

TEST_CASE("leap-frog runs") {
  const PolarizedState s({1.0, 1.0, 0.0, 0}, polarization_example_i());
  const BispinorField f0 = initial_bispinor_field(s, PositionGrid::centered(32, 0.4)).field;
  const double dt = 0.5 * max_stable_dt(0.4);

  SUBCASE("zero steps") {
    RunOptions opt;
    opt.snapshot_steps = {0};
    const RunResult r = run(make_leapfrog(f0, dt), 0, opt);
    CHECK(r.snapshots.size() == 1);
    CHECK(max_diff(r.snapshots[0], f0) == 0.0);
    CHECK(r.state.norm_history.size() == 1);
    CHECK(r.state.step_count == 0);
  }

  SUBCASE("history, snapshots and norm") {
    RunOptions opt;
    opt.snapshot_steps = {5, 20};
    const RunResult r = run(make_leapfrog(f0, dt), 20, opt);
    CHECK(r.state.norm_history.size() == 21);
    REQUIRE(r.snapshots.size() == 2);
    CHECK(r.snapshots[0].time == doctest::Approx(5 * dt).epsilon(1e-12));
    CHECK(r.snapshots[1].time == doctest::Approx(20 * dt).epsilon(1e-12));
    double worst = 0.0;
    for (double n : r.state.norm_history) worst = std::max(worst, std::abs(n / f0.norm() - 1.0));
    CHECK(worst < 1e-12);
  }

  SUBCASE("agrees with the exact propagator of the continuum operator") {
    // Second-order error: halving h should cut the density gap by about 4.
    auto gap = [&](double h) {
      const BispinorField g0 = initial_bispinor_field(s, PositionGrid::centered(static_cast<std::size_t>(12.8 / h), h)).field;
      const double step = 0.25 * max_stable_dt(h);
      const std::size_t n = static_cast<std::size_t>(std::lround(0.5 / step));
      const RunResult r = run(make_leapfrog(g0, 0.5 / static_cast<double>(n)), n);
      SpectralEvolver ev(g0);
      return relative_l2(r.state.psi_prev, ev.position_field(0.5));
    };
    const double coarse = gap(0.4), fine = gap(0.2);
    CHECK(coarse / fine > 3.0);
    CHECK(coarse / fine < 5.0);
  }

  SUBCASE("gates") {
    CHECK_THROWS_AS(make_leapfrog(f0, 0.2), ConfigError);
    CHECK_THROWS_AS(make_leapfrog(f0, 0.0), ConfigError);
    const BispinorField wide = initial_bispinor_field(s, PositionGrid::centered(8, 0.4)).field;
    CHECK_THROWS_AS(run(make_leapfrog(wide, dt), 1), ConfigError);
  }

  SUBCASE("instability is reported") {
    BispinorField noisy = f0;
    perturb(noisy, 1e-6, 42);
    // Beyond the discrete limit the recurrence has growing modes.
    const double bad = 1.2 * discrete_stability_limit(f0.grid);
    LeapFrogState st = make_leapfrog(noisy, bad, Bootstrap::taylor2, false);
    CHECK_THROWS_AS(run(std::move(st), 1000), NumericalError);
  }
}

TEST_CASE("perturb is seeded") {
  const PositionGrid g = PositionGrid::centered(4, 1.0);
  CHECK(max_diff(random_field(g, 9), random_field(g, 9)) == 0.0);
  CHECK(max_diff(random_field(g, 9), random_field(g, 10)) > 0.0);
}
