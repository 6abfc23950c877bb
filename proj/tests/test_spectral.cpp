#include <doctest.h>

#include <cmath>
#include <random>

#include "dirac/error.hpp"
#include "dirac/observables.hpp"
#include "dirac/packet.hpp"
#include "dirac/spectral.hpp"

using namespace dirac;

namespace {

double max_diff(const Bispinor& a, const Bispinor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Momentum3 random_p(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  return {u(rng), u(rng), u(rng)};
}

// exp(-i H t) by a truncated Taylor series of the 4x4 matrix, independent of
// both the eigen-expansion and the cos/sin closed form.
Bispinor taylor_evolve(const Bispinor& phi, const Momentum3& p, double t) {
  const DiracMatrix H = hamiltonian(p);
  Bispinor term = phi, sum = phi;
  for (int k = 1; k < 120; ++k) {
    term = apply_matrix(H, term);
    term *= cplx{0.0, -t / k};
    sum += term;
    if (std::sqrt(term.norm2()) < 1e-18) break;
  }
  return sum;
}

}  // namespace

TEST_CASE("mode evolution: identity, rest frame, worked example") {
  std::mt19937_64 rng(5);
  const Bispinor phi = normalized(Bispinor{{cplx{1, 2}, 0.5, cplx{0, -1}, 3}});
  CHECK(max_diff(evolve_mode_general(phi, random_p(rng), 0.0), phi) < 1e-15);

  const double s = 1.0 / std::sqrt(2.0);
  const double t = 0.83;
  const Bispinor rest = evolve_mode_general(polarization_example_i(), {0, 0, 0}, t);
  CHECK(max_diff(rest, Bispinor{{s * std::polar(1.0, -t), 0, s * std::polar(1.0, t), 0}}) < 1e-15);
  CHECK(max_diff(evolve_mode_example_i({0, 0, 0}, t), rest) < 1e-15);

  const Momentum3 p{0.3, 0.4, 0.5};
  CHECK(max_diff(evolve_mode_general(polarization_example_i(), p, 1.7), evolve_mode_example_i(p, 1.7)) < 1e-13);

  const Bispinor at = evolve_mode_example_i({1, 0, 0}, M_PI / (2.0 * std::sqrt(2.0)));
  CHECK(std::abs(at[1] - cplx{0, -0.5}) < 1e-15);
}

TEST_CASE("example closed forms: printed identities") {
  std::mt19937_64 rng(9);
  for (int n = 0; n < 200; ++n) {
    const Momentum3 p = random_p(rng);
    const double t = 10.0 * std::uniform_real_distribution<double>(0, 1)(rng);
    const Bispinor a = evolve_mode_example_i(p, t);
    CHECK(std::abs(a[1] - a[3]) == 0.0);
    CHECK(a.norm2() == doctest::Approx(1.0).epsilon(1e-14));
    const Bispinor b = evolve_mode_example_ii(p, t);
    CHECK(std::abs(b[1] + b[2]) == 0.0);
    CHECK(b.norm2() == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(std::abs(evolve_mode_example_i({0, 0, 0}, 2.0)[1]) == 0.0);
  const double p3 = 0.7, t = 1.3, lam = std::sqrt(1 + p3 * p3);
  const Bispinor b = evolve_mode_example_ii({0, 0, p3}, t);
  CHECK(std::abs(b[1] - cplx{0, p3 * std::sin(lam * t) / (lam * std::sqrt(2.0))}) < 1e-15);
  CHECK(max_diff(evolve_mode_example_ii({0.4, 0.1, 0.2}, 0.0), polarization_example_ii()) < 1e-15);
}

TEST_CASE("three routes agree for 1000 random modes") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ut(-8.0, 8.0);
  double gen_i = 0.0, gen_ii = 0.0, prop = 0.0, taylor = 0.0, group = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const Momentum3 p = random_p(rng);
    const double t = ut(rng), t2 = ut(rng);
    gen_i = std::max(gen_i, max_diff(evolve_mode_general(polarization_example_i(), p, t), evolve_mode_example_i(p, t)));
    gen_ii = std::max(gen_ii, max_diff(evolve_mode_general(polarization_example_ii(), p, t), evolve_mode_example_ii(p, t)));
    const Bispinor phi = normalized(Bispinor{{cplx{ut(rng), ut(rng)}, ut(rng), cplx{0, ut(rng)}, ut(rng)}});
    const Bispinor g = evolve_mode_general(phi, p, t);
    prop = std::max(prop, max_diff(apply_matrix(mode_propagator(p, t), phi), g));
    // The plain series loses digits for large lambda t; compare on |t| <= 1.
    if (n < 200) {
      const double ts = t / 8.0;
      taylor = std::max(taylor, max_diff(taylor_evolve(phi, p, ts), evolve_mode_general(phi, p, ts)));
    }
    group = std::max(group, max_diff(evolve_mode_general(g, p, t2), evolve_mode_general(phi, p, t + t2)));
  }
  CHECK(gen_i < 1e-13);
  CHECK(gen_ii < 1e-13);
  CHECK(prop < 1e-13);
  CHECK(taylor < 1e-12);
  CHECK(group < 1e-13);
}

TEST_CASE("energy split") {
  const EnergySplit a = energy_split_example_i({0.3, 0.2, 0.0});
  CHECK(a.w_plus == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(a.w_minus == doctest::Approx(0.5).epsilon(1e-15));
  const EnergySplit b = energy_split(polarization_example_i(), {0, 0, 1});
  CHECK(b.w_plus == doctest::Approx(0.5 * (1 + 1 / std::sqrt(2.0))).epsilon(1e-14));
  CHECK(b.w_minus == doctest::Approx(0.5 * (1 - 1 / std::sqrt(2.0))).epsilon(1e-14));
  CHECK(b.w_plus == doctest::Approx(0.85355).epsilon(1e-5));

  std::mt19937_64 rng(2);
  for (int n = 0; n < 100; ++n) {
    const Momentum3 p = random_p(rng);
    const EnergySplit c = energy_split(polarization_example_i(), p);
    const EnergySplit d = energy_split_example_i(p);
    CHECK(c.w_plus + c.w_minus == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(c.w_plus - d.w_plus) < 1e-14);
  }
}

TEST_CASE("W+- curves") {
  for (const GaussianPacket g : {GaussianPacket{1, 5, 0, 0}, GaussianPacket{5, 5, 1, 0}}) {
    const PolarizedState s(g, polarization_example_i());
    const WCurve c = w_curve(s, default_pz_samples(g));
    CHECK(w_curve_total(c) == doctest::Approx(1.0).epsilon(1e-8));
  }
  const PolarizedState s0({1, 5, 0, 0}, polarization_example_i());
  const WCurve c0 = w_curve(s0, default_pz_samples(s0.packet()));
  double mirror = 0.0;
  const std::size_t n = c0.pz.size();
  for (std::size_t i = 0; i < n; ++i) mirror = std::max(mirror, std::abs(c0.w_plus[i] - c0.w_minus[n - 1 - i]));
  CHECK(mirror < 1e-10);
  // Positive-energy weight sits at small positive p_z, overlapping W_-.
  std::size_t peak = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (c0.w_plus[i] > c0.w_plus[peak]) peak = i;
  CHECK(c0.pz[peak] > 0.0);
  CHECK(c0.pz[peak] < 0.2);
  CHECK(c0.w_minus[peak] > 0.5 * c0.w_plus[peak]);
}

TEST_CASE("spectral engine: round trip and unitarity") {
  const PolarizedState s({1, 2, 0, 0}, polarization_example_i());
  const PositionGrid g = PositionGrid::centered(64, 0.4);
  const BispinorField f0 = initial_bispinor_field(s, g).field;
  const SpectralEvolver ev(f0);
  CHECK(relative_l2(ev.position_field(0.0), f0) < 1e-13);
  for (double t : {0.0, 3.0, 7.0, 12.0, 20.0}) {
    // Parseval: the norm in momentum space is the sampled norm at every time.
    CHECK(ev.moments(t).norm == doctest::Approx(f0.norm()).epsilon(1e-12));
  }
  CHECK(ev.position_field(5.0).norm() == doctest::Approx(f0.norm()).epsilon(1e-12));
  // Group property on the lattice: the restarted engine carries the time
  // stamp of its initial field.
  const SpectralEvolver ev2(ev.position_field(2.0));
  CHECK(relative_l2(ev2.position_field(5.0), ev.position_field(5.0)) < 1e-12);
}

TEST_CASE("spectral engine rejects unresolved fields") {
  const PolarizedState s({0.3, 0.3, 0, 0}, polarization_example_i());
  const BispinorField f = initial_bispinor_field(s, PositionGrid::centered(16, 0.5)).field;
  CHECK_THROWS_AS(SpectralEvolver{f}, NumericalError);
}

TEST_CASE("momentum bilinear matches moments") {
  const PolarizedState s({1, 2, 0.5, 0}, polarization_example_ii());
  const BispinorField f0 = initial_bispinor_field(s, PositionGrid::centered(48, 0.4)).field;
  const SpectralEvolver ev(f0);
  const auto m = ev.moments(2.5);
  CHECK(ev.momentum_bilinear(alpha_x(), 2.5).real() == doctest::Approx(m.alpha[0]).epsilon(1e-12));
  CHECK(ev.momentum_bilinear(sigma_y(), 2.5).real() == doctest::Approx(m.sigma[1]).epsilon(1e-12));
}

TEST_CASE("plane sampler reproduces lattice values") {
  const PolarizedState s({1, 2, 0, 0}, polarization_example_ii());
  const BispinorField f0 = initial_bispinor_field(s, PositionGrid::centered(32, 0.5)).field;
  const SpectralEvolver ev(f0);
  const BispinorField ft = ev.position_field(1.5);
  const auto sampler = ev.plane_sampler(1.5, 16);
  double worst = 0.0;
  for (std::size_t i = 3; i < 32; i += 7)
    for (std::size_t j = 1; j < 32; j += 5)
      worst = std::max(worst, max_diff(sampler(ft.grid.x(i), ft.grid.y(j)), ft.at(i, j, 16)));
  CHECK(worst < 1e-13);
}

TEST_CASE("cylindrical synthesis") {
  for (Example ex : {Example::i, Example::ii}) {
    const Bispinor phi = ex == Example::i ? polarization_example_i() : polarization_example_ii();
    const PolarizedState s({1, 2, 0.4, 0}, phi);
    const std::vector<double> rho{0.0, 0.5, 1.3, 2.9}, z{-1.5, 0.0, 0.7};
    const CylindricalField c = synthesize_cylindrical(s, rho, z, 2.2);
    CHECK(c.error_estimate < 1e-9);
    for (std::size_t r = 0; r < rho.size(); ++r)
      for (std::size_t k = 0; k < z.size(); ++k)
        for (double a : {0.0, 1.0, 2.5}) {
          const Bispinor v = c.at(r, k, a);
          if (ex == Example::i)
            CHECK(std::abs(v[1] - v[3]) == 0.0);
          else
            CHECK(std::abs(v[1] + v[2]) == 0.0);
        }
    // Example i density is independent of the azimuth.
    if (ex == Example::i) CHECK(c.density(2, 1, 0.0) == doctest::Approx(c.density(2, 1, 2.0)).epsilon(1e-14));
  }
  const PolarizedState bad({1, 2, 0, 0}, Bispinor{{1, 0, 0, 0}});
  CHECK_THROWS_AS(synthesize_cylindrical(bad, {1.0}, {0.0}, 1.0), InvalidInput);
}

TEST_CASE("cylindrical and Cartesian synthesis agree at spot points") {
  // Lattice points with x = rho cos(alpha), y = rho sin(alpha) taken exactly
  // from the lattice, so no interpolation enters.
  std::mt19937_64 rng(23);
  for (Example ex : {Example::i, Example::ii}) {
    const Bispinor phi = ex == Example::i ? polarization_example_i() : polarization_example_ii();
    const PolarizedState s({1, 2, 0.5, 0}, phi);
    const PositionGrid g = PositionGrid::centered(96, 0.3);
    const double t = 1.9;
    const BispinorField f = synthesize_cartesian(s, g, t);
    std::uniform_int_distribution<std::size_t> idx(30, 66);
    double worst = 0.0;
    for (int n = 0; n < 6; ++n) {
      const std::size_t i = idx(rng), j = idx(rng), k = idx(rng);
      const double x = g.x(i), y = g.y(j), zz = g.z(k);
      const double rho = std::hypot(x, y), a = std::atan2(y, x);
      const CylindricalField c = synthesize_cylindrical(s, {rho}, {zz}, t);
      worst = std::max(worst, max_diff(c.at(0, 0, a), f.at(i, j, k)));
    }
    CHECK(worst < 1e-5);
  }
}
