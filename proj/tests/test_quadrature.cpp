#include <doctest.h>

#include <cmath>

#include "dirac/error.hpp"
#include "dirac/packet.hpp"
#include "dirac/quadrature.hpp"

using namespace dirac;

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (std::size_t n : {2u, 5u, 16u, 32u}) {
    const GaussLegendre& g = gauss_legendre(n);
    for (std::size_t deg = 0; deg < 2 * n; ++deg) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += g.w[i] * std::pow(g.x[i], static_cast<double>(deg));
      const double exact = deg % 2 ? 0.0 : 2.0 / static_cast<double>(deg + 1);
      CHECK(std::abs(s - exact) < 1e-14);
    }
  }
}

TEST_CASE("panel rules") {
  const PanelRule r = PanelRule::uniform(0.0, M_PI, 8);
  CHECK(r.integrate([](double x) { return std::sin(x); }) == doctest::Approx(2.0).epsilon(1e-15));
  const PanelRule b = PanelRule::from_breaks({0.0, 0.5, 2.0, 3.0});
  CHECK(b.integrate([](double x) { return std::exp(x); }) == doctest::Approx(std::exp(3.0) - 1.0).epsilon(1e-15));
}

TEST_CASE("adaptive integration") {
  const QuadResult q = integrate_adaptive([](double x) { return std::exp(-x * x); }, -10.0, 10.0);
  CHECK(q.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
  const QuadResult osc = integrate_adaptive([](double x) { return std::cos(50.0 * x); }, 0.0, 1.0);
  CHECK(osc.value == doctest::Approx(std::sin(50.0) / 50.0).epsilon(1e-12));
  CHECK_THROWS_AS(integrate_adaptive([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); }, 0.0, 1.0, 1e-15,
                                     1e-15, 6),
                  NumericalError);
}

TEST_CASE("momentum rule normalization and second moments") {
  for (const GaussianPacket g : {GaussianPacket{1, 5, 0, 0}, GaussianPacket{5, 5, 0, 0}, GaussianPacket{2.5, 5, 1, 0}}) {
    const MomentumQuadrature q = MomentumQuadrature::for_packet(g, 30.0);
    INFO("d = " << g.d);
    CHECK(std::abs(q.integrate([](const Momentum3&, double) { return 1.0; }) - 1.0) < 1e-12);
    // <p_x^2> = 1/(2 d^2), <p_z> = k0, <(p_z - k0)^2> = 1/(2 Delta^2).
    CHECK(q.integrate([](const Momentum3& p, double) { return p.x * p.x; }) ==
          doctest::Approx(0.5 / (g.d * g.d)).epsilon(1e-11));
    CHECK(q.integrate([](const Momentum3& p, double) { return p.z; }) == doctest::Approx(g.k0).epsilon(1e-11));
    CHECK(q.integrate([&](const Momentum3& p, double) { return (p.z - g.k0) * (p.z - g.k0); }) ==
          doctest::Approx(0.5 / (g.delta * g.delta)).epsilon(1e-11));
    CHECK(std::abs(q.integrate([](const Momentum3& p, double) { return p.x * p.y; })) < 1e-15);
  }
}

TEST_CASE("cutoff keeps |f|^2 above 1e-14 of peak") {
  const double w = 3.0;
  const double c = gaussian_cutoff(w);
  CHECK(std::exp(-c * c * w * w) == doctest::Approx(1e-14).epsilon(1e-10));
}
