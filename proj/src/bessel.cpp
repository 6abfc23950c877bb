#include "dirac/bessel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dirac/error.hpp"

namespace dirac {

namespace {

constexpr double kSeriesLimit = 17.0;

double series(int n, double x) {
  const long double q = -0.25L * static_cast<long double>(x) * static_cast<long double>(x);
  long double term = (n == 0) ? 1.0L : 0.5L * static_cast<long double>(x);
  long double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * static_cast<long double>(k + n));
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum) && k > 2) break;
  }
  return static_cast<double>(sum);
}

double asymptotic(int n, double x) {
  const double mu = 4.0 * n * n;
  // a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! 8^k); terms a_k / x^k.
  double p = 0.0, q = 0.0;
  double a = 1.0;
  double last = 1e300;
  for (int k = 0; k < 80; ++k) {
    if (k > 0) {
      const double odd = 2.0 * k - 1.0;
      a *= (mu - odd * odd) / (8.0 * k * x);
    }
    const double mag = std::abs(a);
    if (mag > last) break;  // the expansion has started to diverge
    last = mag;
    const int sgn = ((k / 2) % 2 == 0) ? 1 : -1;
    if (k % 2 == 0)
      p += sgn * a;
    else
      q += sgn * a;
    if (mag < 1e-18) break;
  }
  const double chi = x - (0.5 * n + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j(int order, double x) {
  if (order != 0 && order != 1) throw InvalidInput("bessel_j supports orders 0 and 1, got " + std::to_string(order));
  if (x < 0.0) return order == 0 ? bessel_j(0, -x) : -bessel_j(1, -x);
  return x < kSeriesLimit ? series(order, x) : asymptotic(order, x);
}

}  // namespace dirac
