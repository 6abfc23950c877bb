#pragma once

namespace dirac {

/// Bessel function of the first kind, order 0 or 1. Power series in extended
/// precision below x = 17, Hankel asymptotic expansion above; absolute error
/// below 1e-12 on [0, 500]. Negative x is accepted via parity.
double bessel_j(int order, double x);

}  // namespace dirac
