#include "dirac/spinor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dirac/error.hpp"

namespace dirac {

namespace {

DiracMatrix make(std::initializer_list<std::initializer_list<cplx>> rows) {
  DiracMatrix M;
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (const auto& v : row) M.m[i][j++] = v;
    ++i;
  }
  return M;
}

const cplx O{0.0, 0.0};
const cplx L{1.0, 0.0};
const cplx iI{0.0, 1.0};

void check_branch(int r) {
  if (r < 1 || r > 4) throw InvalidInput("spinor branch index must be 1..4, got " + std::to_string(r));
}

}  // namespace

cplx inner(const Bispinor& a, const Bispinor& b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

Bispinor normalized(const Bispinor& phi) {
  const double n2 = phi.norm2();
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw InvalidInput("polarization has zero norm");
  Bispinor out = phi;
  out *= 1.0 / std::sqrt(n2);
  return out;
}

DiracMatrix DiracMatrix::identity() {
  DiracMatrix M;
  for (std::size_t i = 0; i < 4; ++i) M.m[i][i] = 1.0;
  return M;
}

DiracMatrix DiracMatrix::operator*(const DiracMatrix& o) const {
  DiracMatrix R;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < 4; ++k) s += m[i][k] * o.m[k][j];
      R.m[i][j] = s;
    }
  return R;
}

DiracMatrix DiracMatrix::operator+(const DiracMatrix& o) const {
  DiracMatrix R;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) R.m[i][j] = m[i][j] + o.m[i][j];
  return R;
}

DiracMatrix DiracMatrix::operator-(const DiracMatrix& o) const {
  DiracMatrix R;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) R.m[i][j] = m[i][j] - o.m[i][j];
  return R;
}

DiracMatrix DiracMatrix::adjoint() const {
  DiracMatrix R;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) R.m[i][j] = std::conj(m[j][i]);
  return R;
}

double DiracMatrix::max_abs() const {
  double a = 0.0;
  for (const auto& row : m)
    for (const auto& v : row) a = std::max(a, std::abs(v));
  return a;
}

const DiracMatrix& alpha_x() {
  static const DiracMatrix M = make({{O, O, O, L}, {O, O, L, O}, {O, L, O, O}, {L, O, O, O}});
  return M;
}

const DiracMatrix& alpha_y() {
  static const DiracMatrix M = make({{O, O, O, -iI}, {O, O, iI, O}, {O, -iI, O, O}, {iI, O, O, O}});
  return M;
}

const DiracMatrix& alpha_z() {
  static const DiracMatrix M = make({{O, O, L, O}, {O, O, O, -L}, {L, O, O, O}, {O, -L, O, O}});
  return M;
}

const DiracMatrix& alpha(Axis a) {
  switch (a) {
    case Axis::x: return alpha_x();
    case Axis::y: return alpha_y();
    case Axis::z: break;
  }
  return alpha_z();
}

const DiracMatrix& beta() {
  static const DiracMatrix M = make({{L, O, O, O}, {O, L, O, O}, {O, O, -L, O}, {O, O, O, -L}});
  return M;
}

const DiracMatrix& sigma_x() {
  static const DiracMatrix M = make({{O, L, O, O}, {L, O, O, O}, {O, O, O, L}, {O, O, L, O}});
  return M;
}

const DiracMatrix& sigma_y() {
  static const DiracMatrix M = make({{O, -iI, O, O}, {iI, O, O, O}, {O, O, O, -iI}, {O, O, iI, O}});
  return M;
}

const DiracMatrix& sigma_z() {
  static const DiracMatrix M = make({{L, O, O, O}, {O, -L, O, O}, {O, O, L, O}, {O, O, O, -L}});
  return M;
}

const DiracMatrix& sigma(Axis a) {
  switch (a) {
    case Axis::x: return sigma_x();
    case Axis::y: return sigma_y();
    case Axis::z: break;
  }
  return sigma_z();
}

Bispinor apply_matrix(const DiracMatrix& M, const Bispinor& s) {
  Bispinor out;
  for (std::size_t i = 0; i < 4; ++i) {
    cplx v = 0.0;
    for (std::size_t j = 0; j < 4; ++j) v += M.m[i][j] * s[j];
    out[i] = v;
  }
  return out;
}

DiracMatrix hamiltonian(const Momentum3& p) {
  const cplx pm{p.x, -p.y};
  const cplx pp{p.x, p.y};
  return make({{L, O, p.z, pm}, {O, L, pp, -p.z}, {p.z, pm, -L, O}, {pp, -p.z, O, -L}});
}

double energy(const Momentum3& p) { return std::sqrt(p.norm2() + 1.0); }

FreeSpinor free_spinor(int r, const Momentum3& p) {
  check_branch(r);
  FreeSpinor s;
  s.r = r;
  s.p = p;
  const double lam = energy(p);
  s.gamma_p = 1.0 / (lam + 1.0);
  s.n_p = std::sqrt((lam + 1.0) / (2.0 * lam));
  const double g = s.gamma_p;
  const cplx pp{p.x, p.y};
  const cplx pm{p.x, -p.y};
  switch (r) {
    case 1: s.u.c = {1.0, 0.0, p.z * g, pp * g}; break;
    case 2: s.u.c = {0.0, 1.0, pm * g, -p.z * g}; break;
    case 3: s.u.c = {-p.z * g, -pp * g, 1.0, 0.0}; break;
    default: s.u.c = {-pm * g, p.z * g, 0.0, 1.0}; break;
  }
  s.u *= s.n_p;
  return s;
}

std::array<cplx, 4> project_coefficients(const Bispinor& phi, const Momentum3& p) {
  const Bispinor a = normalized(phi);
  const double lam = energy(p);
  const double g = 1.0 / (lam + 1.0);
  const double n = std::sqrt((lam + 1.0) / (2.0 * lam));
  const cplx pp{p.x, p.y};
  const cplx pm{p.x, -p.y};
  return {n * (a[0] + g * pm * a[3] + g * p.z * a[2]),
          n * (a[1] + g * pp * a[2] - g * p.z * a[3]),
          n * (-g * p.z * a[0] - g * pm * a[1] + a[2]),
          n * (-g * pp * a[0] + g * p.z * a[1] + a[3])};
}

cplx velocity_matrix_element(int i, int j, Axis mu, const Momentum3& p) {
  check_branch(i);
  check_branch(j);
  const Bispinor ui = free_spinor(i, p).u;
  const Bispinor uj = free_spinor(j, p).u;
  return inner(ui, apply_matrix(alpha(mu), uj));
}

}  // namespace dirac
