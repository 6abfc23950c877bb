#pragma once

// Free Dirac particle algebra in natural units.
//
// Every quantity in this library is expressed with hbar = m = c = 1:
//   length   : Compton wavelength  lambda_k = hbar / (m c)
//   time     : t0 = lambda_k / c
//   momentum : m c,   energy : m c^2,   velocity : c
// Converting to SI is a matter of multiplying by the corresponding unit;
// nothing inside the library carries dimensional constants.

#include <array>
#include <complex>
#include <cstddef>

namespace dirac {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

enum class Axis { x = 0, y = 1, z = 2 };

struct Momentum3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double operator[](Axis a) const {
    return a == Axis::x ? x : (a == Axis::y ? y : z);
  }
  double norm2() const { return x * x + y * y + z * z; }
};

using Vec3 = std::array<double, 3>;

/// Four complex amplitudes in the Dirac representation: (upper pair, lower pair).
struct Bispinor {
  std::array<cplx, 4> c{};

  cplx& operator[](std::size_t i) { return c[i]; }
  const cplx& operator[](std::size_t i) const { return c[i]; }

  double norm2() const {
    return std::norm(c[0]) + std::norm(c[1]) + std::norm(c[2]) + std::norm(c[3]);
  }

  Bispinor& operator+=(const Bispinor& o) {
    for (std::size_t i = 0; i < 4; ++i) c[i] += o.c[i];
    return *this;
  }
  Bispinor& operator-=(const Bispinor& o) {
    for (std::size_t i = 0; i < 4; ++i) c[i] -= o.c[i];
    return *this;
  }
  Bispinor& operator*=(cplx s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  friend Bispinor operator+(Bispinor a, const Bispinor& b) { return a += b; }
  friend Bispinor operator-(Bispinor a, const Bispinor& b) { return a -= b; }
  friend Bispinor operator*(cplx s, Bispinor a) { return a *= s; }
};

/// Hermitian inner product <a|b>.
cplx inner(const Bispinor& a, const Bispinor& b);

/// Returns phi / |phi|. Throws InvalidInput for a zero (or non-finite) norm.
Bispinor normalized(const Bispinor& phi);

struct DiracMatrix {
  std::array<std::array<cplx, 4>, 4> m{};

  static DiracMatrix identity();
  DiracMatrix operator*(const DiracMatrix& o) const;
  DiracMatrix operator+(const DiracMatrix& o) const;
  DiracMatrix operator-(const DiracMatrix& o) const;
  DiracMatrix adjoint() const;
  /// Max-abs entry.
  double max_abs() const;
};

// Named constants of the Dirac representation.
const DiracMatrix& alpha_x();
const DiracMatrix& alpha_y();
const DiracMatrix& alpha_z();
const DiracMatrix& alpha(Axis a);
const DiracMatrix& beta();
const DiracMatrix& sigma_x();  // block-diagonal Pauli
const DiracMatrix& sigma_y();
const DiracMatrix& sigma_z();
const DiracMatrix& sigma(Axis a);

Bispinor apply_matrix(const DiracMatrix& M, const Bispinor& s);

/// Free Hamiltonian H(p) = alpha.p + beta.
DiracMatrix hamiltonian(const Momentum3& p);

/// lambda_p = sqrt(p^2 + 1).
double energy(const Momentum3& p);

/// Free-particle eigen-spinor U_r(p). Branches 1,2 carry energy +lambda_p,
/// branches 3,4 carry -lambda_p.
struct FreeSpinor {
  int r = 1;
  Momentum3 p;
  Bispinor u;
  double gamma_p = 0.0;  // 1 / (lambda_p + 1)
  double n_p = 0.0;      // sqrt((lambda_p + 1) / (2 lambda_p))

  double energy_sign() const { return r <= 2 ? 1.0 : -1.0; }
};

FreeSpinor free_spinor(int r, const Momentum3& p);

/// Expansion coefficients C_r of the normalized polarization phi in the
/// eigenbasis U_r(p), envelope excluded: phi/|phi| = sum_r C_r U_r(p).
std::array<cplx, 4> project_coefficients(const Bispinor& phi, const Momentum3& p);

/// U_i^dagger alpha_mu U_j evaluated by explicit matrix algebra. Within an
/// energy branch this is +-p_mu/lambda_p delta_ij; across branches it is the
/// interband element responsible for the trembling motion.
cplx velocity_matrix_element(int i, int j, Axis mu, const Momentum3& p);

}  // namespace dirac
