#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "dirac/spinor.hpp"

namespace dirac {

/// Regular 3D lattice. Node (i, j, k) sits at origin + (i dx, j dy, k dz);
/// storage is node-major with z fastest: index = (i * ny + j) * nz + k.
struct PositionGrid {
  std::size_t nx = 0, ny = 0, nz = 0;
  double dx = 1.0, dy = 1.0, dz = 1.0;
  std::array<double, 3> origin{};

  /// n^3 nodes with spacing h, centered so that node n/2 sits at 0 along
  /// each axis (the layout used by the FFT engine).
  static PositionGrid centered(std::size_t n, double h);
  static PositionGrid centered(std::size_t nx, std::size_t ny, std::size_t nz, double h);

  std::size_t size() const { return nx * ny * nz; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * ny + j) * nz + k;
  }
  double x(std::size_t i) const { return origin[0] + static_cast<double>(i) * dx; }
  double y(std::size_t j) const { return origin[1] + static_cast<double>(j) * dy; }
  double z(std::size_t k) const { return origin[2] + static_cast<double>(k) * dz; }
  double cell_volume() const { return dx * dy * dz; }
  std::size_t extent(Axis a) const { return a == Axis::x ? nx : (a == Axis::y ? ny : nz); }
  double spacing(Axis a) const { return a == Axis::x ? dx : (a == Axis::y ? dy : dz); }
  bool uniform(double rel_tol = 1e-12) const;
  /// Node index closest to coordinate v along a; throws InvalidInput when v
  /// lies outside the lattice.
  std::size_t nearest(Axis a, double v) const;
  /// Index of the mirror node (v -> -v) along a, wrapping periodically.
  std::size_t mirror(Axis a, std::size_t i) const;
  void validate() const;
};

struct BispinorField {
  PositionGrid grid;
  double time = 0.0;
  std::vector<Bispinor> data;

  BispinorField() = default;
  explicit BispinorField(const PositionGrid& g, double t = 0.0) : grid(g), time(t), data(g.size()) {}

  Bispinor& at(std::size_t i, std::size_t j, std::size_t k) { return data[grid.index(i, j, k)]; }
  const Bispinor& at(std::size_t i, std::size_t j, std::size_t k) const {
    return data[grid.index(i, j, k)];
  }
  /// sum |Psi|^2 times the cell volume.
  double norm() const;
};

struct ScalarField {
  PositionGrid grid;
  double time = 0.0;
  std::vector<double> data;

  ScalarField() = default;
  explicit ScalarField(const PositionGrid& g, double t = 0.0) : grid(g), time(t), data(g.size(), 0.0) {}
  double at(std::size_t i, std::size_t j, std::size_t k) const { return data[grid.index(i, j, k)]; }
  double max() const;
  double integral() const;
};

/// Relative L2 distance |a - b| / |b| over matching lattices.
double relative_l2(const ScalarField& a, const ScalarField& b);
double relative_l2(const BispinorField& a, const BispinorField& b);

/// Splits [0, n) into a fixed number of contiguous slabs (independent of the
/// worker count) and runs body(begin, end, slab) over them. Reductions that
/// accumulate per slab and combine in slab order are therefore bit-identical
/// for any worker count.
void for_each_slab(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& body,
                   std::size_t slabs = 16);

/// Worker threads used by for_each_slab; 0 selects hardware concurrency.
void set_worker_count(std::size_t workers);
std::size_t worker_count();

/// Deterministic slab-ordered sum of f(i) for i in [0, n).
double slab_sum(std::size_t n, const std::function<double(std::size_t, std::size_t)>& partial,
                std::size_t slabs = 16);

}  // namespace dirac
