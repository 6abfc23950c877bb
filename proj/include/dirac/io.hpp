#pragma once

#include <map>
#include <string>
#include <vector>

#include "dirac/grid.hpp"
#include "dirac/observables.hpp"
#include "dirac/spectral.hpp"

namespace dirac {

// ---------------------------------------------------------------------------
// Field dumps.
//
// Little-endian binary, 104-byte header:
//   char[8]  magic "DIRACFLD"
//   u32      version (1)
//   u32      header size in bytes (104)
//   u64[3]   nx, ny, nz
//   f64[3]   dx, dy, dz
//   f64[3]   origin
//   f64      time
//   u32      reals per node (8: re/im of the four components)
//   u32      reserved (0)
// followed by nx*ny*nz*8 f64 values, node-major with z fastest.

constexpr std::uint32_t kFieldDumpVersion = 1;
constexpr std::size_t kFieldDumpHeaderSize = 104;

void write_field_dump(const BispinorField& field, const std::string& path);
/// Throws InvalidInput on a bad magic, version, component count or length.
BispinorField read_field_dump(const std::string& path);

// ---------------------------------------------------------------------------
// Slices.

struct PlaneSpec {
  Axis axis = Axis::z;
  double value = 0.0;

  /// "z=0", "y = -2.5", ...
  static PlaneSpec parse(const std::string& text);
  std::string label() const;  // "z=0"
};

/// A 2D matrix of values on a lattice plane. For a z plane rows run over x
/// and columns over y; for y, rows x and columns z; for x, rows y and
/// columns z.
struct SliceMatrix {
  std::string quantity;
  PlaneSpec plane;
  std::size_t plane_index = 0;
  double time = 0.0;
  std::size_t rows = 0, cols = 0;
  double row_origin = 0.0, row_step = 1.0;
  double col_origin = 0.0, col_step = 1.0;
  std::vector<double> values;  // row-major
  /// Extra header lines ("d 1", "k0 0", ...), kept in order of the key.
  std::map<std::string, std::string> params;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Extracts the lattice plane nearest to spec. Throws InvalidInput when the
/// plane lies outside the lattice.
SliceMatrix extract_slice(const ScalarField& field, const PlaneSpec& spec, const std::string& quantity);

/// Whitespace-separated rows with a '#' header; every number is written with
/// 17 significant digits so import_slice reproduces the values bit for bit.
std::string export_slice(const SliceMatrix& slice);
SliceMatrix import_slice(const std::string& text);

/// Cylindrical (rho, z) density at azimuth alpha as a slice (rows rho,
/// columns z). rho and z must be evenly spaced.
SliceMatrix cylindrical_slice(const CylindricalField& field, double alpha = 0.0);

// ---------------------------------------------------------------------------
// Series and curves.

/// Columns: time, Vx, Vy, Vz, Sx, Sy, Sz, norm. velocity and spin share one
/// time grid; norms may be empty (written as 1).
std::string series_csv(const ObservableSeries& velocity, const ObservableSeries& spin,
                       const std::vector<double>& norms = {});
/// Columns: pz, w_plus, w_minus.
std::string wcurve_csv(const WCurve& curve);

/// %.17g.
std::string format_real(double v);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace dirac
