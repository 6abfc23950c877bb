#include "dirac/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dirac/error.hpp"

namespace dirac {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <class T>
void put(std::string& buf, T v) {
  v = to_little(v);
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  buf.append(b, sizeof(T));
}

template <class T>
T get(const char*& p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  p += sizeof(T);
  return to_little(v);
}

const char kMagic[8] = {'D', 'I', 'R', 'A', 'C', 'F', 'L', 'D'};

char axis_char(Axis a) { return a == Axis::x ? 'x' : (a == Axis::y ? 'y' : 'z'); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double read_real(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || trim(end).size() != 0) throw InvalidInput("cannot read number '" + s + "'");
  return v;
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  out << text;
  if (!out) throw InvalidInput("write to " + path + " failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------

void write_field_dump(const BispinorField& field, const std::string& path) {
  const PositionGrid& g = field.grid;
  std::string buf;
  buf.reserve(kFieldDumpHeaderSize);
  buf.append(kMagic, 8);
  put<std::uint32_t>(buf, kFieldDumpVersion);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(kFieldDumpHeaderSize));
  put<std::uint64_t>(buf, g.nx);
  put<std::uint64_t>(buf, g.ny);
  put<std::uint64_t>(buf, g.nz);
  put(buf, g.dx);
  put(buf, g.dy);
  put(buf, g.dz);
  for (double o : g.origin) put(buf, o);
  put(buf, field.time);
  put<std::uint32_t>(buf, 8);
  put<std::uint32_t>(buf, 0);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  std::vector<double> chunk;
  constexpr std::size_t kNodes = 4096;
  chunk.reserve(8 * kNodes);
  for (std::size_t n = 0; n < field.data.size(); n += kNodes) {
    chunk.clear();
    const std::size_t e = std::min(field.data.size(), n + kNodes);
    for (std::size_t m = n; m < e; ++m)
      for (std::size_t c = 0; c < 4; ++c) {
        chunk.push_back(to_little(field.data[m][c].real()));
        chunk.push_back(to_little(field.data[m][c].imag()));
      }
    out.write(reinterpret_cast<const char*>(chunk.data()), static_cast<std::streamsize>(chunk.size() * 8));
  }
  if (!out) throw InvalidInput("write to " + path + " failed");
}

BispinorField read_field_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  char head[kFieldDumpHeaderSize];
  in.read(head, kFieldDumpHeaderSize);
  if (in.gcount() != static_cast<std::streamsize>(kFieldDumpHeaderSize))
    throw InvalidInput(path + ": truncated header");
  if (std::memcmp(head, kMagic, 8) != 0) throw InvalidInput(path + ": not a field dump (bad magic)");
  const char* p = head + 8;
  const auto version = get<std::uint32_t>(p);
  if (version != kFieldDumpVersion) throw InvalidInput(path + ": unsupported version " + std::to_string(version));
  const auto hsize = get<std::uint32_t>(p);
  if (hsize != kFieldDumpHeaderSize) throw InvalidInput(path + ": unexpected header size");
  PositionGrid g;
  g.nx = get<std::uint64_t>(p);
  g.ny = get<std::uint64_t>(p);
  g.nz = get<std::uint64_t>(p);
  g.dx = get<double>(p);
  g.dy = get<double>(p);
  g.dz = get<double>(p);
  for (double& o : g.origin) o = get<double>(p);
  const double time = get<double>(p);
  const auto comps = get<std::uint32_t>(p);
  if (comps != 8) throw InvalidInput(path + ": expected 8 reals per node, got " + std::to_string(comps));
  g.validate();

  BispinorField f(g, time);
  std::vector<double> raw(f.data.size() * 8);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 8));
  if (in.gcount() != static_cast<std::streamsize>(raw.size() * 8)) throw InvalidInput(path + ": truncated payload");
  in.peek();
  if (!in.eof()) throw InvalidInput(path + ": trailing bytes after payload");
  for (std::size_t n = 0; n < f.data.size(); ++n)
    for (std::size_t c = 0; c < 4; ++c)
      f.data[n][c] = cplx{to_little(raw[8 * n + 2 * c]), to_little(raw[8 * n + 2 * c + 1])};
  return f;
}

// ---------------------------------------------------------------------------

PlaneSpec PlaneSpec::parse(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw InvalidInput("plane '" + text + "' must look like z=0");
  const std::string ax = trim(text.substr(0, eq));
  PlaneSpec s;
  if (ax == "x")
    s.axis = Axis::x;
  else if (ax == "y")
    s.axis = Axis::y;
  else if (ax == "z")
    s.axis = Axis::z;
  else
    throw InvalidInput("plane '" + text + "': axis must be x, y or z");
  s.value = read_real(trim(text.substr(eq + 1)));
  return s;
}

std::string PlaneSpec::label() const {
  std::ostringstream o;
  o << axis_char(axis) << '=' << value;
  return o.str();
}

SliceMatrix extract_slice(const ScalarField& field, const PlaneSpec& spec, const std::string& quantity) {
  const PositionGrid& g = field.grid;
  const std::size_t idx = g.nearest(spec.axis, spec.value);
  SliceMatrix s;
  s.quantity = quantity;
  s.plane = spec;
  s.plane_index = idx;
  s.time = field.time;
  Axis ra, ca;
  if (spec.axis == Axis::z) {
    ra = Axis::x;
    ca = Axis::y;
  } else if (spec.axis == Axis::y) {
    ra = Axis::x;
    ca = Axis::z;
  } else {
    ra = Axis::y;
    ca = Axis::z;
  }
  auto origin = [&](Axis a) { return g.origin[static_cast<std::size_t>(a)]; };
  s.rows = g.extent(ra);
  s.cols = g.extent(ca);
  s.row_origin = origin(ra);
  s.row_step = g.spacing(ra);
  s.col_origin = origin(ca);
  s.col_step = g.spacing(ca);
  s.values.resize(s.rows * s.cols);
  for (std::size_t r = 0; r < s.rows; ++r)
    for (std::size_t c = 0; c < s.cols; ++c) {
      std::size_t i, j, k;
      if (spec.axis == Axis::z) {
        i = r, j = c, k = idx;
      } else if (spec.axis == Axis::y) {
        i = r, j = idx, k = c;
      } else {
        i = idx, j = r, k = c;
      }
      s.values[r * s.cols + c] = field.at(i, j, k);
    }
  return s;
}

std::string export_slice(const SliceMatrix& s) {
  const char ax = axis_char(s.plane.axis);
  const char ra = s.plane.axis == Axis::z ? 'x' : (s.plane.axis == Axis::y ? 'x' : 'y');
  const char ca = s.plane.axis == Axis::z ? 'y' : 'z';
  std::string out;
  out += "# diracsim slice 1\n";
  out += "# quantity " + s.quantity + "\n";
  out += std::string("# plane ") + ax + " " + format_real(s.plane.value) + " " + std::to_string(s.plane_index) + "\n";
  out += "# time " + format_real(s.time) + "\n";
  out += std::string("# rows ") + ra + " " + std::to_string(s.rows) + " " + format_real(s.row_origin) + " " +
         format_real(s.row_step) + "\n";
  out += std::string("# cols ") + ca + " " + std::to_string(s.cols) + " " + format_real(s.col_origin) + " " +
         format_real(s.col_step) + "\n";
  for (const auto& [k, v] : s.params) out += "# param " + k + " " + v + "\n";
  for (std::size_t r = 0; r < s.rows; ++r) {
    for (std::size_t c = 0; c < s.cols; ++c) {
      if (c) out += ' ';
      out += format_real(s.values[r * s.cols + c]);
    }
    out += '\n';
  }
  return out;
}

SliceMatrix import_slice(const std::string& text) {
  SliceMatrix s;
  std::istringstream in(text);
  std::string line;
  bool have_rows = false, have_cols = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream h(line.substr(1));
      std::string key;
      h >> key;
      if (key == "quantity") {
        h >> s.quantity;
      } else if (key == "plane") {
        std::string ax, v;
        h >> ax >> v >> s.plane_index;
        s.plane = PlaneSpec::parse(ax + "=" + v);
      } else if (key == "time") {
        std::string v;
        h >> v;
        s.time = read_real(v);
      } else if (key == "rows" || key == "cols") {
        std::string ax, o, st;
        std::size_t n = 0;
        h >> ax >> n >> o >> st;
        if (key == "rows") {
          s.rows = n, s.row_origin = read_real(o), s.row_step = read_real(st), have_rows = true;
        } else {
          s.cols = n, s.col_origin = read_real(o), s.col_step = read_real(st), have_cols = true;
        }
      } else if (key == "param") {
        std::string k, rest;
        h >> k;
        std::getline(h, rest);
        s.params[k] = trim(rest);
      }
      continue;
    }
    std::istringstream row(line);
    std::string tok;
    std::size_t count = 0;
    while (row >> tok) {
      s.values.push_back(read_real(tok));
      ++count;
    }
    if (have_cols && count != s.cols) throw InvalidInput("slice row has " + std::to_string(count) + " values, expected " + std::to_string(s.cols));
  }
  if (!have_rows || !have_cols) throw InvalidInput("slice header lacks rows/cols lines");
  if (s.values.size() != s.rows * s.cols) throw InvalidInput("slice has the wrong number of rows");
  return s;
}

SliceMatrix cylindrical_slice(const CylindricalField& field, double alpha) {
  if (field.rho.size() < 2 || field.z.size() < 2) throw InvalidInput("cylindrical slice needs at least 2x2 samples");
  SliceMatrix s;
  s.quantity = "density";
  s.plane.axis = Axis::y;  // the half-plane at azimuth alpha
  s.plane.value = 0.0;
  s.time = field.time;
  s.rows = field.rho.size();
  s.cols = field.z.size();
  s.row_origin = field.rho.front();
  s.row_step = field.rho[1] - field.rho[0];
  s.col_origin = field.z.front();
  s.col_step = field.z[1] - field.z[0];
  s.params["coordinates"] = "rows rho, cols z";
  s.params["alpha"] = format_real(alpha);
  s.values.resize(s.rows * s.cols);
  for (std::size_t r = 0; r < s.rows; ++r)
    for (std::size_t k = 0; k < s.cols; ++k) s.values[r * s.cols + k] = field.density(r, k, alpha);
  return s;
}

// ---------------------------------------------------------------------------

std::string series_csv(const ObservableSeries& v, const ObservableSeries& s, const std::vector<double>& norms) {
  if (v.times.size() != s.times.size()) throw InvalidInput("velocity and spin series differ in length");
  if (!norms.empty() && norms.size() != v.times.size()) throw InvalidInput("norm series has the wrong length");
  std::string out = "time,Vx,Vy,Vz,Sx,Sy,Sz,norm\n";
  for (std::size_t n = 0; n < v.times.size(); ++n) {
    if (v.times[n] != s.times[n]) throw InvalidInput("velocity and spin series use different times");
    out += format_real(v.times[n]);
    for (double c : v.values[n]) out += "," + format_real(c);
    for (double c : s.values[n]) out += "," + format_real(c);
    out += "," + format_real(norms.empty() ? 1.0 : norms[n]) + "\n";
  }
  return out;
}

std::string wcurve_csv(const WCurve& c) {
  std::string out = "pz,w_plus,w_minus\n";
  for (std::size_t n = 0; n < c.pz.size(); ++n)
    out += format_real(c.pz[n]) + "," + format_real(c.w_plus[n]) + "," + format_real(c.w_minus[n]) + "\n";
  return out;
}

}  // namespace dirac
