#include "dirac/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "dirac/error.hpp"

namespace dirac {

namespace {
std::atomic<std::size_t> g_workers{0};
}

PositionGrid PositionGrid::centered(std::size_t n, double h) { return centered(n, n, n, h); }

PositionGrid PositionGrid::centered(std::size_t nx, std::size_t ny, std::size_t nz, double h) {
  PositionGrid g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.dx = g.dy = g.dz = h;
  g.origin = {-static_cast<double>(nx / 2) * h, -static_cast<double>(ny / 2) * h,
              -static_cast<double>(nz / 2) * h};
  return g;
}

bool PositionGrid::uniform(double rel_tol) const {
  return std::abs(dx - dy) <= rel_tol * dx && std::abs(dx - dz) <= rel_tol * dx;
}

std::size_t PositionGrid::nearest(Axis a, double v) const {
  const auto ax = static_cast<std::size_t>(a);
  const double f = (v - origin[ax]) / spacing(a);
  const double r = std::round(f);
  if (r < 0.0 || r > static_cast<double>(extent(a) - 1) || std::abs(f - r) > 0.5 + 1e-9)
    throw InvalidInput("coordinate " + std::to_string(v) + " outside the grid");
  return static_cast<std::size_t>(r);
}

std::size_t PositionGrid::mirror(Axis a, std::size_t i) const {
  const auto ax = static_cast<std::size_t>(a);
  const auto n = static_cast<long long>(extent(a));
  const auto shift = static_cast<long long>(std::llround(-2.0 * origin[ax] / spacing(a)));
  long long m = (shift - static_cast<long long>(i)) % n;
  if (m < 0) m += n;
  return static_cast<std::size_t>(m);
}

void PositionGrid::validate() const {
  if (nx == 0 || ny == 0 || nz == 0) throw InvalidInput("grid has zero nodes along an axis");
  if (!(dx > 0.0 && dy > 0.0 && dz > 0.0)) throw InvalidInput("grid spacing must be positive");
}

double BispinorField::norm() const {
  const double s = slab_sum(data.size(), [this](std::size_t b, std::size_t e) {
    double acc = 0.0;
    for (std::size_t i = b; i < e; ++i) acc += data[i].norm2();
    return acc;
  });
  return s * grid.cell_volume();
}

double ScalarField::max() const {
  return data.empty() ? 0.0 : *std::max_element(data.begin(), data.end());
}

double ScalarField::integral() const {
  const double s = slab_sum(data.size(), [this](std::size_t b, std::size_t e) {
    double acc = 0.0;
    for (std::size_t i = b; i < e; ++i) acc += data[i];
    return acc;
  });
  return s * grid.cell_volume();
}

double relative_l2(const ScalarField& a, const ScalarField& b) {
  if (a.data.size() != b.data.size()) throw InvalidInput("relative_l2: lattice mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    num += d * d;
    den += b.data[i] * b.data[i];
  }
  return std::sqrt(num / den);
}

double relative_l2(const BispinorField& a, const BispinorField& b) {
  if (a.data.size() != b.data.size()) throw InvalidInput("relative_l2: lattice mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    num += (a.data[i] - b.data[i]).norm2();
    den += b.data[i].norm2();
  }
  return std::sqrt(num / den);
}

void set_worker_count(std::size_t workers) { g_workers = workers; }

std::size_t worker_count() {
  const std::size_t w = g_workers.load();
  if (w != 0) return w;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void for_each_slab(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& body,
                   std::size_t slabs) {
  if (n == 0) return;
  slabs = std::max<std::size_t>(1, std::min(slabs, n));
  auto bounds = [n, slabs](std::size_t s) { return n * s / slabs; };
  const std::size_t workers = std::min(worker_count(), slabs);
  if (workers <= 1) {
    for (std::size_t s = 0; s < slabs; ++s) body(bounds(s), bounds(s + 1), s);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t s = next++; s < slabs; s = next++) body(bounds(s), bounds(s + 1), s);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = slabs;
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double slab_sum(std::size_t n, const std::function<double(std::size_t, std::size_t)>& partial,
                std::size_t slabs) {
  std::vector<double> parts(std::max<std::size_t>(1, slabs), 0.0);
  for_each_slab(n, [&](std::size_t b, std::size_t e, std::size_t s) { parts[s] = partial(b, e); }, slabs);
  double total = 0.0;
  for (double p : parts) total += p;
  return total;
}

}  // namespace dirac
