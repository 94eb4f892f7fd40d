#include <algorithm>
#include <limits>

#include "moscito/simd.hpp"
#include "table.hpp"

namespace moscito::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::size_t count_exposed_scalar(const double* px, const double* py, const double* pz,
                                 std::size_t np, const double* cx, const double* cy,
                                 const double* cz, const double* r2, std::size_t nc) {
  std::size_t exposed = 0;
  for (std::size_t i = 0; i < np; ++i) {
    bool buried = false;
    for (std::size_t j = 0; j < nc && !buried; ++j) {
      const double dx = px[i] - cx[j];
      const double dy = py[i] - cy[j];
      const double dz = pz[i] - cz[j];
      buried = dx * dx + dy * dy + dz * dz < r2[j];
    }
    if (!buried) ++exposed;
  }
  return exposed;
}

double min_squared_distance_scalar(const double* ax, const double* ay, const double* az,
                                   std::size_t na, const double* bx, const double* by,
                                   const double* bz, std::size_t nb) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      const double dx = ax[i] - bx[j];
      const double dy = ay[i] - by[j];
      const double dz = az[i] - bz[j];
      best = std::min(best, dx * dx + dy * dy + dz * dz);
    }
  }
  return best;
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{dot_scalar, axpy_scalar, squared_distance_scalar,
                                 count_exposed_scalar, min_squared_distance_scalar};
  return table;
}

}  // namespace moscito::simd::detail
