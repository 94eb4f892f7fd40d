// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include <algorithm>
#include <bit>
#include <limits>

#include "moscito/simd.hpp"
#include "table.hpp"

namespace moscito::simd::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmin(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_min_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_min_sd(m, _mm_unpackhi_pd(m, m)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::size_t count_exposed_avx2(const double* px, const double* py, const double* pz,
                               std::size_t np, const double* cx, const double* cy,
                               const double* cz, const double* r2, std::size_t nc) {
  std::size_t exposed = 0;
  std::size_t i = 0;
  for (; i + 4 <= np; i += 4) {
    const __m256d x = _mm256_loadu_pd(px + i);
    const __m256d y = _mm256_loadu_pd(py + i);
    const __m256d z = _mm256_loadu_pd(pz + i);
    __m256d buried = _mm256_setzero_pd();
    for (std::size_t j = 0; j < nc; ++j) {
      const __m256d dx = _mm256_sub_pd(x, _mm256_set1_pd(cx[j]));
      const __m256d dy = _mm256_sub_pd(y, _mm256_set1_pd(cy[j]));
      const __m256d dz = _mm256_sub_pd(z, _mm256_set1_pd(cz[j]));
      // Plain mul/add keeps d2 bitwise equal to the scalar reference.
      const __m256d d2 = _mm256_add_pd(
          _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), _mm256_mul_pd(dz, dz));
      buried = _mm256_or_pd(buried, _mm256_cmp_pd(d2, _mm256_set1_pd(r2[j]), _CMP_LT_OQ));
      if (_mm256_movemask_pd(buried) == 0xF) break;
    }
    exposed += 4 - static_cast<std::size_t>(std::popcount(
                       static_cast<unsigned>(_mm256_movemask_pd(buried))));
  }
  for (; i < np; ++i) {
    bool hit = false;
    for (std::size_t j = 0; j < nc && !hit; ++j) {
      const double dx = px[i] - cx[j];
      const double dy = py[i] - cy[j];
      const double dz = pz[i] - cz[j];
      hit = dx * dx + dy * dy + dz * dz < r2[j];
    }
    if (!hit) ++exposed;
  }
  return exposed;
}

double min_squared_distance_avx2(const double* ax, const double* ay, const double* az,
                                 std::size_t na, const double* bx, const double* by,
                                 const double* bz, std::size_t nb) {
  double best = std::numeric_limits<double>::infinity();
  __m256d vbest = _mm256_set1_pd(best);
  for (std::size_t i = 0; i < na; ++i) {
    const __m256d x = _mm256_set1_pd(ax[i]);
    const __m256d y = _mm256_set1_pd(ay[i]);
    const __m256d z = _mm256_set1_pd(az[i]);
    std::size_t j = 0;
    for (; j + 4 <= nb; j += 4) {
      const __m256d dx = _mm256_sub_pd(x, _mm256_loadu_pd(bx + j));
      const __m256d dy = _mm256_sub_pd(y, _mm256_loadu_pd(by + j));
      const __m256d dz = _mm256_sub_pd(z, _mm256_loadu_pd(bz + j));
      const __m256d d2 = _mm256_add_pd(
          _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), _mm256_mul_pd(dz, dz));
      vbest = _mm256_min_pd(vbest, d2);
    }
    for (; j < nb; ++j) {
      const double dx = ax[i] - bx[j];
      const double dy = ay[i] - by[j];
      const double dz = az[i] - bz[j];
      best = std::min(best, dx * dx + dy * dy + dz * dz);
    }
  }
  return std::min(best, hmin(vbest));
}

}  // namespace

const KernelTable& avx2_table() noexcept {
  static const KernelTable table{dot_avx2, axpy_avx2, squared_distance_avx2, count_exposed_avx2,
                                 min_squared_distance_avx2};
  return table;
}

}  // namespace moscito::simd::detail
