#pragma once

#include <cstddef>

namespace moscito::simd {

namespace detail {

struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*squared_distance)(const double*, const double*, std::size_t);
  std::size_t (*count_exposed)(const double*, const double*, const double*, std::size_t,
                               const double*, const double*, const double*, const double*,
                               std::size_t);
  double (*min_squared_distance)(const double*, const double*, const double*, std::size_t,
                                 const double*, const double*, const double*, std::size_t);
};

const KernelTable& scalar_table() noexcept;
#if defined(MOSCITO_HAVE_AVX2_KERNELS)
const KernelTable& avx2_table() noexcept;
#endif

}  // namespace detail

}  // namespace moscito::simd
