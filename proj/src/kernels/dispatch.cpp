#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

#include "moscito/error.hpp"
#include "moscito/simd.hpp"
#include "table.hpp"

namespace moscito::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(MOSCITO_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("MOSCITO_SIMD"); env && std::string(env) == "scalar")
    return Backend::scalar;
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() noexcept {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

const detail::KernelTable& table() noexcept {
#if defined(MOSCITO_HAVE_AVX2_KERNELS)
  if (current().load(std::memory_order_relaxed) == Backend::avx2) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

}  // namespace

Backend active_backend() noexcept { return current().load(); }

bool backend_available(Backend b) noexcept {
  return b == Backend::scalar || (b == Backend::avx2 && cpu_has_avx2());
}

void set_backend(Backend b) {
  if (!backend_available(b))
    throw Error("SIMD backend '" + std::string(backend_name(b)) + "' is not available");
  current().store(b);
}

std::string_view backend_name(Backend b) noexcept {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return table().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  table().axpy(alpha, x.data(), y.data(), x.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return table().squared_distance(a.data(), b.data(), a.size());
}

std::size_t count_exposed(Points3 probes, Points3 centers, std::span<const double> r2) {
  assert(centers.size() == r2.size());
  return table().count_exposed(probes.x.data(), probes.y.data(), probes.z.data(), probes.size(),
                               centers.x.data(), centers.y.data(), centers.z.data(), r2.data(),
                               centers.size());
}

double min_squared_distance(Points3 a, Points3 b) {
  return table().min_squared_distance(a.x.data(), a.y.data(), a.z.data(), a.size(), b.x.data(),
                                      b.y.data(), b.z.data(), b.size());
}

}  // namespace moscito::simd
