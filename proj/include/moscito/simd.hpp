#pragma once

// Data-parallel inner loops used throughout the library. Every kernel has a
// scalar reference implementation and, on x86-64, an AVX2/FMA variant. The
// variant is picked once at startup from CPUID; set_backend() overrides it
// (tests use this to check the two paths agree). The environment variable
// MOSCITO_SIMD=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace moscito::simd {

enum class Backend { scalar, avx2 };

Backend active_backend() noexcept;
bool backend_available(Backend b) noexcept;
/// Throws moscito::Error if `b` is not supported on this machine.
void set_backend(Backend b);
std::string_view backend_name(Backend b) noexcept;

double dot(std::span<const double> a, std::span<const double> b);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

double squared_distance(std::span<const double> a, std::span<const double> b);

/// Structure-of-arrays view over 3-D points.
struct Points3 {
  std::span<const double> x;
  std::span<const double> y;
  std::span<const double> z;
  std::size_t size() const noexcept { return x.size(); }
};

/// Number of probe points lying outside every sphere (center c_j, squared
/// radius r2_j). A point is buried only when strictly inside a sphere.
std::size_t count_exposed(Points3 probes, Points3 centers, std::span<const double> r2);

/// Minimum squared Euclidean distance over all pairs (a_i, b_j).
double min_squared_distance(Points3 a, Points3 b);

}  // namespace moscito::simd
