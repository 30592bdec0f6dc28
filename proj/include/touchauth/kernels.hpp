// SPDX-License-Identifier: Apache-2.0
//
// Reduction kernels behind the detector metrics. Each kernel has a scalar
// reference implementation and, where the target supports it, an AVX2
// (x86-64) or NEON (AArch64) variant. The variant is picked once at startup
// from CPU features; TOUCHAUTH_KERNELS=scalar|avx2|neon forces a backend.
#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace touchauth::kernels {

enum class Backend { Scalar, Avx2, Neon };

struct CrossMoments {
    double sxx = 0.0;  // sum (x - mx)^2
    double syy = 0.0;  // sum (y - my)^2
    double sxy = 0.0;  // sum (x - mx)(y - my)
};

/// Function table for one backend. Length preconditions (x.size() == y.size())
/// are checked by the public wrappers, not here.
struct KernelTable {
    Backend backend;
    std::string_view name;
    double (*sum)(const double* x, std::size_t n);
    double (*sum_squares)(const double* x, std::size_t n);
    double (*centered_sum_squares)(const double* x, std::size_t n, double mean);
    double (*sum_squared_diff)(const double* x, const double* y, std::size_t n);
    CrossMoments (*centered_cross)(const double* x, const double* y, std::size_t n, double mx,
                                   double my);
};

/// The scalar reference table. Always available.
const KernelTable& scalar_table() noexcept;

/// Table for `b`, or nullptr if it was not compiled in or the CPU lacks it.
const KernelTable* table_for(Backend b) noexcept;

/// Backends usable on this machine, scalar first.
std::vector<Backend> available_backends();

/// Currently dispatched table.
const KernelTable& active() noexcept;

/// Switch the dispatched backend. Returns false (and changes nothing) if
/// the backend is unavailable. Not thread-safe against concurrent kernel calls.
bool set_backend(Backend b) noexcept;

std::string_view backend_name(Backend b) noexcept;

// Convenience wrappers over active().
double sum(std::span<const double> x);
double mean(std::span<const double> x);
double sum_squares(std::span<const double> x);
double centered_sum_squares(std::span<const double> x, double mean);
double sum_squared_diff(std::span<const double> x, std::span<const double> y);
CrossMoments centered_cross(std::span<const double> x, std::span<const double> y, double mx,
                            double my);

}  // namespace touchauth::kernels
