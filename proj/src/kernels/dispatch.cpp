// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <string>

#include "tables.hpp"
#include "touchauth/error.hpp"

namespace touchauth::kernels {
namespace {

const KernelTable* best_available() noexcept {
    if (const auto* t = detail::avx2_table()) return t;
    if (const auto* t = detail::neon_table()) return t;
    return &scalar_table();
}

const KernelTable* initial_table() noexcept {
    const char* forced = std::getenv("TOUCHAUTH_KERNELS");
    if (forced != nullptr) {
        const std::string f{forced};
        if (f == "scalar") return &scalar_table();
        if (f == "avx2" && detail::avx2_table() != nullptr) return detail::avx2_table();
        if (f == "neon" && detail::neon_table() != nullptr) return detail::neon_table();
    }
    return best_available();
}

std::atomic<const KernelTable*>& current() noexcept {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

void require_same_length(std::size_t a, std::size_t b) {
    if (a != b) throw LengthMismatch("kernel inputs differ in length");
}

}  // namespace

const KernelTable* table_for(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar: return &scalar_table();
        case Backend::Avx2: return detail::avx2_table();
        case Backend::Neon: return detail::neon_table();
    }
    return nullptr;
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out{Backend::Scalar};
    if (detail::avx2_table() != nullptr) out.push_back(Backend::Avx2);
    if (detail::neon_table() != nullptr) out.push_back(Backend::Neon);
    return out;
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

bool set_backend(Backend b) noexcept {
    const KernelTable* t = table_for(b);
    if (t == nullptr) return false;
    current().store(t, std::memory_order_release);
    return true;
}

std::string_view backend_name(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double mean(std::span<const double> x) {
    if (x.empty()) throw InvalidArgument("mean of empty sequence");
    return sum(x) / static_cast<double>(x.size());
}

double sum_squares(std::span<const double> x) { return active().sum_squares(x.data(), x.size()); }

double centered_sum_squares(std::span<const double> x, double m) {
    return active().centered_sum_squares(x.data(), x.size(), m);
}

double sum_squared_diff(std::span<const double> x, std::span<const double> y) {
    require_same_length(x.size(), y.size());
    return active().sum_squared_diff(x.data(), y.data(), x.size());
}

CrossMoments centered_cross(std::span<const double> x, std::span<const double> y, double mx,
                            double my) {
    require_same_length(x.size(), y.size());
    return active().centered_cross(x.data(), y.data(), x.size(), mx, my);
}

}  // namespace touchauth::kernels
