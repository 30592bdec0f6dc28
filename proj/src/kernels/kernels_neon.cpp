// SPDX-License-Identifier: Apache-2.0
#include "tables.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace touchauth::kernels::detail {
namespace {

double sum_neon(const double* x, std::size_t n) {
    float64x2_t a0 = vdupq_n_f64(0.0);
    float64x2_t a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        a0 = vaddq_f64(a0, vld1q_f64(x + i));
        a1 = vaddq_f64(a1, vld1q_f64(x + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(a0, a1));
    for (; i < n; ++i) s += x[i];
    return s;
}

double sum_squares_neon(const double* x, std::size_t n) {
    float64x2_t a0 = vdupq_n_f64(0.0);
    float64x2_t a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t v0 = vld1q_f64(x + i);
        const float64x2_t v1 = vld1q_f64(x + i + 2);
        a0 = vfmaq_f64(a0, v0, v0);
        a1 = vfmaq_f64(a1, v1, v1);
    }
    double s = vaddvq_f64(vaddq_f64(a0, a1));
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

double centered_sum_squares_neon(const double* x, std::size_t n, double mean) {
    const float64x2_t m = vdupq_n_f64(mean);
    float64x2_t a0 = vdupq_n_f64(0.0);
    float64x2_t a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t d0 = vsubq_f64(vld1q_f64(x + i), m);
        const float64x2_t d1 = vsubq_f64(vld1q_f64(x + i + 2), m);
        a0 = vfmaq_f64(a0, d0, d0);
        a1 = vfmaq_f64(a1, d1, d1);
    }
    double s = vaddvq_f64(vaddq_f64(a0, a1));
    for (; i < n; ++i) {
        const double d = x[i] - mean;
        s += d * d;
    }
    return s;
}

double sum_squared_diff_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t a0 = vdupq_n_f64(0.0);
    float64x2_t a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t d0 = vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
        const float64x2_t d1 = vsubq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
        a0 = vfmaq_f64(a0, d0, d0);
        a1 = vfmaq_f64(a1, d1, d1);
    }
    double s = vaddvq_f64(vaddq_f64(a0, a1));
    for (; i < n; ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

CrossMoments centered_cross_neon(const double* x, const double* y, std::size_t n, double mx,
                                 double my) {
    const float64x2_t vmx = vdupq_n_f64(mx);
    const float64x2_t vmy = vdupq_n_f64(my);
    float64x2_t axx = vdupq_n_f64(0.0);
    float64x2_t ayy = vdupq_n_f64(0.0);
    float64x2_t axy = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t dx = vsubq_f64(vld1q_f64(x + i), vmx);
        const float64x2_t dy = vsubq_f64(vld1q_f64(y + i), vmy);
        axx = vfmaq_f64(axx, dx, dx);
        ayy = vfmaq_f64(ayy, dy, dy);
        axy = vfmaq_f64(axy, dx, dy);
    }
    CrossMoments m{vaddvq_f64(axx), vaddvq_f64(ayy), vaddvq_f64(axy)};
    for (; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        m.sxx += dx * dx;
        m.syy += dy * dy;
        m.sxy += dx * dy;
    }
    return m;
}

constexpr KernelTable kNeon{
    Backend::Neon,           "neon",
    sum_neon,                sum_squares_neon,
    centered_sum_squares_neon, sum_squared_diff_neon,
    centered_cross_neon,
};

}  // namespace

// NEON is mandatory on AArch64.
const KernelTable* neon_table() noexcept { return &kNeon; }

}  // namespace touchauth::kernels::detail

#else

namespace touchauth::kernels::detail {
const KernelTable* neon_table() noexcept { return nullptr; }
}  // namespace touchauth::kernels::detail

#endif
