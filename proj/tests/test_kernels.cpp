#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "touchauth/detector.hpp"
#include "touchauth/error.hpp"
#include "touchauth/kernels.hpp"

using namespace touchauth;
namespace k = touchauth::kernels;

namespace {

struct BackendGuard {
    k::Backend saved = k::active().backend;
    ~BackendGuard() { k::set_backend(saved); }
};

double tol(const std::vector<double>& x) {
    long double s = 0;
    for (double v : x) s += std::fabs(v) * std::fabs(v) + std::fabs(v);
    return 1e-12 * static_cast<double>(s + 1);
}

}  // namespace

TEST_CASE("scalar backend is always available and selectable") {
    BackendGuard g;
    const auto all = k::available_backends();
    REQUIRE(!all.empty());
    CHECK(all.front() == k::Backend::Scalar);
    CHECK(k::set_backend(k::Backend::Scalar));
    CHECK(k::active().backend == k::Backend::Scalar);
    CHECK(k::backend_name(k::Backend::Scalar) == "scalar");
}

TEST_CASE("every backend matches the long-double oracle") {
    std::mt19937_64 rng(42);
    for (k::Backend b : k::available_backends()) {
        const k::KernelTable* t = k::table_for(b);
        REQUIRE(t != nullptr);
        CAPTURE(t->name);
        for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 33u, 64u,
                              67u, 500u, 1000u, 4097u}) {
            CAPTURE(n);
            const auto x = oracle::random_vec(rng, n, 0.3);
            const auto y = oracle::random_vec(rng, n, 0.3);
            long double sx = 0, sxx = 0, sd = 0;
            for (std::size_t i = 0; i < n; ++i) {
                sx += x[i];
                sxx += (long double)x[i] * x[i];
                sd += (long double)(x[i] - y[i]) * (x[i] - y[i]);
            }
            CHECK(std::fabs(t->sum(x.data(), n) - static_cast<double>(sx)) <= tol(x));
            CHECK(std::fabs(t->sum_squares(x.data(), n) - static_cast<double>(sxx)) <= tol(x));
            CHECK(std::fabs(t->sum_squared_diff(x.data(), y.data(), n) - static_cast<double>(sd)) <=
                  tol(x) + tol(y));
            if (n == 0) continue;
            const double mx = static_cast<double>(oracle::mean(x));
            const double my = static_cast<double>(oracle::mean(y));
            long double cxx = 0, cyy = 0, cxy = 0;
            for (std::size_t i = 0; i < n; ++i) {
                cxx += (x[i] - mx) * (long double)(x[i] - mx);
                cyy += (y[i] - my) * (long double)(y[i] - my);
                cxy += (x[i] - mx) * (long double)(y[i] - my);
            }
            CHECK(std::fabs(t->centered_sum_squares(x.data(), n, mx) - static_cast<double>(cxx)) <=
                  tol(x));
            const k::CrossMoments m = t->centered_cross(x.data(), y.data(), n, mx, my);
            CHECK(std::fabs(m.sxx - static_cast<double>(cxx)) <= tol(x));
            CHECK(std::fabs(m.syy - static_cast<double>(cyy)) <= tol(y));
            CHECK(std::fabs(m.sxy - static_cast<double>(cxy)) <= tol(x) + tol(y));
        }
    }
}

TEST_CASE("SIMD backends agree with scalar on detector outputs") {
    BackendGuard g;
    std::mt19937_64 rng(7);
    for (k::Backend b : k::available_backends()) {
        for (int rep = 0; rep < 200; ++rep) {
            Trace x, y;
            x.samples = oracle::random_vec(rng, 500, 0.2);
            y.samples = oracle::random_vec(rng, 500, 0.2);
            for (std::size_t i = 0; i < 500; ++i) y.samples[i] += 0.7 * x.samples[i];
            REQUIRE(k::set_backend(k::Backend::Scalar));
            const double a0 = apcc(x, y), r0 = rmse(x, y), s0 = population_std(x);
            REQUIRE(k::set_backend(b));
            CHECK(apcc(x, y) == doctest::Approx(a0).epsilon(1e-12));
            CHECK(rmse(x, y) == doctest::Approx(r0).epsilon(1e-12));
            CHECK(population_std(x) == doctest::Approx(s0).epsilon(1e-12));
        }
    }
}

TEST_CASE("span wrappers reject mismatched lengths") {
    const std::vector<double> a(4, 1.0), b(5, 1.0);
    CHECK_THROWS_AS(k::sum_squared_diff(a, b), LengthMismatch);
    CHECK_THROWS_AS(k::centered_cross(a, b, 1.0, 1.0), LengthMismatch);
}
