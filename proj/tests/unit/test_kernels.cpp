#include <cmath>
#include <vector>

#include "doctest.h"
#include "hess2/kernels.hpp"
#include "oracles.hpp"

using namespace hess2;

namespace {

std::vector<double> random_vec(std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = oracle::uniform(-1, 1);
    return v;
}

// Random stencil coefficients over a grid, with the offsets of the 19-point pattern.
struct RandomStencil {
    GridPtr grid;
    std::vector<double> coef;
    std::array<std::ptrdiff_t, kernels::kStencilPoints> offsets{};

    explicit RandomStencil(int n) : grid(make_grid(n)) {
        const std::size_t m = grid->interior().size();
        coef = random_vec(m * kernels::kStencilPoints);
        const int d[kernels::kStencilPoints][3] = {
            {0, 0, 0},  {1, 0, 0},  {-1, 0, 0}, {0, 1, 0},  {0, -1, 0}, {0, 0, 1},   {0, 0, -1},
            {1, 1, 0},  {1, -1, 0}, {-1, 1, 0}, {-1, -1, 0}, {1, 0, 1}, {1, 0, -1},  {-1, 0, 1},
            {-1, 0, -1}, {0, 1, 1}, {0, 1, -1}, {0, -1, 1}, {0, -1, -1}};
        for (int p = 0; p < kernels::kStencilPoints; ++p) offsets[p] = grid->stride(d[p][0], d[p][1], d[p][2]);
    }

    kernels::StencilView view() const {
        return {coef, offsets, grid->runs(), grid->interior().size()};
    }
};

// Plain loop over interior nodes, written independently of either kernel.
std::vector<double> reference_apply(const RandomStencil& s, const std::vector<double>& x) {
    std::vector<double> y(x.size(), 0.0);
    const auto interior = s.grid->interior();
    for (std::size_t t = 0; t < interior.size(); ++t) {
        double acc = 0.0;
        for (int p = 0; p < kernels::kStencilPoints; ++p)
            acc += s.coef[p * interior.size() + t] * x[interior[t] + s.offsets[p]];
        y[interior[t]] = acc;
    }
    return y;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar stencil matches a direct loop") {
    const RandomStencil s(17);
    const std::vector<double> x = random_vec(s.grid->size());
    std::vector<double> y(x.size(), 0.0);
    kernels::scalar().apply_stencil(s.view(), s.grid->runs(), x.data(), y.data());
    const std::vector<double> ref = reference_apply(s, x);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(y[i] - ref[i]) < 1e-13);
}

TEST_CASE("SIMD kernels agree with the scalar reference") {
    const kernels::KernelTable* simd = kernels::avx2();
    if (!simd) {
        MESSAGE("AVX2 kernels unavailable on this build or CPU; equivalence not exercised");
        return;
    }
    const kernels::KernelTable& ref = kernels::scalar();
    CHECK(simd->isa == "avx2");

    for (int n : {9, 17, 33}) {
        const RandomStencil s(n);
        const std::vector<double> x = random_vec(s.grid->size());
        std::vector<double> y0(x.size(), 7.0), y1(x.size(), 7.0);
        ref.apply_stencil(s.view(), s.grid->runs(), x.data(), y0.data());
        simd->apply_stencil(s.view(), s.grid->runs(), x.data(), y1.data());
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y0[i] - y1[i]) <= 1e-13);
    }

    // Lengths around the vector width exercise the scalar tails.
    for (std::size_t len : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 1000u, 4097u}) {
        const std::vector<double> a = random_vec(len), b = random_vec(len);
        double mag = 0.0;
        for (std::size_t i = 0; i < len; ++i) mag += std::abs(a[i] * b[i]);
        CHECK(std::abs(ref.dot(a.data(), b.data(), len) - simd->dot(a.data(), b.data(), len)) <= 1e-14 * (1 + mag));
        CHECK(ref.sup(a.data(), len) == simd->sup(a.data(), len));

        std::vector<double> y0 = b, y1 = b;
        ref.axpy(0.37, a.data(), y0.data(), len);
        simd->axpy(0.37, a.data(), y1.data(), len);
        for (std::size_t i = 0; i < len; ++i) CHECK(std::abs(y0[i] - y1[i]) <= 1e-15);

        y0 = b;
        y1 = b;
        ref.xpby(a.data(), -1.3, y0.data(), len);
        simd->xpby(a.data(), -1.3, y1.data(), len);
        for (std::size_t i = 0; i < len; ++i) CHECK(std::abs(y0[i] - y1[i]) <= 1e-15);

        std::vector<double> z0(len), z1(len);
        ref.mul(a.data(), b.data(), z0.data(), len);
        simd->mul(a.data(), b.data(), z1.data(), len);
        for (std::size_t i = 0; i < len; ++i) CHECK(z0[i] == z1[i]);
    }
}

TEST_CASE("vector kernels compute what they claim") {
    const kernels::KernelTable& k = kernels::scalar();
    const std::vector<double> a{1, -2, 3}, b{4, 5, -6};
    CHECK(k.dot(a.data(), b.data(), 3) == -24.0);
    CHECK(k.sup(b.data(), 3) == 6.0);
    std::vector<double> y = b;
    k.axpy(2.0, a.data(), y.data(), 3);
    CHECK(y == std::vector<double>{6, 1, 0});
    y = b;
    k.xpby(a.data(), 0.5, y.data(), 3);
    CHECK(y == std::vector<double>{3, 0.5, 0});
    std::vector<double> z(3);
    k.mul(a.data(), b.data(), z.data(), 3);
    CHECK(z == std::vector<double>{4, -10, -18});
}

TEST_CASE("selection") {
    CHECK(kernels::select("scalar"));
    CHECK(kernels::active().isa == "scalar");
    CHECK_FALSE(kernels::select("sse9"));
    if (kernels::avx2()) {
        CHECK(kernels::select("avx2"));
        CHECK(kernels::active().isa == "avx2");
    }
}

}  // TEST_SUITE
