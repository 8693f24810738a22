#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

#include "hess2/grid.hpp"

namespace hess2::kernels {

inline constexpr int kStencilPoints = 19;

// Variable-coefficient 19-point stencil over the interior runs of a grid.
// coef[p * count + t] multiplies x[node_t + offsets[p]], where node_t is the
// t-th interior node and count the number of interior nodes.
struct StencilView {
    std::span<const double> coef;
    std::array<std::ptrdiff_t, kStencilPoints> offsets;
    std::span<const InteriorRun> runs;
    std::size_t count;
};

// y[node] = sum_p coef[p][node] * x[node + offsets[p]] for interior nodes in
// runs; other entries of y are untouched.
using ApplyStencilFn = void (*)(const StencilView& op, std::span<const InteriorRun> runs,
                                const double* x, double* y);
using DotFn = double (*)(const double* a, const double* b, std::size_t n);
// y += alpha * x
using AxpyFn = void (*)(double alpha, const double* x, double* y, std::size_t n);
// y = x + beta * y
using XpbyFn = void (*)(const double* x, double beta, double* y, std::size_t n);
// z = x * y (elementwise)
using MulFn = void (*)(const double* x, const double* y, double* z, std::size_t n);
using SupFn = double (*)(const double* x, std::size_t n);

struct KernelTable {
    std::string_view isa;
    ApplyStencilFn apply_stencil;
    DotFn dot;
    AxpyFn axpy;
    XpbyFn xpby;
    MulFn mul;
    SupFn sup;
};

// Reference implementation.
const KernelTable& scalar();
// AVX2+FMA implementation, or nullptr when the build or the CPU lacks it.
const KernelTable* avx2();

// Table selected at first use: AVX2 when the CPU supports it, unless the
// environment variable HESS2_KERNELS=scalar forces the reference path.
const KernelTable& active();
// Override the selection ("scalar" or "avx2"); returns false if unavailable.
bool select(std::string_view isa);

}  // namespace hess2::kernels
