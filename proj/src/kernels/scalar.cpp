#include <cmath>

#include "kernels_impl.hpp"

namespace hess2::kernels::detail {
namespace {

void apply_stencil(const StencilView& op, std::span<const InteriorRun> runs, const double* x,
                   double* y) {
    const std::size_t m = op.count;
    for (const InteriorRun& run : runs) {
        for (std::size_t t = 0; t < run.length; ++t) {
            const std::size_t node = run.first + t;
            const std::size_t c = run.offset + t;
            double acc = 0.0;
            for (int p = 0; p < kStencilPoints; ++p) {
                acc += op.coef[p * m + c] * x[static_cast<std::ptrdiff_t>(node) + op.offsets[p]];
            }
            y[node] = acc;
        }
    }
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpby(const double* x, double beta, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void mul(const double* x, const double* y, double* z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

double sup(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s = std::fmax(s, std::fabs(x[i]));
    return s;
}

}  // namespace

const KernelTable kScalarTable{"scalar", apply_stencil, dot, axpy, xpby, mul, sup};

}  // namespace hess2::kernels::detail
