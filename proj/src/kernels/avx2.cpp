// Built with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace hess2::kernels::detail {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void apply_stencil(const StencilView& op, std::span<const InteriorRun> runs, const double* x,
                   double* y) {
    const std::size_t m = op.count;
    const double* coef = op.coef.data();
    for (const InteriorRun& run : runs) {
        const double* xr = x + run.first;
        double* yr = y + run.first;
        const double* cr = coef + run.offset;
        std::size_t t = 0;
        for (; t + 4 <= run.length; t += 4) {
            __m256d acc = _mm256_setzero_pd();
            for (int p = 0; p < kStencilPoints; ++p) {
                const __m256d c = _mm256_loadu_pd(cr + p * m + t);
                const __m256d v = _mm256_loadu_pd(xr + t + op.offsets[p]);
                acc = _mm256_fmadd_pd(c, v, acc);
            }
            _mm256_storeu_pd(yr + t, acc);
        }
        for (; t < run.length; ++t) {
            double acc = 0.0;
            for (int p = 0; p < kStencilPoints; ++p) {
                acc = std::fma(cr[p * m + t], xr[static_cast<std::ptrdiff_t>(t) + op.offsets[p]], acc);
            }
            yr[t] = acc;
        }
    }
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void xpby(const double* x, double beta, double* y, std::size_t n) {
    const __m256d b = _mm256_set1_pd(beta);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(b, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void mul(const double* x, const double* y, double* z, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(z + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) z[i] = x[i] * y[i];
}

double sup(const double* x, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    double s = std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
    for (; i < n; ++i) s = std::fmax(s, std::fabs(x[i]));
    return s;
}

}  // namespace

const KernelTable kAvx2Table{"avx2", apply_stencil, dot, axpy, xpby, mul, sup};

}  // namespace hess2::kernels::detail
