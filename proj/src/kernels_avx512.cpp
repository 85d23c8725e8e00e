// AVX-512F kernel variants. Compiled with -mavx512f; only reached through
// the dispatch table after a cpuid check.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "gw/kernels.hpp"

namespace gw::kernels::avx512 {

double dot(const double* x, const double* y, std::size_t n) {
    __m512d acc0 = _mm512_setzero_pd();
    __m512d acc1 = _mm512_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm512_fmadd_pd(_mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i), acc0);
        acc1 = _mm512_fmadd_pd(_mm512_loadu_pd(x + i + 8), _mm512_loadu_pd(y + i + 8), acc1);
    }
    for (; i + 8 <= n; i += 8)
        acc0 = _mm512_fmadd_pd(_mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i), acc0);
    double s = _mm512_reduce_add_pd(_mm512_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m512d va = _mm512_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m512d vy = _mm512_loadu_pd(y + i);
        vy = _mm512_fmadd_pd(va, _mm512_loadu_pd(x + i), vy);
        _mm512_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void rot(double* x, double* y, double c, double s, std::size_t n) {
    const __m512d vc = _mm512_set1_pd(c);
    const __m512d vs = _mm512_set1_pd(s);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m512d vx = _mm512_loadu_pd(x + i);
        const __m512d vy = _mm512_loadu_pd(y + i);
        _mm512_storeu_pd(x + i, _mm512_fmsub_pd(vc, vx, _mm512_mul_pd(vs, vy)));
        _mm512_storeu_pd(y + i, _mm512_fmadd_pd(vs, vx, _mm512_mul_pd(vc, vy)));
    }
    for (; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

void abs_diff(double a, const double* y, double* out, std::size_t n) {
    const __m512d va = _mm512_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m512d d = _mm512_sub_pd(va, _mm512_loadu_pd(y + i));
        _mm512_storeu_pd(out + i, _mm512_abs_pd(d));
    }
    for (; i < n; ++i) out[i] = __builtin_fabs(a - y[i]);
}

void sq_diff(double a, const double* y, double* out, std::size_t n) {
    const __m512d va = _mm512_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m512d d = _mm512_sub_pd(va, _mm512_loadu_pd(y + i));
        _mm512_storeu_pd(out + i, _mm512_mul_pd(d, d));
    }
    for (; i < n; ++i) {
        const double d = a - y[i];
        out[i] = d * d;
    }
}

void scale(double a, double* x, std::size_t n) {
    const __m512d va = _mm512_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm512_storeu_pd(x + i, _mm512_mul_pd(va, _mm512_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

double sum(const double* x, std::size_t n) {
    __m512d acc = _mm512_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) acc = _mm512_add_pd(acc, _mm512_loadu_pd(x + i));
    double s = _mm512_reduce_add_pd(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

} // namespace gw::kernels::avx512

#endif
