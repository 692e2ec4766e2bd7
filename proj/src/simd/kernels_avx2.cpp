#include "longmem/simd.hpp"

#include <immintrin.h>

namespace longmem::simd {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

void dl_update_avx2(double* next, const double* prev, double k, std::size_t t) {
    next[0] = k;
    const __m256d kv = _mm256_set1_pd(k);
    std::size_t i = 1;
    // next[i] = prev[i-1] - k*prev[t-1-i]; reversed operand loaded and permuted
    for (; i + 4 <= t; i += 4) {
        __m256d fwd = _mm256_loadu_pd(prev + i - 1);
        __m256d rev = _mm256_loadu_pd(prev + t - 4 - i);          // prev[t-4-i .. t-1-i]
        rev = _mm256_permute4x64_pd(rev, 0b00011011);             // reverse lanes
        _mm256_storeu_pd(next + i, _mm256_fnmadd_pd(kv, rev, fwd));
    }
    for (; i < t; ++i) next[i] = prev[i - 1] - k * prev[t - 1 - i];
}

} // namespace

const Kernels& avx2_kernels() {
    static const Kernels k{dot_avx2, sum_avx2, dl_update_avx2, "avx2"};
    return k;
}

} // namespace longmem::simd
