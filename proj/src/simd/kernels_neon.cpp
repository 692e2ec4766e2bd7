#include "longmem/simd.hpp"

#include <arm_neon.h>

namespace longmem::simd {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_neon(const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

void dl_update_neon(double* next, const double* prev, double k, std::size_t t) {
    next[0] = k;
    const float64x2_t kv = vdupq_n_f64(k);
    std::size_t i = 1;
    for (; i + 2 <= t; i += 2) {
        float64x2_t fwd = vld1q_f64(prev + i - 1);
        float64x2_t rev = vld1q_f64(prev + t - 2 - i);  // prev[t-2-i], prev[t-1-i]
        rev = vextq_f64(rev, rev, 1);                   // swap -> prev[t-1-i], prev[t-2-i]
        vst1q_f64(next + i, vfmsq_f64(fwd, kv, rev));
    }
    for (; i < t; ++i) next[i] = prev[i - 1] - k * prev[t - 1 - i];
}

} // namespace

const Kernels& neon_kernels() {
    static const Kernels k{dot_neon, sum_neon, dl_update_neon, "neon"};
    return k;
}

} // namespace longmem::simd
