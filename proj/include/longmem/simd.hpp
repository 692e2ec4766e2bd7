#pragma once
// Runtime-dispatched arithmetic kernels for the hot inner loops
// (Durbin-Levinson recursions, CSS filters, direct DFT sums).
//
// Each kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The active set is
// chosen once at startup from CPU capabilities; the environment variable
// LONGMEM_SIMD=scalar forces the reference path (used by the equivalence
// tests).

#include <cstddef>

namespace longmem::simd {

struct Kernels {
    // sum_i a[i]*b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_i a[i]
    double (*sum)(const double* a, std::size_t n);
    // Durbin-Levinson row update in forward layout:
    //   next[0]   = k
    //   next[i]   = prev[i-1] - k*prev[t-1-i],  i = 1..t-1
    void (*dl_update)(double* next, const double* prev, double k, std::size_t t);
    const char* name;
};

// Kernel table selected at startup.
const Kernels& active();

// Reference implementations (always available; used as oracles in tests).
const Kernels& scalar();

// Convenience wrappers.
inline double dot(const double* a, const double* b, std::size_t n) {
    return active().dot(a, b, n);
}
inline double sum(const double* a, std::size_t n) { return active().sum(a, n); }
inline void dl_update(double* next, const double* prev, double k, std::size_t t) {
    active().dl_update(next, prev, k, t);
}

} // namespace longmem::simd
