#include "longmem/simd.hpp"

namespace longmem::simd {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

void dl_update_scalar(double* next, const double* prev, double k, std::size_t t) {
    next[0] = k;
    for (std::size_t i = 1; i < t; ++i) next[i] = prev[i - 1] - k * prev[t - 1 - i];
}

} // namespace

const Kernels& scalar() {
    static const Kernels k{dot_scalar, sum_scalar, dl_update_scalar, "scalar"};
    return k;
}

} // namespace longmem::simd
