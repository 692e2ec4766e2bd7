#include "longmem/simd.hpp"

#include <cstdlib>
#include <cstring>

namespace longmem::simd {

#if defined(LONGMEM_HAVE_AVX2)
const Kernels& avx2_kernels();
#endif
#if defined(LONGMEM_HAVE_NEON)
const Kernels& neon_kernels();
#endif

namespace {

const Kernels& select() {
    const char* env = std::getenv("LONGMEM_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return scalar();
#if defined(LONGMEM_HAVE_AVX2)
    if (env == nullptr || std::strcmp(env, "avx2") == 0) {
        if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
            return avx2_kernels();
    }
#endif
#if defined(LONGMEM_HAVE_NEON)
    // NEON is baseline on aarch64
    if (env == nullptr || std::strcmp(env, "neon") == 0) return neon_kernels();
#endif
    return scalar();
}

} // namespace

const Kernels& active() {
    static const Kernels& k = select();
    return k;
}

} // namespace longmem::simd
