#include "grf/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace grf::kernels {

#if defined(__x86_64__)
bool avx2_supported() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

namespace {

const Backend* resolve() {
    if (const char* env = std::getenv("GRF_KERNELS")) {
        const std::string want(env);
        if (want == "scalar") {
            return &scalar_backend();
        }
#if defined(__x86_64__)
        if (want == "avx2") {
            if (!avx2_supported()) {
                throw std::runtime_error("GRF_KERNELS=avx2 but this CPU lacks AVX2/FMA");
            }
            return &avx2_backend();
        }
#endif
        throw std::runtime_error("unknown GRF_KERNELS value: " + want);
    }
#if defined(__x86_64__)
    if (avx2_supported()) {
        return &avx2_backend();
    }
#endif
    return &scalar_backend();
}

} // namespace

const Backend& active_backend() {
    static const Backend* chosen = resolve();
    return *chosen;
}

std::vector<const Backend*> available_backends() {
    std::vector<const Backend*> out{&scalar_backend()};
#if defined(__x86_64__)
    if (avx2_supported()) {
        out.push_back(&avx2_backend());
    }
#endif
    return out;
}

} // namespace grf::kernels
