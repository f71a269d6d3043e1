// SPDX-License-Identifier: Apache-2.0

#include "wxmimo/kernels/kernels.hpp"

namespace wxmimo::kernels {

namespace {

const Backend kScalar{"scalar", &phase_sum_scalar, &lagged_sum_scalar};

#if defined(WXMIMO_BUILD_AVX2)
const Backend kAvx2{"avx2", &phase_sum_avx2, &lagged_sum_avx2};

bool avx2_supported() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const Backend* pick_auto() {
#if defined(WXMIMO_BUILD_AVX2)
    if (avx2_supported()) {
        return &kAvx2;
    }
#endif
    return &kScalar;
}

const Backend*& active_slot() {
    static const Backend* active = pick_auto();
    return active;
}

} // namespace

std::complex<double> phase_sum(const double* x, const double* y, const double* w,
                               std::size_t n, double ax, double ay) {
    return active_slot()->phase_sum(x, y, w, n, ax, ay);
}

std::complex<double> lagged_sum(const std::complex<double>* s, std::size_t count,
                                std::size_t stride, std::ptrdiff_t lag) {
    return active_slot()->lagged_sum(s, count, stride, lag);
}

bool select_backend(std::string_view name) {
    if (name == "auto") {
        active_slot() = pick_auto();
        return true;
    }
    if (name == "scalar") {
        active_slot() = &kScalar;
        return true;
    }
#if defined(WXMIMO_BUILD_AVX2)
    if (name == "avx2" && avx2_supported()) {
        active_slot() = &kAvx2;
        return true;
    }
#endif
    return false;
}

const char* active_backend() { return active_slot()->name; }

std::vector<std::string> available_backends() {
    std::vector<std::string> out{"scalar"};
#if defined(WXMIMO_BUILD_AVX2)
    if (avx2_supported()) {
        out.emplace_back("avx2");
    }
#endif
    return out;
}

} // namespace wxmimo::kernels
