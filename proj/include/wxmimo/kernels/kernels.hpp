// SPDX-License-Identifier: Apache-2.0
//
// Data-parallel inner loops used by the pattern and covariance code, with a
// scalar reference implementation and SIMD variants selected at runtime.
// All backends must agree with the scalar reference to ~1e-13 relative; the
// test suite enforces this against an independent direct-sum oracle as well.

#ifndef WXMIMO_KERNELS_HPP
#define WXMIMO_KERNELS_HPP

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace wxmimo::kernels {

// sum_k w[k] * exp(i * (ax*x[k] + ay*y[k]))
using PhaseSumFn = std::complex<double> (*)(const double* x, const double* y,
                                            const double* w, std::size_t n,
                                            double ax, double ay);

// sum_{m=0}^{count-1} s[m*stride] * conj(s[m*stride + lag])
// The caller guarantees every index (including +lag, which may be negative)
// is in bounds for the underlying buffer.
using LaggedSumFn = std::complex<double> (*)(const std::complex<double>* s,
                                             std::size_t count, std::size_t stride,
                                             std::ptrdiff_t lag);

struct Backend {
    const char* name;
    PhaseSumFn phase_sum;
    LaggedSumFn lagged_sum;
};

// Reference implementations (sequential, std::sin/std::cos).
std::complex<double> phase_sum_scalar(const double* x, const double* y, const double* w,
                                      std::size_t n, double ax, double ay);
std::complex<double> lagged_sum_scalar(const std::complex<double>* s, std::size_t count,
                                       std::size_t stride, std::ptrdiff_t lag);

#if defined(WXMIMO_BUILD_AVX2)
std::complex<double> phase_sum_avx2(const double* x, const double* y, const double* w,
                                    std::size_t n, double ax, double ay);
std::complex<double> lagged_sum_avx2(const std::complex<double>* s, std::size_t count,
                                     std::size_t stride, std::ptrdiff_t lag);
#endif

// Dispatched entry points.
std::complex<double> phase_sum(const double* x, const double* y, const double* w,
                               std::size_t n, double ax, double ay);
std::complex<double> lagged_sum(const std::complex<double>* s, std::size_t count,
                                std::size_t stride, std::ptrdiff_t lag);

// Backend selection. "auto" picks the best supported backend.
// Returns false (and leaves the selection unchanged) for unknown/unsupported names.
bool select_backend(std::string_view name);
const char* active_backend();
std::vector<std::string> available_backends();

} // namespace wxmimo::kernels

#endif
