// SPDX-License-Identifier: Apache-2.0

#include "wxmimo/kernels/kernels.hpp"

#include <cmath>

namespace wxmimo::kernels {

std::complex<double> phase_sum_scalar(const double* x, const double* y, const double* w,
                                      std::size_t n, double ax, double ay) {
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double theta = ax * x[k] + ay * y[k];
        re += w[k] * std::cos(theta);
        im += w[k] * std::sin(theta);
    }
    return {re, im};
}

std::complex<double> lagged_sum_scalar(const std::complex<double>* s, std::size_t count,
                                       std::size_t stride, std::ptrdiff_t lag) {
    double re = 0.0, im = 0.0;
    for (std::size_t m = 0; m < count; ++m) {
        const std::complex<double>& a = s[m * stride];
        const std::complex<double>& b = s[static_cast<std::ptrdiff_t>(m * stride) + lag];
        re += a.real() * b.real() + a.imag() * b.imag();
        im += a.imag() * b.real() - a.real() * b.imag();
    }
    return {re, im};
}

} // namespace wxmimo::kernels
