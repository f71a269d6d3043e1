// SPDX-License-Identifier: Apache-2.0
//
// AVX2+FMA variants. The sincos uses Cody-Waite three-part pi/2 reduction with
// the cephes minimax polynomials; exact for |theta| well below 2^20 * pi/2,
// which covers any k*(x*u) phase this library produces.

#include "wxmimo/kernels/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace wxmimo::kernels {

namespace {

constexpr double kTwoOverPi = 0.63661977236758134308;
constexpr double kDP1 = 1.57079632673412561417e+00;
constexpr double kDP2 = 6.07710050650619224932e-11;
constexpr double kDP3 = 2.02226624879595063154e-21;

constexpr double kSinC0 = -1.66666666666666307295e-1;
constexpr double kSinC1 = 8.33333333332211858878e-3;
constexpr double kSinC2 = -1.98412698295895385996e-4;
constexpr double kSinC3 = 2.75573136213857245213e-6;
constexpr double kSinC4 = -2.50507477628578072866e-8;
constexpr double kSinC5 = 1.58962301576546568060e-10;

constexpr double kCosC0 = 4.16666666666665929218e-2;
constexpr double kCosC1 = -1.38888888888730564116e-3;
constexpr double kCosC2 = 2.48015872888517179954e-5;
constexpr double kCosC3 = -2.75573141792967388112e-7;
constexpr double kCosC4 = 2.08757008419747316778e-9;
constexpr double kCosC5 = -1.13585365213876817300e-11;

// sin/cos of four packed doubles.
inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kDP1), x);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kDP2), r);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kDP3), r);

    const __m256d z = _mm256_mul_pd(r, r);

    __m256d ps = _mm256_set1_pd(kSinC5);
    ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kSinC4));
    ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kSinC3));
    ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kSinC2));
    ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kSinC1));
    ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kSinC0));
    const __m256d s = _mm256_fmadd_pd(_mm256_mul_pd(r, z), ps, r);

    __m256d pc = _mm256_set1_pd(kCosC5);
    pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kCosC4));
    pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kCosC3));
    pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kCosC2));
    pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kCosC1));
    pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kCosC0));
    const __m256d c = _mm256_fmadd_pd(_mm256_mul_pd(z, z), pc,
                                      _mm256_fnmadd_pd(z, _mm256_set1_pd(0.5),
                                                       _mm256_set1_pd(1.0)));

    // quadrant q = n mod 4: swap when q odd, negate sin when q&2, cos when (q+1)&2
    const __m128i n32 = _mm256_cvtpd_epi32(n);
    const __m256i bit0 = _mm256_cvtepi32_epi64(_mm_and_si128(n32, _mm_set1_epi32(1)));
    const __m256i bit1 = _mm256_cvtepi32_epi64(_mm_and_si128(n32, _mm_set1_epi32(2)));
    const __m256i bit1c = _mm256_cvtepi32_epi64(
        _mm_and_si128(_mm_add_epi32(n32, _mm_set1_epi32(1)), _mm_set1_epi32(2)));

    const __m256d swap_mask =
        _mm256_castsi256_pd(_mm256_cmpeq_epi64(bit0, _mm256_set1_epi64x(1)));
    const __m256d sin_sign = _mm256_castsi256_pd(_mm256_slli_epi64(bit1, 62));
    const __m256d cos_sign = _mm256_castsi256_pd(_mm256_slli_epi64(bit1c, 62));

    s_out = _mm256_xor_pd(_mm256_blendv_pd(s, c, swap_mask), sin_sign);
    c_out = _mm256_xor_pd(_mm256_blendv_pd(c, s, swap_mask), cos_sign);
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d sum2 = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(sum2, _mm_unpackhi_pd(sum2, sum2)));
}

} // namespace

std::complex<double> phase_sum_avx2(const double* x, const double* y, const double* w,
                                    std::size_t n, double ax, double ay) {
    const __m256d axv = _mm256_set1_pd(ax);
    const __m256d ayv = _mm256_set1_pd(ay);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();

    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d theta = _mm256_fmadd_pd(ayv, _mm256_loadu_pd(y + k),
                                              _mm256_mul_pd(axv, _mm256_loadu_pd(x + k)));
        __m256d s, c;
        sincos4(theta, s, c);
        const __m256d wv = _mm256_loadu_pd(w + k);
        acc_re = _mm256_fmadd_pd(wv, c, acc_re);
        acc_im = _mm256_fmadd_pd(wv, s, acc_im);
    }
    double re = hsum(acc_re);
    double im = hsum(acc_im);
    for (; k < n; ++k) {
        const double theta = ax * x[k] + ay * y[k];
        re += w[k] * std::cos(theta);
        im += w[k] * std::sin(theta);
    }
    return {re, im};
}

std::complex<double> lagged_sum_avx2(const std::complex<double>* s, std::size_t count,
                                     std::size_t stride, std::ptrdiff_t lag) {
    if (stride != 1) {
        return lagged_sum_scalar(s, count, stride, lag);
    }
    const double* a = reinterpret_cast<const double*>(s);
    const double* b = reinterpret_cast<const double*>(s + lag);

    // per-lane sign pattern [-,+,-,+] turns (ar*bi, ai*br) products into ai*br - ar*bi
    const __m256d neg_even =
        _mm256_castsi256_pd(_mm256_set_epi64x(0, 0x8000000000000000LL, 0,
                                              0x8000000000000000LL));
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();

    std::size_t m = 0;
    for (; m + 2 <= count; m += 2) {
        const __m256d av = _mm256_loadu_pd(a + 2 * m);
        const __m256d bv = _mm256_loadu_pd(b + 2 * m);
        acc_re = _mm256_fmadd_pd(av, bv, acc_re);
        const __m256d bswap = _mm256_shuffle_pd(bv, bv, 0b0101);
        acc_im = _mm256_add_pd(acc_im, _mm256_xor_pd(_mm256_mul_pd(av, bswap), neg_even));
    }
    double re = hsum(acc_re);
    double im = hsum(acc_im);
    for (; m < count; ++m) {
        const std::complex<double>& p = s[m];
        const std::complex<double>& q = s[static_cast<std::ptrdiff_t>(m) + lag];
        re += p.real() * q.real() + p.imag() * q.imag();
        im += p.imag() * q.real() - p.real() * q.imag();
    }
    return {re, im};
}

} // namespace wxmimo::kernels
