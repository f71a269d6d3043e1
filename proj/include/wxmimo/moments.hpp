// SPDX-License-Identifier: Apache-2.0
//
// Pulse-pair auto-covariance estimators: conventional alternating-polarization
// moments, quadrant-MIMO moments on the PRI/4 staggered sequence, and the
// triangular-window model for the variance of a mean-power estimate.

#ifndef WXMIMO_MOMENTS_HPP
#define WXMIMO_MOMENTS_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "wxmimo/echo_sim.hpp"

namespace wxmimo {

// Mean of s[offset + k*stride] * conj(s[offset + k*stride + lag]) over every k
// for which both indices are in range; the divisor is the number of pairs
// actually summed. Requires at least 4 pairs. lag may be negative.
std::complex<double> autocovariance(std::span<const std::complex<double>> s,
                                    std::ptrdiff_t lag, std::size_t stride = 1,
                                    std::size_t offset = 0);

// Lagged covariances per stream. Streams are kStreamH/kStreamV for the
// alternating scheme and 1..4 for quadrants.
inline constexpr int kStreamH = -1;
inline constexpr int kStreamV = -2;

struct LagEstimate {
    std::complex<double> value{0.0, 0.0};
    std::size_t pair_count = 0;
};

class CovarianceSet {
public:
    void set(int stream, int lag, std::complex<double> value, std::size_t pairs);
    bool has(int stream, int lag) const;
    std::complex<double> at(int stream, int lag) const; // throws when absent
    std::size_t pairs(int stream, int lag) const;

private:
    struct Entry {
        int stream;
        int lag;
        LagEstimate est;
    };
    const Entry* find(int stream, int lag) const;
    std::vector<Entry> entries_;
};

struct MomentSet {
    double z_dbz = 0.0;
    double v_ms = 0.0;
    double w_ms = 0.0;
    double phidp_rad = 0.0;
    double zdr_db = 0.0;
    double rhohv = 0.0;
    double snr_db = 0.0;
    double ncp = 0.0;
    // per-polarization lag-1 phase with the differential phase removed;
    // diagnostics only, both should agree with the Doppler phase
    double psi_h_rad = 0.0;
    double psi_v_rad = 0.0;
    bool degenerate = false;     // zero-power stream
    bool width_clamped = false;  // negative log argument clamped to zero
    bool rhohv_clamped = false;  // estimate fell outside [0, 1]
};

// Conventional alternating-polarization moments for one range gate. v_nyq is
// the unambiguous velocity of the 1-PRI phase (block.v_nyq_base_ms). Noise
// correction uses block.noise_power.
MomentSet alt_pol_moments(const IQBlock& block, std::size_t gate, double v_nyq_ms);

// Stride-4 covariances R_q[l] = mean_m S[4m+q-1] conj(S[4m+q-1+l]) for
// q = 1..4 and l in {0, 1, 3, 4}.
CovarianceSet quadrant_covariances(const IQBlock& block, std::size_t gate);

struct DopplerEstimate {
    double psi_rad = 0.0; // Doppler phase over one full PRI, in (-4pi, 4pi]
    double v_ms = 0.0;
    bool ambiguous = false; // adjacent-pair phases spread beyond pi/2
    std::array<double, 4> pair_psi_rad{}; // per-pair unwrapped estimates (diagnostics)
};

// Doppler from the staggered sequence. Each adjacent-quadrant product
// R_q[1]*R_{q+1}[3] cancels the pair phase offsets and yields the full-PRI
// phase modulo 2*pi; the offset-free complex mean of the four R_q[1] supplies
// the coarse phase that unwraps it to the PRI/4 span. Unambiguous span is
// 4 * v_nyq_base (four times the single-quadrant Nyquist). The deterministic
// pair offsets cancel for |phi1| < pi/2; beyond that the coarse phase loses
// identifiability and results carry the ambiguity flag semantics of the pairs.
DopplerEstimate mimo_doppler(const CovarianceSet& cov, double v_nyq_base_ms);

// Reference estimator using only same-quadrant lag-4 covariances; spans just
// +-v_nyq_base and aliases beyond it.
double single_quadrant_velocity(const CovarianceSet& cov, double v_nyq_base_ms);

struct WidthEstimate {
    double sigma2 = 0.0;
    double w_ms = 0.0;
    bool clamped = false;
};

// sigma^2 = ln( prod_q R_q[0] / |prod_q R_q[4]| ), w = v_nyq * sqrt(sigma^2) / (2 pi),
// taken literally; the ~1/sqrt(2) bias against the true width is characterized
// in the shipped calibration table rather than corrected here.
WidthEstimate mimo_width(const CovarianceSet& cov, double v_nyq_ms);

// Z = mean of the four R_q[0], scaled by the radar constant, in dBZ.
double mimo_reflectivity_dbz(const CovarianceSet& cov, double radar_constant,
                             bool subtract_noise = false, double noise_power = 0.0);

// Full quadrant-mode moment row for one gate (polarimetric fields are NaN:
// the staggered scheme is single-polarization).
MomentSet quadrant_mimo_moments(const IQBlock& block, std::size_t gate,
                                double radar_constant = 1.0);

struct VarianceModelInput {
    double mean_power = 0.0;
    std::size_t n = 0;
    std::vector<double> rho_p; // power correlation at lags 0..n-1; rho_p[0] == 1
};

// var(P_est) = (P^2/N) * sum_{l=-(N-1)}^{N-1} (1 - |l|/N) rho_p[|l|].
// Uncorrelated input reduces exactly to P^2/N.
double power_variance_model(const VarianceModelInput& in);

// Gaussian power correlation |rho_signal|^2 for a width/PRT/wavelength triple.
std::vector<double> gaussian_power_correlation(std::size_t n, double width_ms, double prt_s,
                                               double wavelength_m);

void write_moments_csv_header(std::ostream& os);
void write_moments_csv_row(std::ostream& os, std::size_t gate, const MomentSet& m);

} // namespace wxmimo

#endif
