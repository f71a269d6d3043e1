// SPDX-License-Identifier: Apache-2.0

#include "wxmimo/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "wxmimo/constants.hpp"
#include "wxmimo/csv.hpp"
#include "wxmimo/kernels/kernels.hpp"

namespace wxmimo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double wrap_pi(double x) {
    x = std::fmod(x + kPi, 2.0 * kPi);
    if (x < 0.0) {
        x += 2.0 * kPi;
    }
    return x - kPi;
}

} // namespace

std::complex<double> autocovariance(std::span<const std::complex<double>> s,
                                    std::ptrdiff_t lag, std::size_t stride,
                                    std::size_t offset) {
    if (stride == 0) {
        throw std::invalid_argument("autocovariance: stride must be >= 1");
    }
    const auto n = static_cast<std::ptrdiff_t>(s.size());
    // first k with offset + k*stride and offset + k*stride + lag both in [0, n)
    std::ptrdiff_t start = static_cast<std::ptrdiff_t>(offset);
    if (lag < 0) {
        const std::ptrdiff_t need = -lag;
        while (start < need) {
            start += static_cast<std::ptrdiff_t>(stride);
        }
    }
    const std::ptrdiff_t limit = n - std::max<std::ptrdiff_t>(lag, 0);
    std::size_t count = 0;
    if (start < limit) {
        count = static_cast<std::size_t>((limit - 1 - start) / static_cast<std::ptrdiff_t>(stride)) + 1;
    }
    if (count < 4) {
        throw std::invalid_argument("autocovariance: need at least 4 sample pairs");
    }
    const std::complex<double> sum = kernels::lagged_sum(s.data() + start, count, stride, lag);
    return sum / static_cast<double>(count);
}

void CovarianceSet::set(int stream, int lag, std::complex<double> value, std::size_t pairs) {
    for (Entry& e : entries_) {
        if (e.stream == stream && e.lag == lag) {
            e.est = {value, pairs};
            return;
        }
    }
    entries_.push_back({stream, lag, {value, pairs}});
}

const CovarianceSet::Entry* CovarianceSet::find(int stream, int lag) const {
    for (const Entry& e : entries_) {
        if (e.stream == stream && e.lag == lag) {
            return &e;
        }
    }
    return nullptr;
}

bool CovarianceSet::has(int stream, int lag) const { return find(stream, lag) != nullptr; }

std::complex<double> CovarianceSet::at(int stream, int lag) const {
    const Entry* e = find(stream, lag);
    if (!e) {
        throw std::invalid_argument("CovarianceSet: missing (stream, lag) entry");
    }
    return e->est.value;
}

std::size_t CovarianceSet::pairs(int stream, int lag) const {
    const Entry* e = find(stream, lag);
    if (!e) {
        throw std::invalid_argument("CovarianceSet: missing (stream, lag) entry");
    }
    return e->est.pair_count;
}

MomentSet alt_pol_moments(const IQBlock& block, std::size_t gate, double v_nyq_ms) {
    if (block.scheme_kind != SchemeKind::kAlternatingPol) {
        throw std::invalid_argument("alt_pol_moments: block is not alternating-polarization");
    }
    if (block.n_pulses < 8) {
        throw std::invalid_argument("alt_pol_moments: need at least 8 pulses");
    }
    const std::vector<std::complex<double>> s = block.gate_series(gate);
    const std::span<const std::complex<double>> sp(s);

    // lag-0 and one-PRI cross-pol covariances; Doppler-positive convention
    // (later sample times conj of the earlier one)
    const std::complex<double> rh0 = autocovariance(sp, 0, 2, 0);
    const std::complex<double> rv0 = autocovariance(sp, 0, 2, 1);
    // phi_h pairs V(2k+1) -> H(2k+2); phi_v pairs H(2k) -> V(2k+1)
    const std::complex<double> phi_h = std::conj(autocovariance(sp, 1, 2, 1));
    const std::complex<double> phi_v = std::conj(autocovariance(sp, 1, 2, 0));
    // same-polarization two-PRI lags for width and rho_hv decorrelation correction
    const std::complex<double> rh2 = std::conj(autocovariance(sp, 2, 2, 0));
    const std::complex<double> rv2 = std::conj(autocovariance(sp, 2, 2, 1));

    MomentSet m;
    const double noise = block.noise_power;
    const double sh = rh0.real() - noise;
    const double sv = rv0.real() - noise;
    if (!(rh0.real() > 0.0) || !(rv0.real() > 0.0) || !(sh > 0.0) || !(sv > 0.0)) {
        m.degenerate = true;
        m.z_dbz = kNaN;
        m.v_ms = kNaN;
        m.w_ms = kNaN;
        m.phidp_rad = kNaN;
        m.zdr_db = kNaN;
        m.rhohv = kNaN;
        m.snr_db = kNaN;
        m.ncp = 0.0;
        return m;
    }

    // differential phase and Doppler phase from the lag-1 pair arguments
    const double phi = -0.5 * std::arg(phi_h * std::conj(phi_v));
    const double psi_dopp = std::arg(phi_h * std::polar(1.0, phi));
    m.phidp_rad = phi;
    m.v_ms = v_nyq_ms * psi_dopp / kPi;
    m.psi_h_rad = psi_dopp;
    m.psi_v_rad = std::arg(phi_v * std::polar(1.0, -phi));
    m.z_dbz = 10.0 * std::log10(0.5 * (sh + sv));
    m.zdr_db = 10.0 * std::log10(sh / sv);

    // width from the same-pol two-PRI lag pair (Gaussian correlation model)
    const double r2mag = 0.5 * (std::abs(rh2) + std::abs(rv2));
    const double ratio = 0.5 * (sh + sv) / r2mag;
    double logr = std::log(ratio);
    if (!(logr > 0.0)) {
        logr = 0.0;
        m.width_clamped = true;
    }
    const double prt = block.sample_interval_s;
    const double lambda = 4.0 * v_nyq_ms * prt;
    m.w_ms = lambda / (4.0 * kPi * prt) * std::sqrt(logr / 2.0);

    // rho_hv: lag-1 magnitude estimator, corrected for signal decorrelation at
    // one PRI via the lag-2 ratio (rho(T) = rho(2T)^(1/4) for a Gaussian spectrum)
    const double rho2 = 0.5 * (std::abs(rh2) / sh + std::abs(rv2) / sv);
    const double rho1 = std::pow(std::clamp(rho2, 1e-12, 1.0), 0.25);
    double rhohv = 0.5 * (std::abs(phi_h) + std::abs(phi_v)) / (std::sqrt(sh * sv) * rho1);
    if (rhohv > 1.0 || rhohv < 0.0) {
        rhohv = std::clamp(rhohv, 0.0, 1.0);
        m.rhohv_clamped = true;
    }
    m.rhohv = rhohv;

    m.snr_db = noise > 0.0 ? 10.0 * std::log10(0.5 * (sh + sv) / noise)
                           : std::numeric_limits<double>::infinity();
    m.ncp = (std::abs(phi_h) + std::abs(phi_v)) / (rh0.real() + rv0.real());
    return m;
}

CovarianceSet quadrant_covariances(const IQBlock& block, std::size_t gate) {
    if (block.scheme_kind != SchemeKind::kQuadrantMimo) {
        throw std::invalid_argument("quadrant_covariances: block is not quadrant MIMO");
    }
    if (block.n_pulses < 20) {
        throw std::invalid_argument(
            "quadrant_covariances: need at least 20 pulses for the lag-4 estimates");
    }
    const std::vector<std::complex<double>> s = block.gate_series(gate);
    const std::span<const std::complex<double>> sp(s);
    CovarianceSet cov;
    for (int q = 1; q <= 4; ++q) {
        for (int lag : {0, 1, 3, 4}) {
            const auto offset = static_cast<std::size_t>(q - 1);
            const std::complex<double> v = autocovariance(sp, lag, 4, offset);
            const std::size_t pairs = (s.size() - offset - static_cast<std::size_t>(lag) + 3) / 4;
            cov.set(q, lag, v, pairs);
        }
    }
    return cov;
}

DopplerEstimate mimo_doppler(const CovarianceSet& cov, double v_nyq_base_ms) {
    int pairs_present = 0;
    for (int q = 1; q <= 4; ++q) {
        const int qn = q % 4 + 1;
        if (cov.has(q, 1) && cov.has(qn, 3)) {
            ++pairs_present;
        }
    }
    if (pairs_present < 2) {
        throw std::invalid_argument("mimo_doppler: need lags 1 and 3 for at least two pairs");
    }

    // coarse: phase offsets +phi1/-phi1 cancel in the complex mean of R_q[1],
    // leaving exactly -psi/4 for |phi1| < pi/2
    std::complex<double> lag1_mean{0.0, 0.0};
    for (int q = 1; q <= 4; ++q) {
        if (cov.has(q, 1)) {
            lag1_mean += cov.at(q, 1);
        }
    }
    const double psi_coarse = -4.0 * std::arg(lag1_mean);

    // fine: adjacent-pair products cancel the offsets and give psi modulo 2*pi
    DopplerEstimate est;
    std::complex<double> pair_mean{0.0, 0.0};
    std::vector<double> pair_fine;
    for (int q = 1; q <= 4; ++q) {
        const int qn = q % 4 + 1;
        if (!cov.has(q, 1) || !cov.has(qn, 3)) {
            continue;
        }
        const std::complex<double> p = cov.at(q, 1) * cov.at(qn, 3);
        const std::complex<double> unit = p / std::abs(p);
        pair_mean += unit;
        pair_fine.push_back(-std::arg(unit));
    }
    const double fine = -std::arg(pair_mean);
    const double psi = fine + 2.0 * kPi * std::round((psi_coarse - fine) / (2.0 * kPi));

    double max_spread = 0.0;
    for (std::size_t i = 0; i < pair_fine.size(); ++i) {
        max_spread = std::max(max_spread, std::abs(wrap_pi(pair_fine[i] - fine)));
        est.pair_psi_rad[i] =
            pair_fine[i] + 2.0 * kPi * std::round((psi_coarse - pair_fine[i]) / (2.0 * kPi));
    }
    est.ambiguous = max_spread > kPi / 2.0;
    est.psi_rad = psi;
    est.v_ms = v_nyq_base_ms * psi / kPi;
    return est;
}

double single_quadrant_velocity(const CovarianceSet& cov, double v_nyq_base_ms) {
    std::complex<double> r4{0.0, 0.0};
    int found = 0;
    for (int q = 1; q <= 4; ++q) {
        if (cov.has(q, 4)) {
            r4 += cov.at(q, 4);
            ++found;
        }
    }
    if (found == 0) {
        throw std::invalid_argument("single_quadrant_velocity: lag-4 estimates missing");
    }
    return v_nyq_base_ms * (-std::arg(r4)) / kPi;
}

WidthEstimate mimo_width(const CovarianceSet& cov, double v_nyq_ms) {
    double log_num = 0.0, log_den = 0.0;
    for (int q = 1; q <= 4; ++q) {
        if (!cov.has(q, 0) || !cov.has(q, 4)) {
            throw std::invalid_argument("mimo_width: lags 0 and 4 required for all quadrants");
        }
        const double r0 = cov.at(q, 0).real();
        const double r4 = std::abs(cov.at(q, 4));
        if (!(r4 > 0.0)) {
            throw std::invalid_argument("mimo_width: |R_q[4]| is zero");
        }
        if (!(r0 > 0.0)) {
            throw std::invalid_argument("mimo_width: R_q[0] is not positive");
        }
        log_num += std::log(r0);
        log_den += std::log(r4);
    }
    WidthEstimate est;
    est.sigma2 = log_num - log_den;
    if (est.sigma2 < 0.0) {
        est.sigma2 = 0.0;
        est.clamped = true;
    }
    est.w_ms = v_nyq_ms * std::sqrt(est.sigma2) / (2.0 * kPi);
    return est;
}

double mimo_reflectivity_dbz(const CovarianceSet& cov, double radar_constant,
                             bool subtract_noise, double noise_power) {
    double sum = 0.0;
    for (int q = 1; q <= 4; ++q) {
        if (!cov.has(q, 0)) {
            throw std::invalid_argument("mimo_reflectivity: R_q[0] required for all quadrants");
        }
        sum += cov.at(q, 0).real();
    }
    double z = sum / 4.0;
    if (subtract_noise) {
        z -= noise_power;
    }
    if (!(z > 0.0)) {
        throw std::invalid_argument("mimo_reflectivity: non-positive power after correction");
    }
    return 10.0 * std::log10(z * radar_constant);
}

MomentSet quadrant_mimo_moments(const IQBlock& block, std::size_t gate,
                                double radar_constant) {
    const CovarianceSet cov = quadrant_covariances(block, gate);
    MomentSet m;
    const DopplerEstimate dop = mimo_doppler(cov, block.v_nyq_base_ms);
    const WidthEstimate width = mimo_width(cov, block.v_nyq_base_ms);
    m.v_ms = dop.v_ms;
    m.w_ms = width.w_ms;
    m.width_clamped = width.clamped;
    m.z_dbz = mimo_reflectivity_dbz(cov, radar_constant);
    m.phidp_rad = kNaN;
    m.zdr_db = kNaN;
    m.rhohv = kNaN;
    double p0 = 0.0;
    std::complex<double> r1{0.0, 0.0};
    for (int q = 1; q <= 4; ++q) {
        p0 += cov.at(q, 0).real();
        r1 += cov.at(q, 1);
    }
    m.ncp = std::abs(r1) / p0;
    const double noise = block.noise_power;
    m.snr_db = noise > 0.0 ? 10.0 * std::log10(std::max(p0 / 4.0 - noise, 1e-300) / noise)
                           : std::numeric_limits<double>::infinity();
    return m;
}

double power_variance_model(const VarianceModelInput& in) {
    if (in.n == 0 || in.rho_p.size() < in.n) {
        throw std::invalid_argument("power_variance_model: need rho_p for lags 0..n-1");
    }
    if (in.rho_p[0] != 1.0) {
        throw std::invalid_argument("power_variance_model: rho_p[0] must equal 1");
    }
    for (std::size_t l = 0; l < in.n; ++l) {
        if (std::abs(in.rho_p[l]) > 1.0 + 1e-12) {
            throw std::invalid_argument("power_variance_model: |rho_p| must be <= 1");
        }
    }
    const double n = static_cast<double>(in.n);
    double sum = 1.0; // l == 0 term
    for (std::size_t l = 1; l < in.n; ++l) {
        sum += 2.0 * (1.0 - static_cast<double>(l) / n) * in.rho_p[l];
    }
    return in.mean_power * in.mean_power / n * sum;
}

std::vector<double> gaussian_power_correlation(std::size_t n, double width_ms, double prt_s,
                                               double wavelength_m) {
    std::vector<double> rho(n);
    const double c = 16.0 * kPi * kPi * width_ms * width_ms * prt_s * prt_s /
                     (wavelength_m * wavelength_m);
    for (std::size_t l = 0; l < n; ++l) {
        rho[l] = std::exp(-c * static_cast<double>(l * l));
    }
    return rho;
}

void write_moments_csv_header(std::ostream& os) {
    os << "gate,z_dbz,v_ms,w_ms,phidp_rad,zdr_db,rhohv,snr_db,ncp\n";
}

void write_moments_csv_row(std::ostream& os, std::size_t gate, const MomentSet& m) {
    os << gate << ',' << csv::num(m.z_dbz) << ',' << csv::num(m.v_ms) << ','
       << csv::num(m.w_ms) << ',' << csv::num(m.phidp_rad) << ',' << csv::num(m.zdr_db)
       << ',' << csv::num(m.rhohv) << ',' << csv::num(m.snr_db) << ',' << csv::num(m.ncp)
       << '\n';
}

} // namespace wxmimo
