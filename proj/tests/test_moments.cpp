// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "wxmimo/constants.hpp"
#include "wxmimo/echo_sim.hpp"
#include "wxmimo/moments.hpp"

using namespace wxmimo;

namespace {

constexpr double kLambda = 0.0319;
constexpr double kPri = 1e-3;

IQBlock alt_block(const WeatherScene& scene, int n_pulses, std::uint64_t seed) {
    PulsingScheme scheme;
    scheme.kind = SchemeKind::kAlternatingPol;
    scheme.pri_s = kPri;
    scheme.n_pulses = n_pulses;
    scheme.seed = seed;
    return simulate_alternating_pol(scene, scheme, 1, kLambda);
}

IQBlock mimo_block(const WeatherScene& scene, int n_pulses, std::uint64_t seed,
                   double phi1 = 0.0,
                   QuadrantSamples qs = QuadrantSamples::kCommonVolume) {
    PulsingScheme scheme;
    scheme.kind = SchemeKind::kQuadrantMimo;
    scheme.pri_s = kPri;
    scheme.n_pulses = n_pulses;
    scheme.phi1_rad = phi1;
    scheme.quadrant_samples = qs;
    scheme.seed = seed;
    return simulate_quadrant_mimo(scene, scheme, 1, kLambda);
}

std::vector<std::complex<double>> tone(std::size_t n, double step_rad,
                                       std::complex<double> amp = {1.0, 0.0}) {
    std::vector<std::complex<double>> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = amp * std::polar(1.0, step_rad * static_cast<double>(i));
    }
    return s;
}

IQBlock block_from_series(const std::vector<std::complex<double>>& s) {
    IQBlock b;
    b.n_pulses = s.size();
    b.n_gates = 1;
    b.samples = s;
    b.scheme_kind = SchemeKind::kQuadrantMimo;
    b.sample_interval_s = kPri / 4.0;
    b.v_nyq_base_ms = kLambda / (4.0 * kPri);
    b.labels.resize(s.size());
    b.timestamps_s.resize(s.size());
    for (std::size_t p = 0; p < s.size(); ++p) {
        b.labels[p] = static_cast<PulseLabel>(static_cast<int>(PulseLabel::kQ1) + p % 4);
        b.timestamps_s[p] = static_cast<double>(p) * b.sample_interval_s;
    }
    return b;
}

} // namespace

TEST_CASE("autocovariance primitive") {
    // constant series: |c|^2 at every lag
    const std::vector<std::complex<double>> c(64, {3.0, -4.0});
    for (const int lag : {0, 1, 2, 5}) {
        const auto r = autocovariance(c, lag);
        CHECK(r.real() == doctest::Approx(25.0).epsilon(1e-12));
        CHECK(std::abs(r.imag()) < 1e-12);
    }

    // pure tone exp(j theta n): S[i] conj(S[i+l]) carries phase -l*theta
    const double theta = 0.31;
    const auto t = tone(128, theta, {2.0, 0.0});
    for (const int lag : {1, 2, 4}) {
        const auto r = autocovariance(t, lag);
        CHECK(std::arg(r) == doctest::Approx(-lag * theta).epsilon(1e-9));
        CHECK(std::abs(r) == doctest::Approx(4.0).epsilon(1e-12));
    }

    // random series: matches the naive double-loop oracle
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::complex<double>> s(257);
    for (auto& v : s) {
        v = {g(rng), g(rng)};
    }
    for (const std::size_t stride : {1u, 2u, 4u}) {
        for (const int lag : {-3, -1, 0, 1, 3, 4}) {
            for (const std::size_t offset : {0u, 2u}) {
                const auto got = autocovariance(s, lag, stride, offset);
                const auto want = oracles::direct_autocov(s, lag, stride, offset);
                CHECK(std::abs(got - want) < 1e-12);
            }
        }
    }

    // hermitian symmetry over the same index pairs: R[-l] at offset o+l is the
    // conjugate of R[+l] at offset o
    CHECK(std::abs(std::conj(oracles::direct_autocov(s, 3, 1, 3)) -
                   oracles::direct_autocov(s, -3, 1, 6)) < 1e-12);

    std::vector<std::complex<double>> tiny(6, {1.0, 0.0});
    CHECK_THROWS_AS(autocovariance(tiny, 4), std::invalid_argument);
}

TEST_CASE("hermitian lag symmetry on matched pair sets") {
    std::mt19937_64 rng(18);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::complex<double>> s(64);
    for (auto& v : s) {
        v = {g(rng), g(rng)};
    }
    // R[-l] over the same index pairs equals conj(R[l]): forward pairs
    // (j, j+l) for j = 0..n-1-l map to backward pairs (i, i-l) for i = l..n-1
    for (const int lag : {1, 2, 5}) {
        const auto fwd = autocovariance(s, lag, 1, 0);
        const auto bwd = autocovariance(s, -lag, 1, static_cast<std::size_t>(lag));
        CHECK(std::abs(bwd - std::conj(fwd)) < 1e-12);
    }
}

TEST_CASE("alt-pol moments: identical H and V") {
    WeatherScene scene;
    scene.mean_power = 2.0;
    scene.velocity_ms = 4.0;
    scene.spectrum_width_ms = 1.0;
    scene.rho_hv = 1.0;
    scene.zdr_db = 0.0;
    scene.phidp_rad = 0.0;
    const IQBlock block = alt_block(scene, 8192, 19);
    const MomentSet m = alt_pol_moments(block, 0, block.v_nyq_base_ms);
    CHECK(std::abs(m.phidp_rad) < 0.01);
    CHECK(std::abs(m.zdr_db) < 0.05);
    CHECK(m.rhohv > 0.99);
    CHECK_FALSE(m.degenerate);
}

TEST_CASE("alt-pol closed loop: v=0, phidp=0.3") {
    WeatherScene scene;
    scene.mean_power = 1.0;
    scene.velocity_ms = 0.0;
    scene.spectrum_width_ms = 1.0;
    scene.snr_db = 25.0;
    scene.rho_hv = 0.98;
    scene.zdr_db = 0.0;
    scene.phidp_rad = 0.3;
    double acc = 0.0;
    const int trials = 8;
    for (int t = 0; t < trials; ++t) {
        const IQBlock block = alt_block(scene, 10000, 40 + static_cast<std::uint64_t>(t));
        acc += alt_pol_moments(block, 0, block.v_nyq_base_ms).phidp_rad;
    }
    CHECK(std::abs(acc / trials - 0.3) < 0.01);
}

TEST_CASE("alt-pol closed loop: v=5, phidp=0.2, width 1, snr 25") {
    WeatherScene scene;
    scene.mean_power = 1.0;
    scene.velocity_ms = 5.0;
    scene.spectrum_width_ms = 1.0;
    scene.snr_db = 25.0;
    scene.rho_hv = 0.98;
    scene.zdr_db = 0.5;
    scene.phidp_rad = 0.2;
    double v_acc = 0.0, phi_acc = 0.0, zdr_acc = 0.0, w_acc = 0.0;
    const int trials = 10;
    for (int t = 0; t < trials; ++t) {
        const IQBlock block = alt_block(scene, 10000, 60 + static_cast<std::uint64_t>(t));
        const MomentSet m = alt_pol_moments(block, 0, block.v_nyq_base_ms);
        v_acc += m.v_ms;
        phi_acc += m.phidp_rad;
        zdr_acc += m.zdr_db;
        w_acc += m.w_ms;
    }
    CHECK(std::abs(v_acc / trials - 5.0) < 0.3);
    CHECK(std::abs(phi_acc / trials - 0.2) < 0.03);
    CHECK(std::abs(zdr_acc / trials - 0.5) < 0.2);
    CHECK(w_acc / trials == doctest::Approx(1.0).epsilon(0.25));
}

TEST_CASE("alt-pol scale invariance") {
    WeatherScene scene;
    scene.mean_power = 1.0;
    scene.velocity_ms = 3.0;
    scene.spectrum_width_ms = 1.0;
    scene.rho_hv = 0.97;
    scene.zdr_db = 1.0;
    scene.phidp_rad = 0.25;
    IQBlock block = alt_block(scene, 4096, 91);
    const MomentSet base = alt_pol_moments(block, 0, block.v_nyq_base_ms);
    const std::complex<double> c{1.3, -2.1};
    for (auto& v : block.samples) {
        v *= c;
    }
    const MomentSet scaled = alt_pol_moments(block, 0, block.v_nyq_base_ms);
    CHECK(scaled.z_dbz == doctest::Approx(base.z_dbz + 10.0 * std::log10(std::norm(c)))
                              .epsilon(1e-9));
    CHECK(scaled.v_ms == doctest::Approx(base.v_ms).epsilon(1e-9));
    CHECK(scaled.w_ms == doctest::Approx(base.w_ms).epsilon(1e-9));
    CHECK(scaled.phidp_rad == doctest::Approx(base.phidp_rad).epsilon(1e-9));
    CHECK(scaled.rhohv == doctest::Approx(base.rhohv).epsilon(1e-9));
}

TEST_CASE("alt-pol psi diagnostics agree across polarizations") {
    WeatherScene scene;
    scene.mean_power = 1.0;
    scene.velocity_ms = 4.0;
    scene.spectrum_width_ms = 1.0;
    scene.snr_db = 30.0;
    scene.rho_hv = 0.99;
    scene.phidp_rad = 0.4;
    const IQBlock block = alt_block(scene, 8192, 23);
    const MomentSet m = alt_pol_moments(block, 0, block.v_nyq_base_ms);
    CHECK(m.psi_h_rad == doctest::Approx(m.psi_v_rad).epsilon(0.05));
    CHECK(m.v_ms == doctest::Approx(block.v_nyq_base_ms * m.psi_h_rad / kPi).epsilon(1e-12));
}

TEST_CASE("mimo scale invariance") {
    WeatherScene scene;
    scene.mean_power = 1.0;
    scene.velocity_ms = 9.0;
    scene.spectrum_width_ms = 1.5;
    scene.snr_db = 25.0;
    IQBlock block = mimo_block(scene, 4096, 417, kPi / 8.0);
    const MomentSet base = quadrant_mimo_moments(block, 0);
    const std::complex<double> c{0.6, 1.9};
    for (auto& v : block.samples) {
        v *= c;
    }
    const MomentSet scaled = quadrant_mimo_moments(block, 0);
    CHECK(scaled.z_dbz ==
          doctest::Approx(base.z_dbz + 10.0 * std::log10(std::norm(c))).epsilon(1e-9));
    CHECK(scaled.v_ms == doctest::Approx(base.v_ms).epsilon(1e-9));
    CHECK(scaled.w_ms == doctest::Approx(base.w_ms).epsilon(1e-9));
}

TEST_CASE("alt-pol degenerate flag on a zero-power stream") {
    IQBlock block;
    block.scheme_kind = SchemeKind::kAlternatingPol;
    block.n_pulses = 64;
    block.n_gates = 1;
    block.sample_interval_s = kPri;
    block.v_nyq_base_ms = kLambda / (4.0 * kPri);
    block.samples.resize(64);
    block.labels.resize(64);
    block.timestamps_s.resize(64);
    for (std::size_t p = 0; p < 64; ++p) {
        block.labels[p] = (p % 2 == 0) ? PulseLabel::kH : PulseLabel::kV;
        block.samples[p] = p % 2 == 0 ? std::complex<double>{1.0, 0.5}
                                      : std::complex<double>{0.0, 0.0};
    }
    const MomentSet m = alt_pol_moments(block, 0, block.v_nyq_base_ms);
    CHECK(m.degenerate);
}

TEST_CASE("quadrant covariances: tone and oracle") {
    const double theta = 0.4;
    const auto s = tone(512, theta);
    const IQBlock block = block_from_series(s);
    const CovarianceSet cov = quadrant_covariances(block, 0);
    for (int q = 1; q <= 4; ++q) {
        CHECK(std::abs(std::arg(cov.at(q, 1))) == doctest::Approx(theta).epsilon(1e-9));
        const double a4 = std::abs(std::arg(cov.at(q, 4)));
        CHECK(a4 == doctest::Approx(std::abs(std::remainder(4.0 * theta, 2.0 * kPi)))
                        .epsilon(1e-9));
    }

    // random block equals the naive per-quadrant oracle
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::complex<double>> r(512);
    for (auto& v : r) {
        v = {g(rng), g(rng)};
    }
    const IQBlock rb = block_from_series(r);
    const CovarianceSet rc = quadrant_covariances(rb, 0);
    for (int q = 1; q <= 4; ++q) {
        for (const int lag : {0, 1, 3, 4}) {
            const auto want =
                oracles::direct_autocov(r, lag, 4, static_cast<std::size_t>(q - 1));
            CHECK(std::abs(rc.at(q, lag) - want) < 1e-12);
        }
    }

    const auto tiny = tone(16, 0.1);
    CHECK_THROWS_AS(quadrant_covariances(block_from_series(tiny), 0), std::invalid_argument);
}

TEST_CASE("phase offsets cancel in the adjacent-pair product at zero velocity") {
    WeatherScene scene;
    scene.mean_power = 1.0;
    scene.velocity_ms = 0.0;
    scene.spectrum_width_ms = 1.0;
    scene.snr_db = 30.0;
    const IQBlock block = mimo_block(scene, 8192, 5, kPi / 5.0);
    const CovarianceSet cov = quadrant_covariances(block, 0);
    CHECK(std::abs(std::arg(cov.at(1, 1) * cov.at(2, 3))) < 0.02);
    const DopplerEstimate est = mimo_doppler(cov, block.v_nyq_base_ms);
    CHECK(std::abs(est.psi_rad) < 0.02);
}

TEST_CASE("mimo doppler: 3x nyquist recovery while lag-4 aliases") {
    const double v_nyq = kLambda / (4.0 * kPri);
    const double v_true = 3.0 * v_nyq;
    WeatherScene scene;
    scene.mean_power = 1.0;
    scene.velocity_ms = v_true;
    scene.spectrum_width_ms = 1.0;
    scene.snr_db = 25.0;
    double mimo_acc = 0.0, lag4_acc = 0.0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
        const IQBlock block = mimo_block(scene, 4096, 300 + static_cast<std::uint64_t>(t));
        const CovarianceSet cov = quadrant_covariances(block, 0);
        mimo_acc += mimo_doppler(cov, block.v_nyq_base_ms).v_ms;
        lag4_acc += single_quadrant_velocity(cov, block.v_nyq_base_ms);
    }
    CHECK(std::abs(mimo_acc / trials - v_true) < 0.1 * v_nyq);
    CHECK(std::abs(lag4_acc / trials - v_true) > v_nyq);
}

TEST_CASE("mimo doppler: phase-offset immunity") {
    const double v_nyq = kLambda / (4.0 * kPri);
    WeatherScene scene;
    scene.mean_power = 1.0;
    scene.velocity_ms = 1.7 * v_nyq;
    scene.spectrum_width_ms = 1.0;
    scene.snr_db = 25.0;
    std::vector<double> means;
    for (const double phi1 : {0.0, kPi / 6.0, kPi / 3.0, -kPi / 4.0}) {
        double acc = 0.0;
        const int trials = 12;
        for (int t = 0; t < trials; ++t) {
            const IQBlock block =
                mimo_block(scene, 4096, 500 + static_cast<std::uint64_t>(t), phi1);
            const CovarianceSet cov = quadrant_covariances(block, 0);
            acc += mimo_doppler(cov, block.v_nyq_base_ms).v_ms;
        }
        means.push_back(acc / 12.0);
    }
    for (const double m : means) {
        CHECK(std::abs(m - means.front()) < 0.02 * v_nyq);
    }
}

TEST_CASE("mimo doppler: inconsistent pair phases raise the ambiguity flag") {
    CovarianceSet cov;
    // lag-1 phases alternate while lag-3 stays flat, so the four adjacent-pair
    // products disagree by 1.6 rad, well past the pi/2 spread limit
    for (int q = 1; q <= 4; ++q) {
        cov.set(q, 1, std::polar(1.0, q % 2 == 1 ? -0.1 : 1.5), 64);
        cov.set(q, 3, std::polar(1.0, 0.0), 64);
    }
    const DopplerEstimate est = mimo_doppler(cov, 8.0);
    CHECK(est.ambiguous);

    CovarianceSet consistent;
    for (int q = 1; q <= 4; ++q) {
        consistent.set(q, 1, std::polar(1.0, -0.2), 64);
        consistent.set(q, 3, std::polar(1.0, -0.6), 64);
    }
    CHECK_FALSE(mimo_doppler(consistent, 8.0).ambiguous);

    CovarianceSet sparse;
    sparse.set(1, 1, std::polar(1.0, -0.2), 64);
    CHECK_THROWS_AS(mimo_doppler(sparse, 8.0), std::invalid_argument);
}

TEST_CASE("mimo doppler: pair averaging reduces the variance") {
    WeatherScene scene;
    scene.mean_power = 1.0;
    scene.velocity_ms = 4.0;
    scene.spectrum_width_ms = 2.0;
    scene.snr_db = 10.0;
    std::vector<double> avg_est, single_est;
    for (int t = 0; t < 200; ++t) {
        const IQBlock block = mimo_block(scene, 1024, 900 + static_cast<std::uint64_t>(t));
        const CovarianceSet cov = quadrant_covariances(block, 0);
        const DopplerEstimate est = mimo_doppler(cov, block.v_nyq_base_ms);
        avg_est.push_back(est.psi_rad);
        single_est.push_back(est.pair_psi_rad[0]);
    }
    CHECK(oracles::variance(avg_est) < oracles::variance(single_est));
}

TEST_CASE("mimo width: tone gives zero, monotone in true width, literal-form bias") {
    const auto s = tone(512, 0.2);
    const CovarianceSet cov = quadrant_covariances(block_from_series(s), 0);
    const WidthEstimate tone_est = mimo_width(cov, kLambda / (4.0 * kPri));
    CHECK(tone_est.sigma2 == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(tone_est.w_ms == doctest::Approx(0.0).epsilon(1e-6));

    WeatherScene scene;
    scene.mean_power = 1.0;
    scene.velocity_ms = 3.0;
    scene.snr_db = 30.0;
    double prev = -1.0;
    for (const double w : {1.0, 2.0, 4.0}) {
        scene.spectrum_width_ms = w;
        double acc = 0.0;
        const int trials = 10;
        for (int t = 0; t < trials; ++t) {
            const IQBlock block =
                mimo_block(scene, 8192, 1300 + static_cast<std::uint64_t>(t));
            acc += mimo_width(quadrant_covariances(block, 0), block.v_nyq_base_ms).w_ms;
        }
        const double est = acc / trials;
        CHECK(est > prev);
        // the literal form runs ~1/sqrt(2) low against the configured width
        CHECK(est / w == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.06));
        prev = est;
    }

    CovarianceSet degenerate;
    for (int q = 1; q <= 4; ++q) {
        degenerate.set(q, 0, {1.0, 0.0}, 16);
        degenerate.set(q, 4, {0.0, 0.0}, 16);
    }
    CHECK_THROWS_AS(mimo_width(degenerate, 1.0), std::invalid_argument);

    CovarianceSet inflated;
    for (int q = 1; q <= 4; ++q) {
        inflated.set(q, 0, {1.0, 0.0}, 16);
        inflated.set(q, 4, {1.5, 0.0}, 16);
    }
    const WidthEstimate clamped = mimo_width(inflated, 1.0);
    CHECK(clamped.clamped);
    CHECK(clamped.w_ms == 0.0);
}

TEST_CASE("mimo reflectivity") {
    CovarianceSet cov;
    for (int q = 1; q <= 4; ++q) {
        cov.set(q, 0, {2.5, 0.0}, 32);
    }
    CHECK(mimo_reflectivity_dbz(cov, 1.0) == doctest::Approx(10.0 * std::log10(2.5)));
    // doubling the radar constant shifts the result by +3.01 dB
    CHECK(mimo_reflectivity_dbz(cov, 2.0) - mimo_reflectivity_dbz(cov, 1.0) ==
          doctest::Approx(10.0 * std::log10(2.0)).epsilon(1e-12));
    CHECK(mimo_reflectivity_dbz(cov, 1.0, true, 0.5) ==
          doctest::Approx(10.0 * std::log10(2.0)));
}

TEST_CASE("independent-quadrant averaging approaches the 1/4 variance ratio") {
    WeatherScene scene;
    scene.mean_power = 1.0;
    scene.velocity_ms = 2.0;
    scene.spectrum_width_ms = 2.0;
    scene.snr_db = 25.0;
    std::vector<double> z_all, z_single;
    for (int t = 0; t < 300; ++t) {
        const IQBlock block = mimo_block(scene, 1024, 2200 + static_cast<std::uint64_t>(t),
                                         0.0, QuadrantSamples::kIndependent);
        const CovarianceSet cov = quadrant_covariances(block, 0);
        double sum = 0.0;
        for (int q = 1; q <= 4; ++q) {
            sum += cov.at(q, 0).real();
        }
        z_all.push_back(sum / 4.0);
        z_single.push_back(cov.at(1, 0).real());
    }
    const double ratio = oracles::variance(z_all) / oracles::variance(z_single);
    CHECK(ratio > 0.15);
    CHECK(ratio < 0.35);
}

TEST_CASE("estimator consistency: error shrinks from N=256 to N=4096") {
    WeatherScene scene;
    scene.mean_power = 1.0;
    scene.velocity_ms = 5.0;
    scene.spectrum_width_ms = 1.0;
    scene.snr_db = 25.0;
    const auto spread = [&](int n_pulses) {
        std::vector<double> est;
        for (int t = 0; t < 24; ++t) {
            const IQBlock block =
                alt_block(scene, n_pulses, 3000 + static_cast<std::uint64_t>(t));
            est.push_back(alt_pol_moments(block, 0, block.v_nyq_base_ms).v_ms);
        }
        return std::sqrt(oracles::variance(est));
    };
    const double sd_small = spread(256);
    const double sd_large = spread(4096);
    CHECK(sd_large < sd_small);
}

TEST_CASE("power variance model") {
    VarianceModelInput in;
    in.mean_power = 3.0;
    in.n = 64;
    in.rho_p.assign(64, 0.0);
    in.rho_p[0] = 1.0;
    CHECK(power_variance_model(in) == 9.0 / 64.0);

    in.rho_p.assign(64, 1.0);
    CHECK(power_variance_model(in) == doctest::Approx(9.0).epsilon(1e-12));

    in.rho_p[0] = 0.5;
    CHECK_THROWS_AS(power_variance_model(in), std::invalid_argument);
    in.rho_p[0] = 1.0;
    in.rho_p[5] = 1.5;
    CHECK_THROWS_AS(power_variance_model(in), std::invalid_argument);
}

TEST_CASE("power variance model vs monte carlo at N=64") {
    const double lambda_s = 0.1;
    WeatherScene scene;
    scene.mean_power = 1.0;
    scene.velocity_ms = 0.0;
    scene.spectrum_width_ms = 1.0;
    const std::size_t n = 64;
    std::vector<double> powers;
    for (int t = 0; t < 1500; ++t) {
        const auto r = gaussian_spectrum_series(8 * n, scene, kPri, lambda_s,
                                                7000 + static_cast<std::uint64_t>(t));
        double p = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            p += std::norm(r.samples[k]);
        }
        powers.push_back(p / static_cast<double>(n));
    }
    VarianceModelInput in;
    in.mean_power = 1.0;
    in.n = n;
    in.rho_p = gaussian_power_correlation(n, 1.0, kPri, lambda_s);
    const double mc = oracles::variance(powers);
    const double model = power_variance_model(in);
    CHECK(mc / model == doctest::Approx(1.0).epsilon(0.15));
}
