// SPDX-License-Identifier: Apache-2.0

#include "wxmimo/echo_sim.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>

#include "wxmimo/constants.hpp"
#include "wxmimo/csv.hpp"
#include "wxmimo/rng.hpp"

namespace wxmimo {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

void ifft_inplace(std::vector<std::complex<double>>& a) {
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(a.size()),
                                reinterpret_cast<fftw_complex*>(a.data()),
                                reinterpret_cast<fftw_complex*>(a.data()),
                                FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }
}

void validate_scene(const WeatherScene& scene) {
    if (!(scene.spectrum_width_ms > 0.0)) {
        throw std::invalid_argument("scene: spectrum width must be > 0");
    }
    if (!(scene.mean_power >= 0.0)) {
        throw std::invalid_argument("scene: mean power must be >= 0");
    }
    if (!(scene.rho_hv >= 0.0 && scene.rho_hv <= 1.0)) {
        throw std::invalid_argument("scene: rho_hv must lie in [0, 1]");
    }
}

// Unit-power signal-only series (no noise); shared by both pulsing schemes.
std::vector<std::complex<double>> shaped_series(std::size_t n, double velocity_ms,
                                                double width_ms, double sample_interval_s,
                                                double wavelength_m, std::uint64_t seed,
                                                bool& width_warning) {
    const double fs = 1.0 / sample_interval_s;
    const double fd = 2.0 * velocity_ms / wavelength_m;
    const double sigf = 2.0 * width_ms / wavelength_m;
    width_warning = sigf > fs / 6.0;

    Rng rng(seed);
    std::vector<std::complex<double>> a(n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double f = static_cast<double>(k) / (static_cast<double>(n) * sample_interval_s);
        if (f >= fs / 2.0) {
            f -= fs;
        }
        // wrapped distance from the spectrum center: velocities beyond the
        // Nyquist band alias instead of vanishing
        double dist = std::fmod(f - fd + fs / 2.0, fs);
        if (dist < 0.0) {
            dist += fs;
        }
        dist -= fs / 2.0;
        const double s = std::exp(-dist * dist / (2.0 * sigf * sigf));
        a[k] = std::sqrt(s) * rng.cgaussian();
        total += s;
    }
    ifft_inplace(a);
    const double scale = std::sqrt(1.0 / total);
    for (auto& v : a) {
        v *= scale;
    }
    return a;
}

void add_noise(std::vector<std::complex<double>>& s, double noise_power, Rng& rng) {
    if (noise_power <= 0.0) {
        return;
    }
    const double amp = std::sqrt(noise_power);
    for (auto& v : s) {
        v += amp * rng.cgaussian();
    }
}

constexpr std::array<const char*, 6> kLabelNames{"H", "V", "Q1", "Q2", "Q3", "Q4"};

} // namespace

const char* to_string(PulseLabel label) { return kLabelNames[static_cast<std::size_t>(label)]; }

PulseLabel pulse_label_from_string(const std::string& s) {
    for (std::size_t i = 0; i < kLabelNames.size(); ++i) {
        if (s == kLabelNames[i]) {
            return static_cast<PulseLabel>(i);
        }
    }
    throw std::invalid_argument("unknown pulse label: " + s);
}

std::vector<std::complex<double>> IQBlock::gate_series(std::size_t gate) const {
    if (gate >= n_gates) {
        throw std::invalid_argument("IQBlock: gate index out of range");
    }
    std::vector<std::complex<double>> out(n_pulses);
    for (std::size_t p = 0; p < n_pulses; ++p) {
        out[p] = at(p, gate);
    }
    return out;
}

SeriesResult gaussian_spectrum_series(std::size_t n, const WeatherScene& scene,
                                      double sample_interval_s, double wavelength_m,
                                      std::uint64_t seed) {
    if (n < 8) {
        throw std::invalid_argument("gaussian_spectrum_series: need n >= 8");
    }
    if (!(sample_interval_s > 0.0) || !(wavelength_m > 0.0)) {
        throw std::invalid_argument("gaussian_spectrum_series: interval and wavelength must be > 0");
    }
    validate_scene(scene);

    SeriesResult out;
    out.samples = shaped_series(n, scene.velocity_ms, scene.spectrum_width_ms,
                                sample_interval_s, wavelength_m, seed, out.width_warning);
    const double amp = std::sqrt(scene.mean_power);
    for (auto& v : out.samples) {
        v *= amp;
    }
    if (scene.snr_db) {
        out.noise_power = scene.mean_power / std::pow(10.0, *scene.snr_db / 10.0);
        Rng rng(seed, 0xA5);
        add_noise(out.samples, out.noise_power, rng);
    }
    return out;
}

IQBlock simulate_alternating_pol(const WeatherScene& scene, const PulsingScheme& scheme,
                                 std::size_t gates, double wavelength_m) {
    if (scheme.kind != SchemeKind::kAlternatingPol) {
        throw std::invalid_argument("simulate_alternating_pol: scheme kind mismatch");
    }
    if (scheme.n_pulses < 8) {
        throw std::invalid_argument("simulate_alternating_pol: need at least 8 pulses");
    }
    if (!(scheme.pri_s > 0.0) || gates == 0) {
        throw std::invalid_argument("simulate_alternating_pol: bad pri or gate count");
    }
    validate_scene(scene);

    const auto n = static_cast<std::size_t>(scheme.n_pulses);
    IQBlock block;
    block.n_pulses = n;
    block.n_gates = gates;
    block.samples.resize(n * gates);
    block.scheme_kind = SchemeKind::kAlternatingPol;
    block.sample_interval_s = scheme.pri_s;
    block.v_nyq_base_ms = nyquist_velocity_ms(wavelength_m, scheme.pri_s);
    block.labels.resize(n);
    block.timestamps_s.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        block.labels[p] = (p % 2 == 0) ? PulseLabel::kH : PulseLabel::kV;
        block.timestamps_s[p] = static_cast<double>(p) * scheme.pri_s;
    }

    const double ph = scene.mean_power;
    const double pv = ph * std::pow(10.0, -scene.zdr_db / 10.0);
    const double rho = scene.rho_hv;
    const std::complex<double> vphase = std::polar(1.0, scene.phidp_rad);
    if (scene.snr_db) {
        block.noise_power = ph / std::pow(10.0, *scene.snr_db / 10.0);
    }

    for (std::size_t g = 0; g < gates; ++g) {
        bool warn_a = false, warn_b = false;
        const auto a = shaped_series(n, scene.velocity_ms, scene.spectrum_width_ms,
                                     scheme.pri_s, wavelength_m,
                                     derive_seed(scheme.seed, g, 1), warn_a);
        const auto b = shaped_series(n, scene.velocity_ms, scene.spectrum_width_ms,
                                     scheme.pri_s, wavelength_m,
                                     derive_seed(scheme.seed, g, 2), warn_b);
        block.width_warning = block.width_warning || warn_a || warn_b;
        std::vector<std::complex<double>> s(n);
        const double cross = std::sqrt(1.0 - rho * rho);
        for (std::size_t p = 0; p < n; ++p) {
            if (p % 2 == 0) {
                s[p] = std::sqrt(ph) * a[p];
            } else {
                s[p] = std::sqrt(pv) * (rho * a[p] + cross * b[p]) * vphase;
            }
        }
        Rng noise_rng(scheme.seed, derive_seed(scheme.seed, g, 3));
        add_noise(s, block.noise_power, noise_rng);
        for (std::size_t p = 0; p < n; ++p) {
            block.at(p, g) = s[p];
        }
    }
    return block;
}

IQBlock simulate_quadrant_mimo(const WeatherScene& scene, const PulsingScheme& scheme,
                               std::size_t gates, double wavelength_m) {
    if (scheme.kind != SchemeKind::kQuadrantMimo) {
        throw std::invalid_argument("simulate_quadrant_mimo: scheme kind mismatch");
    }
    if (scheme.n_pulses < 8 || scheme.n_pulses % 4 != 0) {
        throw std::invalid_argument(
            "simulate_quadrant_mimo: n_pulses must be divisible by 4 and >= 8");
    }
    if (!(scheme.pri_s > 0.0) || gates == 0) {
        throw std::invalid_argument("simulate_quadrant_mimo: bad pri or gate count");
    }
    validate_scene(scene);

    const auto n = static_cast<std::size_t>(scheme.n_pulses);
    const double dt = scheme.pri_s / 4.0;
    IQBlock block;
    block.n_pulses = n;
    block.n_gates = gates;
    block.samples.resize(n * gates);
    block.scheme_kind = SchemeKind::kQuadrantMimo;
    block.sample_interval_s = dt;
    block.v_nyq_base_ms = nyquist_velocity_ms(wavelength_m, scheme.pri_s);
    block.labels.resize(n);
    block.timestamps_s.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        block.labels[p] = static_cast<PulseLabel>(static_cast<std::size_t>(PulseLabel::kQ1) +
                                                  p % 4);
        block.timestamps_s[p] = static_cast<double>(p) * dt;
    }
    if (scene.snr_db) {
        block.noise_power = scene.mean_power / std::pow(10.0, *scene.snr_db / 10.0);
    }

    // quadrant phase pattern: +phi1 / -phi1 between every adjacent pair
    const std::array<std::complex<double>, 4> eta{
        std::complex<double>{1.0, 0.0}, std::polar(1.0, scheme.phi1_rad),
        std::complex<double>{1.0, 0.0}, std::polar(1.0, scheme.phi1_rad)};
    const double eps =
        scheme.leakage_db ? std::pow(10.0, *scheme.leakage_db / 20.0) : 0.0;
    const double amp = std::sqrt(scene.mean_power);

    for (std::size_t g = 0; g < gates; ++g) {
        std::vector<std::complex<double>> s(n);
        if (scheme.quadrant_samples == QuadrantSamples::kCommonVolume) {
            bool warn = false;
            const auto z = shaped_series(n, scene.velocity_ms, scene.spectrum_width_ms, dt,
                                         wavelength_m, derive_seed(scheme.seed, g, 0), warn);
            block.width_warning = block.width_warning || warn;
            std::array<std::complex<double>, 4> gain;
            for (int q = 0; q < 4; ++q) {
                std::complex<double> leak{0.0, 0.0};
                for (int p = 0; p < 4; ++p) {
                    if (p != q) {
                        leak += eta[p];
                    }
                }
                gain[q] = eta[q] + eps * leak;
            }
            for (std::size_t p = 0; p < n; ++p) {
                s[p] = amp * z[p] * gain[p % 4];
            }
        } else {
            std::array<std::vector<std::complex<double>>, 4> z;
            for (int q = 0; q < 4; ++q) {
                bool warn = false;
                z[q] = shaped_series(n / 4, scene.velocity_ms, scene.spectrum_width_ms,
                                     scheme.pri_s, wavelength_m,
                                     derive_seed(scheme.seed, g, 16 + q), warn);
                block.width_warning = block.width_warning || warn;
            }
            for (std::size_t p = 0; p < n; ++p) {
                const std::size_t m = p / 4;
                const int q = static_cast<int>(p % 4);
                std::complex<double> v = z[q][m] * eta[q];
                if (eps > 0.0) {
                    for (int o = 0; o < 4; ++o) {
                        if (o != q) {
                            v += eps * z[o][m] * eta[o];
                        }
                    }
                }
                s[p] = amp * v;
            }
        }
        Rng noise_rng(scheme.seed, derive_seed(scheme.seed, g, 3));
        add_noise(s, block.noise_power, noise_rng);
        for (std::size_t p = 0; p < n; ++p) {
            block.at(p, g) = s[p];
        }
    }
    return block;
}

WeatherScene scene_from_profile(const ReflectivityProfile& profile, double azimuth_deg,
                                const WeatherScene& defaults) {
    WeatherScene scene = defaults;
    scene.mean_power = std::pow(10.0, profile.value_at(azimuth_deg) / 10.0);
    return scene;
}

void write_iq_csv(std::ostream& os, const IQBlock& block) {
    os << "pulse_index,gate_index,re,im,label\n";
    for (std::size_t p = 0; p < block.n_pulses; ++p) {
        for (std::size_t g = 0; g < block.n_gates; ++g) {
            const auto& v = block.at(p, g);
            os << p << ',' << g << ',' << csv::num(v.real()) << ',' << csv::num(v.imag())
               << ',' << to_string(block.labels[p]) << '\n';
        }
    }
}

IQBlock read_iq_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("pulse_index", 0) != 0) {
        throw std::invalid_argument("iq csv: missing pulse_index header");
    }
    std::map<std::pair<std::size_t, std::size_t>, std::complex<double>> cells;
    std::map<std::size_t, PulseLabel> labels;
    std::size_t max_p = 0, max_g = 0;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = csv::split_line(line);
        if (f.size() != 5) {
            throw std::invalid_argument("iq csv: expected 5 columns");
        }
        const auto p = static_cast<std::size_t>(std::stoull(f[0]));
        const auto g = static_cast<std::size_t>(std::stoull(f[1]));
        cells[{p, g}] = {std::stod(f[2]), std::stod(f[3])};
        labels[p] = pulse_label_from_string(f[4]);
        max_p = std::max(max_p, p);
        max_g = std::max(max_g, g);
    }
    if (cells.empty()) {
        throw std::invalid_argument("iq csv: no samples");
    }
    IQBlock block;
    block.n_pulses = max_p + 1;
    block.n_gates = max_g + 1;
    if (cells.size() != block.n_pulses * block.n_gates) {
        throw std::invalid_argument("iq csv: missing (pulse, gate) cells");
    }
    block.samples.resize(block.n_pulses * block.n_gates);
    block.labels.resize(block.n_pulses);
    block.timestamps_s.assign(block.n_pulses, 0.0);
    for (const auto& [key, v] : cells) {
        block.samples[key.first * block.n_gates + key.second] = v;
    }
    for (const auto& [p, l] : labels) {
        block.labels[p] = l;
    }
    block.scheme_kind = (block.labels[0] == PulseLabel::kH || block.labels[0] == PulseLabel::kV)
                            ? SchemeKind::kAlternatingPol
                            : SchemeKind::kQuadrantMimo;
    return block;
}

} // namespace wxmimo
