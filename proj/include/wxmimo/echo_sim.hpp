// SPDX-License-Identifier: Apache-2.0
//
// Weather IQ time-series generation (spectral method: random-phase shaping of a
// Gaussian Doppler spectrum, inverse transform) and the two pulsing schemes:
// alternating H/V polarization and four-quadrant staggered MIMO at PRI/4.

#ifndef WXMIMO_ECHO_SIM_HPP
#define WXMIMO_ECHO_SIM_HPP

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "wxmimo/profile.hpp"

namespace wxmimo {

struct WeatherScene {
    double mean_power = 1.0;        // linear, horizontal channel
    double velocity_ms = 0.0;       // unrestricted; aliasing is exhibited, not prevented
    double spectrum_width_ms = 1.0; // > 0
    std::optional<double> snr_db;   // absent = noise-free
    double rho_hv = 1.0;            // [0, 1]
    double zdr_db = 0.0;
    double phidp_rad = 0.0;
};

enum class SchemeKind { kAlternatingPol, kQuadrantMimo };

// Whether the four quadrants observe one common scattering volume (coherent
// across quadrants; the Doppler-extension experiments) or four independent
// realizations (the sample-averaging experiments).
enum class QuadrantSamples { kCommonVolume, kIndependent };

struct PulsingScheme {
    SchemeKind kind = SchemeKind::kAlternatingPol;
    double pri_s = 1e-3;
    int n_pulses = 0;                      // quadrant_mimo: divisible by 4
    double phi1_rad = 0.0;                 // adjacent-quadrant pair offset, applied +phi1/-phi1
    std::optional<double> leakage_db;      // cross-quadrant separation residual; absent = perfect
    QuadrantSamples quadrant_samples = QuadrantSamples::kCommonVolume;
    std::uint64_t seed = 0;
};

enum class PulseLabel : std::uint8_t { kH, kV, kQ1, kQ2, kQ3, kQ4 };

const char* to_string(PulseLabel label);
PulseLabel pulse_label_from_string(const std::string& s);

struct IQBlock {
    std::size_t n_pulses = 0;
    std::size_t n_gates = 0;
    std::vector<std::complex<double>> samples; // pulse-major: samples[p*n_gates + g]
    std::vector<PulseLabel> labels;            // per pulse
    std::vector<double> timestamps_s;          // per pulse
    SchemeKind scheme_kind = SchemeKind::kAlternatingPol;
    double sample_interval_s = 0.0;            // pulse-to-pulse spacing
    double v_nyq_base_ms = 0.0;                // wavelength / (4 * pri)
    double noise_power = 0.0;                  // per-channel linear (0 when noise-free)
    bool width_warning = false;                // spectrum width > Nyquist band / 3

    std::complex<double>& at(std::size_t pulse, std::size_t gate) {
        return samples[pulse * n_gates + gate];
    }
    const std::complex<double>& at(std::size_t pulse, std::size_t gate) const {
        return samples[pulse * n_gates + gate];
    }
    std::vector<std::complex<double>> gate_series(std::size_t gate) const;
};

struct SeriesResult {
    std::vector<std::complex<double>> samples;
    double noise_power = 0.0;
    bool width_warning = false;
};

// Stationary complex-Gaussian series whose power spectrum is Gaussian centered
// at 2*velocity/lambda with std dev 2*width/lambda, total signal power
// scene.mean_power, plus white noise at scene.snr_db. n >= 8.
SeriesResult gaussian_spectrum_series(std::size_t n, const WeatherScene& scene,
                                      double sample_interval_s, double wavelength_m,
                                      std::uint64_t seed);

// Even pulses horizontal (first pulse H), odd vertical. H and V share the
// configured correlation, power ratio and differential phase. Gates are
// independent realizations with seeds derived from scheme.seed.
IQBlock simulate_alternating_pol(const WeatherScene& scene, const PulsingScheme& scheme,
                                 std::size_t gates, double wavelength_m);

// Pulse n comes from quadrant (n mod 4)+1 at spacing PRI/4. Common-volume mode
// samples one process at PRI/4; independent mode gives each quadrant its own
// realization at PRI spacing. Quadrant q carries the deterministic phase
// pattern [0, phi1, 0, phi1]; leakage adds scaled copies of the other
// quadrants' returns at the configured level.
IQBlock simulate_quadrant_mimo(const WeatherScene& scene, const PulsingScheme& scheme,
                               std::size_t gates, double wavelength_m);

// Scene whose mean power follows the profile at the nearest 0.02-deg sample;
// remaining fields copied from `defaults`.
WeatherScene scene_from_profile(const ReflectivityProfile& profile, double azimuth_deg,
                                const WeatherScene& defaults);

void write_iq_csv(std::ostream& os, const IQBlock& block);
IQBlock read_iq_csv(std::istream& is);

} // namespace wxmimo

#endif
