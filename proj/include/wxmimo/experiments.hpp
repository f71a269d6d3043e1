// SPDX-License-Identifier: Apache-2.0
//
// Beam-convolution reflectivity reconstruction, variance-versus-samples
// curves, volume scan-time accounting, and the width-estimator calibration.

#ifndef WXMIMO_EXPERIMENTS_HPP
#define WXMIMO_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "wxmimo/beampattern.hpp"
#include "wxmimo/echo_sim.hpp"
#include "wxmimo/profile.hpp"

namespace wxmimo {

enum class ReconMode { kPatternWeighting, kFullTimeseries };

struct ReconParams {
    ReconMode mode = ReconMode::kPatternWeighting;
    double step_deg = 1.0;
    int n_pulses = 10000;       // full_timeseries only
    WeatherScene cell_scene;    // per-cell velocity/width/SNR defaults (power from profile)
    double pri_s = 1e-3;
    double wavelength_m = 0.0318;
    std::uint64_t seed = 0;
};

struct ReconstructionResult {
    std::string beam_label;
    double beam_hpbw_deg = 0.0;
    std::vector<double> scan_az_deg;
    std::vector<double> reconstructed_dbz;
    std::vector<double> error_db; // reconstructed - true at the beam center
    double rmse_db = 0.0;
};

// Scan the two-way beam across the profile in `step_deg` increments, beam
// footprint truncated at the first nulls. pattern_weighting forms
// sum(pattern * P) / sum(pattern) over the footprint directly;
// full_timeseries first simulates every 0.02-deg cell as a pulse train,
// power-averages along pulses, then applies the same weighting.
ReconstructionResult reconstruct_profile(const ReflectivityProfile& profile,
                                         const BeamPattern& two_way, const ReconParams& params,
                                         const std::string& label);

struct VariancePoint {
    std::size_t n = 0;
    double sd_db_mc = 0.0;
    double sd_db_model = 0.0;
    double var_lin_mc = 0.0;
    double var_lin_model = 0.0;
};

// Monte-Carlo standard deviation of the dB-scale mean-power estimate vs N,
// next to the triangular-window model prediction. Blocks are sliced from an
// 8N-sample realization so their correlation is effectively linear, matching
// the model's stationarity assumption. trials >= 100.
std::vector<VariancePoint> variance_vs_samples(const WeatherScene& scene,
                                               std::span<const std::size_t> n_list,
                                               double pri_s, double wavelength_m,
                                               std::size_t trials, std::uint64_t seed);

// ceil(sector/beamwidth) * dwell / simultaneous_beams
double scan_time_s(double sector_deg, double beamwidth_deg, double dwell_s,
                   int simultaneous_beams);

struct WidthBiasRow {
    double true_width_ms = 0.0;
    double mean_estimate_ms = 0.0;
    double ratio = 0.0;
};

// Monte-Carlo characterization of the literal spectral-width estimator against
// the configured truth; shipped as data/mimo_width_bias.csv.
std::vector<WidthBiasRow> width_bias_table(std::span<const double> widths_ms, double pri_s,
                                           double wavelength_m, std::size_t trials,
                                           int n_pulses, std::uint64_t seed);

} // namespace wxmimo

#endif
