// SPDX-License-Identifier: Apache-2.0

#include "wxmimo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wxmimo/constants.hpp"
#include "wxmimo/moments.hpp"
#include "wxmimo/rng.hpp"

namespace wxmimo {

namespace {

// linear interpolation of the pattern at an angular offset from its peak
double pattern_gain_at(const BeamPattern& p, double angle_deg) {
    const auto& a = p.angles_deg;
    if (angle_deg <= a.front() || angle_deg >= a.back()) {
        return 0.0;
    }
    const auto it = std::upper_bound(a.begin(), a.end(), angle_deg);
    const std::size_t j = static_cast<std::size_t>(it - a.begin());
    const std::size_t i = j - 1;
    const double f = (angle_deg - a[i]) / (a[j] - a[i]);
    return p.gain[i] + f * (p.gain[j] - p.gain[i]);
}

} // namespace

ReconstructionResult reconstruct_profile(const ReflectivityProfile& profile,
                                         const BeamPattern& two_way, const ReconParams& params,
                                         const std::string& label) {
    if (!(params.step_deg > 0.0)) {
        throw std::invalid_argument("reconstruct_profile: step must be > 0");
    }
    const double hpbw = half_power_beamwidth_deg(two_way);
    if (hpbw < 5.0 * profile.az_step_deg) {
        throw std::invalid_argument(
            "reconstruct_profile: beam narrower than 5 profile samples");
    }
    const auto [null_lo, null_hi] = first_null_offsets_deg(two_way);
    const double span_lo = profile.az_start_deg;
    const double span_hi = profile.az_end_deg();
    if (span_hi - span_lo < null_hi - null_lo) {
        throw std::invalid_argument("reconstruct_profile: beam footprint exceeds profile span");
    }

    // footprint offsets at the profile sampling, truncated at the first nulls
    const double step = profile.az_step_deg;
    std::vector<double> offsets, weights;
    for (auto k = static_cast<long long>(std::ceil(null_lo / step));
         k <= static_cast<long long>(std::floor(null_hi / step)); ++k) {
        const double off = static_cast<double>(k) * step;
        const double w = pattern_gain_at(two_way, off);
        if (w > 0.0) {
            offsets.push_back(off);
            weights.push_back(w);
        }
    }
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);

    // scan centers at step_deg increments, shrunk so every footprint fits
    std::vector<double> centers;
    {
        const double lo = std::ceil((span_lo - null_lo) / params.step_deg) * params.step_deg;
        for (double c = lo; c + null_hi <= span_hi + 1e-9; c += params.step_deg) {
            centers.push_back(c);
        }
    }
    if (centers.empty()) {
        throw std::invalid_argument("reconstruct_profile: no scan azimuth fits the profile");
    }

    // per-cell linear power: the profile itself, or one simulated pulse train
    // per 0.02-deg cell, power-averaged along the pulse dimension
    std::vector<double> cell_power(profile.dbz.size());
    if (params.mode == ReconMode::kPatternWeighting) {
        for (std::size_t i = 0; i < profile.dbz.size(); ++i) {
            cell_power[i] = std::pow(10.0, profile.dbz[i] / 10.0);
        }
    } else {
        for (std::size_t i = 0; i < profile.dbz.size(); ++i) {
            WeatherScene scene = params.cell_scene;
            scene.mean_power = std::pow(10.0, profile.dbz[i] / 10.0);
            const SeriesResult r =
                gaussian_spectrum_series(static_cast<std::size_t>(params.n_pulses), scene,
                                         params.pri_s, params.wavelength_m,
                                         derive_seed(params.seed, i));
            double acc = 0.0;
            for (const auto& v : r.samples) {
                acc += std::norm(v);
            }
            cell_power[i] = acc / static_cast<double>(r.samples.size());
        }
    }

    ReconstructionResult res;
    res.beam_label = label;
    res.beam_hpbw_deg = hpbw;
    res.scan_az_deg = centers;
    res.reconstructed_dbz.reserve(centers.size());
    res.error_db.reserve(centers.size());
    double sq = 0.0;
    for (const double c : centers) {
        double acc = 0.0;
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            acc += weights[k] * cell_power[profile.index_at(c + offsets[k])];
        }
        const double rec_dbz = 10.0 * std::log10(acc / wsum);
        const double err = rec_dbz - profile.value_at(c);
        res.reconstructed_dbz.push_back(rec_dbz);
        res.error_db.push_back(err);
        sq += err * err;
    }
    res.rmse_db = std::sqrt(sq / static_cast<double>(centers.size()));
    return res;
}

std::vector<VariancePoint> variance_vs_samples(const WeatherScene& scene,
                                               std::span<const std::size_t> n_list,
                                               double pri_s, double wavelength_m,
                                               std::size_t trials, std::uint64_t seed) {
    if (trials < 100) {
        throw std::invalid_argument("variance_vs_samples: need at least 100 trials");
    }
    std::vector<VariancePoint> out;
    out.reserve(n_list.size());
    for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
        const std::size_t n = n_list[idx];
        std::vector<double> p_db(trials), p_lin(trials);
        for (std::size_t t = 0; t < trials; ++t) {
            const SeriesResult r = gaussian_spectrum_series(
                8 * n, scene, pri_s, wavelength_m, derive_seed(seed, idx, t));
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                acc += std::norm(r.samples[k]);
            }
            p_lin[t] = acc / static_cast<double>(n);
            p_db[t] = 10.0 * std::log10(p_lin[t]);
        }
        const auto variance = [](const std::vector<double>& v) {
            double mean = 0.0;
            for (const double x : v) {
                mean += x;
            }
            mean /= static_cast<double>(v.size());
            double acc = 0.0;
            for (const double x : v) {
                acc += (x - mean) * (x - mean);
            }
            return acc / static_cast<double>(v.size() - 1);
        };

        VarianceModelInput model;
        model.mean_power = scene.mean_power;
        model.n = n;
        model.rho_p = gaussian_power_correlation(n, scene.spectrum_width_ms, pri_s,
                                                 wavelength_m);
        VariancePoint pt;
        pt.n = n;
        pt.var_lin_mc = variance(p_lin);
        pt.var_lin_model = power_variance_model(model);
        pt.sd_db_mc = std::sqrt(variance(p_db));
        pt.sd_db_model =
            10.0 / std::log(10.0) * std::sqrt(pt.var_lin_model) / scene.mean_power;
        out.push_back(pt);
    }
    return out;
}

double scan_time_s(double sector_deg, double beamwidth_deg, double dwell_s,
                   int simultaneous_beams) {
    if (!(sector_deg > 0.0) || !(beamwidth_deg > 0.0) || !(dwell_s > 0.0) ||
        simultaneous_beams < 1) {
        throw std::invalid_argument("scan_time: all inputs must be positive");
    }
    // guard against 60.000000001-style ratios from decimal inputs
    const auto positions =
        static_cast<long long>(std::ceil(sector_deg / beamwidth_deg - 1e-9));
    return static_cast<double>(positions) * dwell_s / simultaneous_beams;
}

std::vector<WidthBiasRow> width_bias_table(std::span<const double> widths_ms, double pri_s,
                                           double wavelength_m, std::size_t trials,
                                           int n_pulses, std::uint64_t seed) {
    std::vector<WidthBiasRow> rows;
    rows.reserve(widths_ms.size());
    for (std::size_t i = 0; i < widths_ms.size(); ++i) {
        WeatherScene scene;
        scene.mean_power = 1.0;
        scene.velocity_ms = 0.0;
        scene.spectrum_width_ms = widths_ms[i];
        scene.snr_db = 30.0;
        PulsingScheme scheme;
        scheme.kind = SchemeKind::kQuadrantMimo;
        scheme.pri_s = pri_s;
        scheme.n_pulses = n_pulses;
        double acc = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            scheme.seed = derive_seed(seed, i, t);
            const IQBlock block = simulate_quadrant_mimo(scene, scheme, 1, wavelength_m);
            const CovarianceSet cov = quadrant_covariances(block, 0);
            acc += mimo_width(cov, block.v_nyq_base_ms).w_ms;
        }
        WidthBiasRow row;
        row.true_width_ms = widths_ms[i];
        row.mean_estimate_ms = acc / static_cast<double>(trials);
        row.ratio = row.mean_estimate_ms / row.true_width_ms;
        rows.push_back(row);
    }
    return rows;
}

} // namespace wxmimo
