// SPDX-License-Identifier: Apache-2.0
//
// wxmimo: quadrant-MIMO weather radar simulation toolkit. One subcommand per
// experiment; all outputs are CSV/JSON named <subcommand>_<runid>.* where the
// runid hashes the effective configuration, so identical config+seed runs
// yield byte-identical data files. Timestamps appear only in the manifest.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wxmimo/config.hpp"
#include "wxmimo/constants.hpp"
#include "wxmimo/csv.hpp"
#include "wxmimo/experiments.hpp"
#include "wxmimo/geometry.hpp"
#include "wxmimo/kernels/kernels.hpp"
#include "wxmimo/moments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wxmimo;

namespace {

struct RunContext {
    ScenarioConfig cfg;
    std::string sub;
    std::string run_id;
    fs::path out_dir;
    std::vector<std::string> outputs;

    fs::path file(const std::string& stem, const std::string& ext) {
        const std::string name = sub + "_" + stem + run_id + "." + ext;
        outputs.push_back(name);
        return out_dir / name;
    }
    fs::path data_file(const std::string& ext) { return file("", ext); }
};

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_manifest(RunContext& ctx) {
    json m;
    m["subcommand"] = ctx.sub;
    m["run_id"] = ctx.run_id;
    m["effective_config"] = ctx.cfg.effective;
    m["defaulted_fields"] = ctx.cfg.defaulted;
    m["outputs"] = ctx.outputs;
    m["kernel_backend"] = kernels::active_backend();
    m["timestamp_utc"] = timestamp_utc();
    std::ofstream os(ctx.out_dir / (ctx.sub + "_" + ctx.run_id + "_manifest.json"));
    os << m.dump(2) << '\n';
}

struct Beams {
    BeamPattern tx;      // quadrant sub-aperture, uniform
    BeamPattern rx;      // configured aperture with the configured taper
    BeamPattern two_way;
};

BeamPattern aperture_pattern(const ScenarioConfig& cfg, const std::string& aperture, int nx,
                             const std::vector<double>& grid) {
    const ArrayLayout layout = build_planar_array(nx, nx, cfg.array_spacing_m());
    const double freq = cfg.frequency_hz();
    const double steer = cfg.pattern_steer_deg();
    if (aperture == "physical") {
        const Taper t = cfg.make_taper(static_cast<std::size_t>(nx));
        const auto w = planar_weights(layout, t, t);
        return array_factor(layout.elements, w, freq, steer, grid);
    }
    if (aperture == "quadrant") {
        std::vector<Point2> sub;
        for (std::size_t k = 0; k < layout.elements.size(); ++k) {
            if (layout.quadrant[k] == 1) {
                sub.push_back(layout.elements[k]);
            }
        }
        const std::vector<double> w(sub.size(), 1.0);
        return array_factor(sub, w, freq, steer, grid);
    }
    if (aperture == "virtual") {
        const VirtualArray va = virtual_array(quadrant_phase_centers(layout), layout);
        const Taper tx = cfg.make_taper(static_cast<std::size_t>(va.cells_x));
        const Taper ty = cfg.make_taper(static_cast<std::size_t>(va.cells_y));
        const auto w = virtual_weights(va, tx, ty);
        return array_factor(va.positions, w, freq, steer, grid);
    }
    throw ConfigError("pattern.aperture: expected physical, quadrant or virtual");
}

Beams make_beams(const ScenarioConfig& cfg, const std::string& aperture, int nx) {
    const auto grid = angle_grid(cfg.pattern_span_deg(), cfg.pattern_grid_step_deg());
    Beams b;
    b.tx = aperture_pattern(cfg, "quadrant", nx, grid);
    b.rx = aperture_pattern(cfg, aperture, nx, grid);
    b.two_way = cfg.pattern_two_way() == "tx_times_rx" ? two_way_pattern(b.tx, b.rx)
                                                       : two_way_pattern(b.rx, b.rx);
    return b;
}

IQBlock run_simulation(const ScenarioConfig& cfg) {
    const PulsingScheme scheme = cfg.make_scheme();
    const WeatherScene scene = cfg.make_scene();
    const double lambda = wavelength_m(cfg.frequency_hz());
    if (scheme.kind == SchemeKind::kAlternatingPol) {
        return simulate_alternating_pol(scene, scheme, cfg.sim_gates(), lambda);
    }
    return simulate_quadrant_mimo(scene, scheme, cfg.sim_gates(), lambda);
}

int cmd_geometry(RunContext& ctx) {
    const ScenarioConfig& cfg = ctx.cfg;
    const ArrayLayout layout =
        build_planar_array(cfg.array_nx(), cfg.array_ny(), cfg.array_spacing_m());
    const PhaseCenterSet pcs = quadrant_phase_centers(layout);
    const VirtualArray va = virtual_array(pcs, layout);
    const double overlap = overlap_factor(va, layout);
    const auto ratio = extent_ratio_exact(va, layout);

    {
        std::ofstream os(ctx.data_file("csv"));
        write_geometry_csv(os, layout);
    }
    {
        std::ofstream os(ctx.file("virtual_", "csv"));
        write_virtual_csv(os, va);
    }
    json metrics;
    metrics["elements"] = layout.elements.size();
    metrics["virtual_positions"] = va.positions.size();
    metrics["overlap_factor"] = overlap;
    metrics["extent_ratio"] =
        std::to_string(ratio.first) + "/" + std::to_string(ratio.second);
    metrics["physical_extent_x_m"] = layout.extent_x();
    metrics["physical_extent_y_m"] = layout.extent_y();
    metrics["virtual_extent_x_m"] = va.extent_x;
    metrics["virtual_extent_y_m"] = va.extent_y;
    metrics["coincidence_count"] = va.coincidence_count;
    {
        std::ofstream os(ctx.file("", "metrics.json"));
        os << metrics.dump(2) << '\n';
    }
    std::printf("geometry: elements=%zu virtual=%zu overlap_factor=%s extent_ratio=%lld/%lld\n",
                layout.elements.size(), va.positions.size(), csv::num(overlap).c_str(),
                ratio.first, ratio.second);
    return 0;
}

int cmd_pattern(RunContext& ctx) {
    const ScenarioConfig& cfg = ctx.cfg;
    const Beams beams = make_beams(cfg, cfg.pattern_aperture(), cfg.array_nx());
    {
        std::ofstream os(ctx.file("tx_", "csv"));
        write_pattern_csv(os, beams.tx);
    }
    {
        std::ofstream os(ctx.file("rx_", "csv"));
        write_pattern_csv(os, beams.rx);
    }
    {
        std::ofstream os(ctx.file("twoway_", "csv"));
        write_pattern_csv(os, beams.two_way);
    }
    const double hpbw = half_power_beamwidth_deg(beams.two_way);
    const double psl = peak_sidelobe_dbc(beams.two_way);
    const double hpbw_rx = half_power_beamwidth_deg(beams.rx);
    const double psl_rx = peak_sidelobe_dbc(beams.rx);
    json metrics;
    metrics["hpbw_deg"] = hpbw;
    metrics["psl_dbc"] = psl;
    metrics["hpbw_rx_deg"] = hpbw_rx;
    metrics["psl_rx_dbc"] = psl_rx;
    metrics["hpbw_tx_deg"] = half_power_beamwidth_deg(beams.tx);
    {
        std::ofstream os(ctx.file("", "metrics.json"));
        os << metrics.dump(2) << '\n';
    }
    std::printf("pattern: hpbw_deg=%.4g psl_dbc=%.4g rx_hpbw_deg=%.4g rx_psl_dbc=%.4g\n",
                hpbw, psl, hpbw_rx, psl_rx);
    return 0;
}

int cmd_simulate(RunContext& ctx) {
    const IQBlock block = run_simulation(ctx.cfg);
    {
        std::ofstream os(ctx.data_file("csv"));
        write_iq_csv(os, block);
    }
    std::printf("simulate: pulses=%zu gates=%zu v_nyq_base_ms=%.6g noise_power=%.6g%s\n",
                block.n_pulses, block.n_gates, block.v_nyq_base_ms, block.noise_power,
                block.width_warning ? " width_warning=1" : "");
    return 0;
}

IQBlock load_or_simulate(const ScenarioConfig& cfg) {
    const auto input = cfg.moments_input_csv();
    if (!input) {
        return run_simulation(cfg);
    }
    std::ifstream in(*input);
    if (!in) {
        throw ConfigError("moments.input_csv: file not found: " + *input);
    }
    IQBlock block = read_iq_csv(in);
    const PulsingScheme scheme = cfg.make_scheme();
    const WeatherScene scene = cfg.make_scene();
    const double lambda = wavelength_m(cfg.frequency_hz());
    block.sample_interval_s = block.scheme_kind == SchemeKind::kQuadrantMimo
                                  ? scheme.pri_s / 4.0
                                  : scheme.pri_s;
    block.v_nyq_base_ms = nyquist_velocity_ms(lambda, scheme.pri_s);
    block.noise_power =
        scene.snr_db ? scene.mean_power / std::pow(10.0, *scene.snr_db / 10.0) : 0.0;
    for (std::size_t p = 0; p < block.n_pulses; ++p) {
        block.timestamps_s[p] = static_cast<double>(p) * block.sample_interval_s;
    }
    return block;
}

int cmd_moments(RunContext& ctx) {
    const IQBlock block = load_or_simulate(ctx.cfg);
    std::ofstream os(ctx.data_file("csv"));
    write_moments_csv_header(os);
    MomentSet first;
    for (std::size_t g = 0; g < block.n_gates; ++g) {
        const MomentSet m =
            block.scheme_kind == SchemeKind::kAlternatingPol
                ? alt_pol_moments(block, g, block.v_nyq_base_ms)
                : quadrant_mimo_moments(block, g, ctx.cfg.radar_constant());
        if (g == 0) {
            first = m;
        }
        write_moments_csv_row(os, g, m);
    }
    std::printf("moments: gates=%zu z_dbz=%.4g v_ms=%.4g w_ms=%.4g ncp=%.3g\n",
                block.n_gates, first.z_dbz, first.v_ms, first.w_ms, first.ncp);
    return 0;
}

int cmd_reconstruct(RunContext& ctx) {
    const ScenarioConfig& cfg = ctx.cfg;
    const ReflectivityProfile profile = cfg.load_profile();
    const auto specs = cfg.recon_beams();
    if (specs.size() != 2) {
        throw ConfigError("reconstruct.beams: exactly two beams (wider first) expected");
    }
    ReconParams params;
    params.mode = cfg.recon_mode();
    params.step_deg = cfg.recon_step_deg();
    params.n_pulses = cfg.recon_n_pulses();
    params.cell_scene = cfg.make_scene();
    params.pri_s = cfg.make_scheme().pri_s;
    params.wavelength_m = wavelength_m(cfg.frequency_hz());
    params.seed = cfg.seed;

    std::vector<ReconstructionResult> results;
    for (const BeamSpec& spec : specs) {
        const Beams beams = make_beams(cfg, spec.aperture, spec.nx);
        results.push_back(reconstruct_profile(profile, beams.two_way, params, spec.label));
    }

    // rows over the scan azimuths where both beams are defined
    std::map<long long, std::pair<std::size_t, std::size_t>> common;
    const auto key = [](double az) { return std::llround(az * 1000.0); };
    for (std::size_t i = 0; i < results[0].scan_az_deg.size(); ++i) {
        common[key(results[0].scan_az_deg[i])].first = i + 1;
    }
    for (std::size_t i = 0; i < results[1].scan_az_deg.size(); ++i) {
        common[key(results[1].scan_az_deg[i])].second = i + 1;
    }
    std::ofstream os(ctx.data_file("csv"));
    os << "azimuth_deg,true_dbz,recon_2deg_dbz,recon_1p5deg_dbz,err_2deg_db,err_1p5deg_db\n";
    for (const auto& [k, idx] : common) {
        if (idx.first == 0 || idx.second == 0) {
            continue;
        }
        const std::size_t i0 = idx.first - 1, i1 = idx.second - 1;
        const double az = results[0].scan_az_deg[i0];
        os << csv::num(az) << ',' << csv::num(profile.value_at(az)) << ','
           << csv::num(results[0].reconstructed_dbz[i0]) << ','
           << csv::num(results[1].reconstructed_dbz[i1]) << ','
           << csv::num(results[0].error_db[i0]) << ',' << csv::num(results[1].error_db[i1])
           << '\n';
    }
    json summary;
    summary["rmse_2deg_db"] = results[0].rmse_db;
    summary["rmse_1p5deg_db"] = results[1].rmse_db;
    summary["beam_labels"] = {results[0].beam_label, results[1].beam_label};
    summary["beam_hpbw_deg"] = {results[0].beam_hpbw_deg, results[1].beam_hpbw_deg};
    summary["mode"] = cfg.recon_mode() == ReconMode::kFullTimeseries ? "full_timeseries"
                                                                     : "pattern_weighting";
    {
        std::ofstream js(ctx.file("", "summary.json"));
        js << summary.dump(2) << '\n';
    }
    std::printf("reconstruct: rmse_%s_db=%.4g rmse_%s_db=%.4g\n", results[0].beam_label.c_str(),
                results[0].rmse_db, results[1].beam_label.c_str(), results[1].rmse_db);
    return 0;
}

int cmd_variance(RunContext& ctx) {
    const ScenarioConfig& cfg = ctx.cfg;
    WeatherScene scene = cfg.make_scene();
    scene.snr_db.reset(); // signal statistics only
    const auto n_list = cfg.variance_n_list();
    const auto points =
        variance_vs_samples(scene, n_list, cfg.variance_pri_s(), cfg.variance_wavelength_m(),
                            cfg.variance_trials(), cfg.seed);
    std::ofstream os(ctx.data_file("csv"));
    os << "n_independent,sd_mean_power_db,sd_model_db\n";
    for (const auto& p : points) {
        os << p.n << ',' << csv::num(p.sd_db_mc) << ',' << csv::num(p.sd_db_model) << '\n';
    }
    std::printf("variance: points=%zu sd_db[N=%zu]=%.4g model=%.4g\n", points.size(),
                points.front().n, points.front().sd_db_mc, points.front().sd_db_model);
    return 0;
}

int cmd_scantime(RunContext& ctx) {
    const ScenarioConfig& cfg = ctx.cfg;
    const double t = scan_time_s(cfg.scantime_sector_deg(), cfg.scantime_beamwidth_deg(),
                                 cfg.scantime_dwell_s(), cfg.scantime_beams());
    json out;
    out["sector_deg"] = cfg.scantime_sector_deg();
    out["beamwidth_deg"] = cfg.scantime_beamwidth_deg();
    out["dwell_s"] = cfg.scantime_dwell_s();
    out["simultaneous_beams"] = cfg.scantime_beams();
    out["scan_time_s"] = t;
    {
        std::ofstream os(ctx.data_file("json"));
        os << out.dump(2) << '\n';
    }
    std::printf("scantime: scan_time_ms=%.10g (sector=%g deg, beam=%g deg, dwell=%g s, beams=%d)\n",
                t * 1e3, cfg.scantime_sector_deg(), cfg.scantime_beamwidth_deg(),
                cfg.scantime_dwell_s(), cfg.scantime_beams());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quadrant-MIMO weather radar simulation toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;
    std::string kernel = "auto";

    const std::vector<std::string> subs{"geometry",    "pattern",  "simulate", "moments",
                                        "reconstruct", "variance", "scantime", "validate"};
    std::map<std::string, CLI::App*> sub_apps;
    for (const std::string& name : subs) {
        CLI::App* s = app.add_subcommand(name);
        s->add_option("--config", config_path, "scenario config (JSON)")->required();
        s->add_option("--set", overrides, "override a config value: path.to.key=value");
        s->add_option("--seed", seed_override, "override the config seed");
        s->add_option("--out", out_override, "override the output directory");
        s->add_option("--kernels", kernel, "kernel backend: auto|scalar|avx2");
        sub_apps[name] = s;
    }

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    if (!kernels::select_backend(kernel)) {
        std::fprintf(stderr, "error: unsupported kernel backend '%s'\n", kernel.c_str());
        return 1;
    }

    if (sub == "validate") {
        const ValidationReport report = validate_config_file(config_path, overrides);
        for (const auto& v : report.violations) {
            std::printf("violation: %s\n", v.c_str());
        }
        for (const auto& d : report.defaulted) {
            std::printf("defaulted: %s\n", d.c_str());
        }
        std::printf("validate: %zu violation(s), %zu defaulted field(s)\n",
                    report.violations.size(), report.defaulted.size());
        return report.ok() ? 0 : 1;
    }

    try {
        RunContext ctx{load_config(config_path, overrides, seed_override, out_override),
                       sub,
                       "",
                       {},
                       {}};
        ctx.run_id = ctx.cfg.run_id();
        ctx.out_dir = ctx.cfg.out_dir;
        std::error_code ec;
        fs::create_directories(ctx.out_dir, ec);
        if (ec) {
            std::fprintf(stderr, "error: cannot create output directory %s\n",
                         ctx.out_dir.string().c_str());
            return 1;
        }

        int rc = 0;
        if (sub == "geometry") {
            rc = cmd_geometry(ctx);
        } else if (sub == "pattern") {
            rc = cmd_pattern(ctx);
        } else if (sub == "simulate") {
            rc = cmd_simulate(ctx);
        } else if (sub == "moments") {
            rc = cmd_moments(ctx);
        } else if (sub == "reconstruct") {
            rc = cmd_reconstruct(ctx);
        } else if (sub == "variance") {
            rc = cmd_variance(ctx);
        } else if (sub == "scantime") {
            rc = cmd_scantime(ctx);
        }
        write_manifest(ctx);
        return rc;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return 2;
    }
}
