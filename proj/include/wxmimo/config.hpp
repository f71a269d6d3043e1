// SPDX-License-Identifier: Apache-2.0
//
// Scenario configuration: one JSON file describing geometry, taper, pulsing
// scheme, scene/profile and experiment parameters. Every defaulted field is
// recorded so runs are self-describing; unknown keys are rejected by name.

#ifndef WXMIMO_CONFIG_HPP
#define WXMIMO_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wxmimo/beampattern.hpp"
#include "wxmimo/echo_sim.hpp"
#include "wxmimo/experiments.hpp"

namespace wxmimo {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BeamSpec {
    std::string label;
    std::string aperture = "virtual"; // virtual | physical | quadrant
    int nx = 42;
};

struct ScenarioConfig {
    nlohmann::json effective;              // full config with defaults applied
    std::vector<std::string> defaulted;    // dotted paths that fell back to defaults
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    double frequency_hz() const;
    int array_nx() const;
    int array_ny() const;
    double array_spacing_m() const;
    Taper make_taper(std::size_t n) const;
    PulsingScheme make_scheme() const;
    WeatherScene make_scene() const;
    std::size_t sim_gates() const;
    double radar_constant() const;
    std::optional<std::string> moments_input_csv() const;

    // pattern subcommand
    double pattern_grid_step_deg() const;
    double pattern_span_deg() const;
    double pattern_steer_deg() const;
    std::string pattern_aperture() const; // virtual | physical | quadrant
    std::string pattern_two_way() const;  // aperture_squared | tx_times_rx

    // profile (file-loadable, defaults to the step profile)
    ReflectivityProfile load_profile() const;

    // reconstruct subcommand
    double recon_step_deg() const;
    ReconMode recon_mode() const;
    int recon_n_pulses() const;
    std::vector<BeamSpec> recon_beams() const;

    // variance subcommand
    std::vector<std::size_t> variance_n_list() const;
    std::size_t variance_trials() const;
    double variance_pri_s() const;
    double variance_wavelength_m() const;

    // scantime subcommand
    double scantime_sector_deg() const;
    double scantime_beamwidth_deg() const;
    double scantime_dwell_s() const;
    int scantime_beams() const;

    std::string run_id() const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> defaulted;
    bool ok() const { return violations.empty(); }
};

// Parse + default + validate. Overrides are dotted "path=json-value" pairs
// applied before validation. Throws ConfigError on structural problems.
ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                           std::optional<std::uint64_t> seed_override,
                           std::optional<std::string> out_override);

// Collected (not fail-fast) dry-run check of a config file.
ValidationReport validate_config_file(const std::string& path,
                                      const std::vector<std::string>& overrides);

} // namespace wxmimo

#endif
