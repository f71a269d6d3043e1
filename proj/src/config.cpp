// SPDX-License-Identifier: Apache-2.0

#include "wxmimo/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wxmimo/constants.hpp"

namespace wxmimo {

namespace {

using nlohmann::json;

json default_config() {
    json d;
    d["schema_version"] = 1;
    d["seed"] = 1;
    d["out_dir"] = "out";
    d["frequency_hz"] = 9.4e9;
    d["array"] = {{"nx", 50}, {"ny", 50}, {"spacing_m", 0.016}};
    d["taper"] = {{"kind", "taylor"}, {"sll_db", -55.0}, {"nbar", 6}};
    d["pattern"] = {{"grid_step_deg", 0.01},
                    {"grid_span_deg", 90.0},
                    {"steer_deg", 0.0},
                    {"aperture", "virtual"},
                    {"two_way", "aperture_squared"}};
    d["scheme"] = {{"kind", "quadrant_mimo"},
                   {"pri_s", 1e-3},
                   {"n_pulses", 4096},
                   {"phi1_rad", 0.0},
                   {"leakage_db", nullptr},
                   {"quadrant_samples", "common_volume"}};
    d["scene"] = {{"mean_power", 1.0},
                  {"velocity_ms", 5.0},
                  {"spectrum_width_ms", 1.0},
                  {"snr_db", 25.0},
                  {"rho_hv", 0.98},
                  {"zdr_db", 0.5},
                  {"phidp_rad", 0.3}};
    d["sim"] = {{"gates", 4}};
    d["moments"] = {{"radar_constant", 1.0}, {"input_csv", nullptr}};
    d["profile"] = {{"csv", nullptr},
                    {"baseline_dbz", 20.0},
                    {"block_dbz", 40.0},
                    {"block_width_deg", 4.0},
                    {"span_deg", json::array({-10.0, 10.0})}};
    d["reconstruct"] = {{"step_deg", 1.0},
                        {"mode", "pattern_weighting"},
                        {"n_pulses", 10000},
                        {"beams", json::array({json{{"label", "2.0deg"},
                                                    {"aperture", "physical"},
                                                    {"nx", 57}},
                                               json{{"label", "1.5deg"},
                                                    {"aperture", "virtual"},
                                                    {"nx", 50}}})}};
    d["variance"] = {{"n_list", json::array({16, 32, 64, 128})},
                     {"trials", 2000},
                     {"pri_s", 1e-3},
                     {"wavelength_m", 0.1}};
    d["scantime"] = {{"sector_deg", 90.0}, {"beamwidth_deg", 1.5}, {"dwell_s", 1e-3},
                     {"beams", 2}};
    return d;
}

// Merge user values over defaults, recording defaulted paths and unknown keys.
void merge(const json& defaults, const json& user, const std::string& prefix, json& out,
           std::vector<std::string>& defaulted, std::vector<std::string>& unknown) {
    for (auto it = user.begin(); it != user.end(); ++it) {
        if (!defaults.contains(it.key())) {
            unknown.push_back(prefix + it.key());
        }
    }
    for (auto it = defaults.begin(); it != defaults.end(); ++it) {
        const std::string path = prefix + it.key();
        if (!user.contains(it.key())) {
            out[it.key()] = it.value();
            defaulted.push_back(path);
        } else if (it.value().is_object() && user[it.key()].is_object()) {
            out[it.key()] = json::object();
            merge(it.value(), user[it.key()], path + ".", out[it.key()], defaulted, unknown);
        } else {
            out[it.key()] = user[it.key()];
        }
    }
}

void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override must look like path.to.key=value: " + assignment);
    }
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::exception&) {
        parsed = value; // bare strings pass through
    }
    json* node = &j;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
        parts.push_back(part);
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        node = &(*node)[parts[i]];
    }
    (*node)[parts.back()] = parsed;
}

void collect_domain_violations(const json& c, std::vector<std::string>& v) {
    const auto num = [&](const char* a, const char* b = nullptr) -> double {
        const json& n = b ? c.at(a).at(b) : c.at(a);
        return n.get<double>();
    };
    try {
        if (!c.at("schema_version").is_number_integer() ||
            c["schema_version"].get<int>() != 1) {
            v.push_back("schema_version: expected 1");
        }
        if (num("frequency_hz") <= 0.0) {
            v.push_back("frequency_hz: must be > 0");
        }
        const int nx = c["array"]["nx"].get<int>();
        const int ny = c["array"]["ny"].get<int>();
        if (nx < 2 || nx % 2 != 0 || ny < 2 || ny % 2 != 0) {
            v.push_back("array.nx/ny: must be even and >= 2 (equal quadrants)");
        }
        if (num("array", "spacing_m") <= 0.0) {
            v.push_back("array.spacing_m: must be > 0");
        }
        const std::string taper_kind = c["taper"]["kind"].get<std::string>();
        if (taper_kind != "uniform" && taper_kind != "taylor") {
            v.push_back("taper.kind: expected uniform or taylor");
        } else if (taper_kind == "taylor") {
            const double sll = num("taper", "sll_db");
            if (sll < -70.0 || sll > -13.0) {
                v.push_back("taper.sll_db: legal range [-70, -13]");
            }
            if (c["taper"]["nbar"].get<int>() < 2) {
                v.push_back("taper.nbar: must be >= 2");
            }
        }
        const std::string kind = c["scheme"]["kind"].get<std::string>();
        if (kind != "alternating_pol" && kind != "quadrant_mimo") {
            v.push_back("scheme.kind: expected alternating_pol or quadrant_mimo");
        }
        if (num("scheme", "pri_s") <= 0.0) {
            v.push_back("scheme.pri_s: must be > 0");
        }
        const int n_pulses = c["scheme"]["n_pulses"].get<int>();
        if (n_pulses < 8) {
            v.push_back("scheme.n_pulses: must be >= 8");
        }
        if (kind == "quadrant_mimo" && n_pulses % 4 != 0) {
            v.push_back("scheme.n_pulses: must be divisible by 4 for quadrant_mimo");
        }
        const std::string qs = c["scheme"]["quadrant_samples"].get<std::string>();
        if (qs != "common_volume" && qs != "independent") {
            v.push_back("scheme.quadrant_samples: expected common_volume or independent");
        }
        const double rho = num("scene", "rho_hv");
        if (rho < 0.0 || rho > 1.0) {
            v.push_back("scene.rho_hv: invariant rho_hv in [0, 1] violated");
        }
        if (num("scene", "spectrum_width_ms") <= 0.0) {
            v.push_back("scene.spectrum_width_ms: must be > 0 (invariant spectrum_width > 0)");
        }
        if (num("scene", "mean_power") < 0.0) {
            v.push_back("scene.mean_power: must be >= 0");
        }
        if (c["sim"]["gates"].get<int>() < 1) {
            v.push_back("sim.gates: must be >= 1");
        }
        if (!c["profile"]["csv"].is_null()) {
            const std::string p = c["profile"]["csv"].get<std::string>();
            if (!std::ifstream(p).good()) {
                v.push_back("profile.csv: file not found: " + p);
            }
        }
        if (!c["moments"]["input_csv"].is_null()) {
            const std::string p = c["moments"]["input_csv"].get<std::string>();
            if (!std::ifstream(p).good()) {
                v.push_back("moments.input_csv: file not found: " + p);
            }
        }
        const double step = num("pattern", "grid_step_deg");
        if (step <= 0.0 || step > 0.02) {
            v.push_back("pattern.grid_step_deg: must be in (0, 0.02]");
        }
        if (c["reconstruct"]["beams"].size() != 2) {
            v.push_back("reconstruct.beams: exactly two beams (wider first) expected");
        }
        if (c["variance"]["trials"].get<int>() < 100) {
            v.push_back("variance.trials: must be >= 100");
        }
        if (num("scantime", "sector_deg") <= 0.0 || num("scantime", "beamwidth_deg") <= 0.0 ||
            num("scantime", "dwell_s") <= 0.0 || c["scantime"]["beams"].get<int>() < 1) {
            v.push_back("scantime: all fields must be positive");
        }
    } catch (const json::exception& e) {
        v.push_back(std::string("config: type error: ") + e.what());
    }
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config file not found: " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                           std::optional<std::uint64_t> seed_override,
                           std::optional<std::string> out_override) {
    json user = parse_file(path);
    if (!user.is_object()) {
        throw ConfigError("config root must be a JSON object");
    }
    if (!user.contains("schema_version")) {
        throw ConfigError("config: missing required key schema_version");
    }
    for (const std::string& o : overrides) {
        apply_override(user, o);
    }
    ScenarioConfig cfg;
    std::vector<std::string> unknown;
    cfg.effective = json::object();
    merge(default_config(), user, "", cfg.effective, cfg.defaulted, unknown);
    if (!unknown.empty()) {
        std::string msg = "config: unknown key(s):";
        for (const auto& k : unknown) {
            msg += " " + k;
        }
        throw ConfigError(msg);
    }
    // Structural checks only; physics invariants are enforced by the owning
    // modules so they surface as domain errors with module context. The
    // validate subcommand collects both kinds without failing fast.
    if (!cfg.effective["schema_version"].is_number_integer() ||
        cfg.effective["schema_version"].get<int>() != 1) {
        throw ConfigError("config: schema_version must be 1");
    }
    for (const char* key : {"csv", "input_csv"}) {
        const json& node = std::string(key) == "csv" ? cfg.effective["profile"]["csv"]
                                                     : cfg.effective["moments"]["input_csv"];
        if (!node.is_null()) {
            const std::string p = node.get<std::string>();
            if (!std::ifstream(p).good()) {
                throw ConfigError(std::string("config: referenced file not found (") + key +
                                  "): " + p);
            }
        }
    }
    if (seed_override) {
        cfg.effective["seed"] = *seed_override;
    }
    if (out_override) {
        cfg.effective["out_dir"] = *out_override;
    }
    cfg.seed = cfg.effective["seed"].get<std::uint64_t>();
    cfg.out_dir = cfg.effective["out_dir"].get<std::string>();
    return cfg;
}

ValidationReport validate_config_file(const std::string& path,
                                      const std::vector<std::string>& overrides) {
    ValidationReport report;
    json user;
    try {
        user = parse_file(path);
        if (!user.is_object()) {
            report.violations.push_back("config root must be a JSON object");
            return report;
        }
        for (const std::string& o : overrides) {
            apply_override(user, o);
        }
    } catch (const ConfigError& e) {
        report.violations.push_back(e.what());
        return report;
    }
    if (!user.contains("schema_version")) {
        report.violations.push_back("missing required key schema_version");
    }
    json effective = json::object();
    std::vector<std::string> unknown;
    merge(default_config(), user, "", effective, report.defaulted, unknown);
    for (const auto& k : unknown) {
        report.violations.push_back("unknown key: " + k);
    }
    collect_domain_violations(effective, report.violations);
    return report;
}

double ScenarioConfig::frequency_hz() const { return effective["frequency_hz"].get<double>(); }
int ScenarioConfig::array_nx() const { return effective["array"]["nx"].get<int>(); }
int ScenarioConfig::array_ny() const { return effective["array"]["ny"].get<int>(); }
double ScenarioConfig::array_spacing_m() const {
    return effective["array"]["spacing_m"].get<double>();
}

Taper ScenarioConfig::make_taper(std::size_t n) const {
    if (effective["taper"]["kind"].get<std::string>() == "uniform") {
        return uniform_taper(n);
    }
    return taylor_taper(n, effective["taper"]["sll_db"].get<double>(),
                        effective["taper"]["nbar"].get<int>());
}

PulsingScheme ScenarioConfig::make_scheme() const {
    PulsingScheme s;
    const auto& j = effective["scheme"];
    s.kind = j["kind"].get<std::string>() == "alternating_pol" ? SchemeKind::kAlternatingPol
                                                               : SchemeKind::kQuadrantMimo;
    s.pri_s = j["pri_s"].get<double>();
    s.n_pulses = j["n_pulses"].get<int>();
    s.phi1_rad = j["phi1_rad"].get<double>();
    if (!j["leakage_db"].is_null()) {
        s.leakage_db = j["leakage_db"].get<double>();
    }
    s.quadrant_samples = j["quadrant_samples"].get<std::string>() == "independent"
                             ? QuadrantSamples::kIndependent
                             : QuadrantSamples::kCommonVolume;
    s.seed = seed;
    return s;
}

WeatherScene ScenarioConfig::make_scene() const {
    WeatherScene s;
    const auto& j = effective["scene"];
    s.mean_power = j["mean_power"].get<double>();
    s.velocity_ms = j["velocity_ms"].get<double>();
    s.spectrum_width_ms = j["spectrum_width_ms"].get<double>();
    if (!j["snr_db"].is_null()) {
        s.snr_db = j["snr_db"].get<double>();
    }
    s.rho_hv = j["rho_hv"].get<double>();
    s.zdr_db = j["zdr_db"].get<double>();
    s.phidp_rad = j["phidp_rad"].get<double>();
    return s;
}

std::size_t ScenarioConfig::sim_gates() const {
    return effective["sim"]["gates"].get<std::size_t>();
}
double ScenarioConfig::radar_constant() const {
    return effective["moments"]["radar_constant"].get<double>();
}
std::optional<std::string> ScenarioConfig::moments_input_csv() const {
    if (effective["moments"]["input_csv"].is_null()) {
        return std::nullopt;
    }
    return effective["moments"]["input_csv"].get<std::string>();
}

double ScenarioConfig::pattern_grid_step_deg() const {
    return effective["pattern"]["grid_step_deg"].get<double>();
}
double ScenarioConfig::pattern_span_deg() const {
    return effective["pattern"]["grid_span_deg"].get<double>();
}
double ScenarioConfig::pattern_steer_deg() const {
    return effective["pattern"]["steer_deg"].get<double>();
}
std::string ScenarioConfig::pattern_aperture() const {
    return effective["pattern"]["aperture"].get<std::string>();
}
std::string ScenarioConfig::pattern_two_way() const {
    return effective["pattern"]["two_way"].get<std::string>();
}

ReflectivityProfile ScenarioConfig::load_profile() const {
    const auto& j = effective["profile"];
    if (!j["csv"].is_null()) {
        std::ifstream in(j["csv"].get<std::string>());
        if (!in) {
            throw ConfigError("profile.csv: file not found: " + j["csv"].get<std::string>());
        }
        return read_profile_csv(in);
    }
    const auto& span = j["span_deg"];
    return make_step_profile(j["baseline_dbz"].get<double>(), j["block_dbz"].get<double>(),
                             j["block_width_deg"].get<double>(), span[0].get<double>(),
                             span[1].get<double>());
}

double ScenarioConfig::recon_step_deg() const {
    return effective["reconstruct"]["step_deg"].get<double>();
}
ReconMode ScenarioConfig::recon_mode() const {
    return effective["reconstruct"]["mode"].get<std::string>() == "full_timeseries"
               ? ReconMode::kFullTimeseries
               : ReconMode::kPatternWeighting;
}
int ScenarioConfig::recon_n_pulses() const {
    return effective["reconstruct"]["n_pulses"].get<int>();
}
std::vector<BeamSpec> ScenarioConfig::recon_beams() const {
    std::vector<BeamSpec> beams;
    for (const auto& b : effective["reconstruct"]["beams"]) {
        BeamSpec spec;
        spec.label = b.value("label", "beam");
        spec.aperture = b.value("aperture", "virtual");
        spec.nx = b.value("nx", 42);
        beams.push_back(spec);
    }
    return beams;
}

std::vector<std::size_t> ScenarioConfig::variance_n_list() const {
    std::vector<std::size_t> out;
    for (const auto& n : effective["variance"]["n_list"]) {
        out.push_back(n.get<std::size_t>());
    }
    return out;
}
std::size_t ScenarioConfig::variance_trials() const {
    return effective["variance"]["trials"].get<std::size_t>();
}
double ScenarioConfig::variance_pri_s() const {
    return effective["variance"]["pri_s"].get<double>();
}
double ScenarioConfig::variance_wavelength_m() const {
    return effective["variance"]["wavelength_m"].get<double>();
}

double ScenarioConfig::scantime_sector_deg() const {
    return effective["scantime"]["sector_deg"].get<double>();
}
double ScenarioConfig::scantime_beamwidth_deg() const {
    return effective["scantime"]["beamwidth_deg"].get<double>();
}
double ScenarioConfig::scantime_dwell_s() const {
    return effective["scantime"]["dwell_s"].get<double>();
}
int ScenarioConfig::scantime_beams() const {
    return effective["scantime"]["beams"].get<int>();
}

std::string ScenarioConfig::run_id() const {
    json hashed = effective;
    hashed.erase("out_dir"); // identifies the scenario, not the destination
    const std::uint64_t h = fnv1a64(hashed.dump());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%08llx", static_cast<unsigned long long>(h & 0xffffffffULL));
    return buf;
}

} // namespace wxmimo
