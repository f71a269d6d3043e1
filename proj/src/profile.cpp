// SPDX-License-Identifier: Apache-2.0

#include "wxmimo/profile.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "wxmimo/csv.hpp"

namespace wxmimo {

bool ReflectivityProfile::contains(double az_deg) const {
    if (dbz.empty()) {
        return false;
    }
    const double eps = 1e-9 * az_step_deg;
    return az_deg >= az_start_deg - eps && az_deg <= az_end_deg() + eps;
}

std::size_t ReflectivityProfile::index_at(double az_deg) const {
    if (!contains(az_deg)) {
        throw std::invalid_argument("profile: azimuth outside the profile span");
    }
    const double q = (az_deg - az_start_deg) / az_step_deg;
    // ties toward the lower index
    auto idx = static_cast<long long>(std::ceil(q - 0.5));
    if (idx < 0) {
        idx = 0;
    }
    if (idx >= static_cast<long long>(dbz.size())) {
        idx = static_cast<long long>(dbz.size()) - 1;
    }
    return static_cast<std::size_t>(idx);
}

double ReflectivityProfile::value_at(double az_deg) const { return dbz[index_at(az_deg)]; }

ReflectivityProfile make_step_profile(double baseline_dbz, double block_dbz,
                                      double block_width_deg, double span_lo_deg,
                                      double span_hi_deg) {
    if (!(span_hi_deg > span_lo_deg)) {
        throw std::invalid_argument("make_step_profile: empty span");
    }
    if (!(block_width_deg >= 0.0)) {
        throw std::invalid_argument("make_step_profile: negative block width");
    }
    ReflectivityProfile p;
    p.az_start_deg = span_lo_deg;
    p.az_step_deg = 0.02;
    const auto n = static_cast<std::size_t>(
        std::llround((span_hi_deg - span_lo_deg) / p.az_step_deg)) + 1;
    p.dbz.resize(n);
    const double mid = 0.5 * (span_lo_deg + span_hi_deg);
    for (std::size_t i = 0; i < n; ++i) {
        const double az = p.az_start_deg + static_cast<double>(i) * p.az_step_deg;
        p.dbz[i] = (std::abs(az - mid) <= block_width_deg / 2.0) ? block_dbz : baseline_dbz;
    }
    return p;
}

ReflectivityProfile read_profile_csv(std::istream& is) {
    ReflectivityProfile p;
    std::string line;
    bool first = true;
    bool have_prev = false;
    double prev_az = 0.0;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        if (first) {
            first = false;
            if (line.rfind("azimuth_deg", 0) == 0) {
                continue;
            }
        }
        const auto fields = csv::split_line(line);
        if (fields.size() < 2) {
            throw std::invalid_argument("profile csv: expected azimuth_deg,dbz rows");
        }
        const double az = std::stod(fields[0]);
        const double v = std::stod(fields[1]);
        if (!have_prev) {
            p.az_start_deg = az;
            have_prev = true;
        } else if (std::abs((az - prev_az) - 0.02) > 1e-6) {
            throw std::invalid_argument("profile csv: sampling must be uniform at 0.02 deg");
        }
        prev_az = az;
        if (!std::isfinite(v)) {
            throw std::invalid_argument("profile csv: non-finite reflectivity value");
        }
        p.dbz.push_back(v);
    }
    if (p.dbz.size() < 2) {
        throw std::invalid_argument("profile csv: need at least two samples");
    }
    return p;
}

void write_profile_csv(std::ostream& os, const ReflectivityProfile& p) {
    os << "azimuth_deg,dbz\n";
    for (std::size_t i = 0; i < p.dbz.size(); ++i) {
        os << csv::num(p.az_start_deg + static_cast<double>(i) * p.az_step_deg) << ','
           << csv::num(p.dbz[i]) << '\n';
    }
}

} // namespace wxmimo
