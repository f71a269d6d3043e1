// SPDX-License-Identifier: Apache-2.0

#ifndef WXMIMO_PROFILE_HPP
#define WXMIMO_PROFILE_HPP

#include <iosfwd>
#include <vector>

namespace wxmimo {

// High-resolution reflectivity vs azimuth at a fixed range, sampled at 0.02 deg.
struct ReflectivityProfile {
    double az_start_deg = 0.0;
    double az_step_deg = 0.02;
    std::vector<double> dbz;

    double az_end_deg() const {
        return az_start_deg + az_step_deg * (dbz.empty() ? 0 : dbz.size() - 1);
    }
    bool contains(double az_deg) const;
    // Nearest-sample lookup; exact midpoints resolve toward the lower index.
    double value_at(double az_deg) const;
    std::size_t index_at(double az_deg) const;
};

// baseline with a centered block of elevated reflectivity, the default test scene
ReflectivityProfile make_step_profile(double baseline_dbz, double block_dbz,
                                      double block_width_deg, double span_lo_deg,
                                      double span_hi_deg);

ReflectivityProfile read_profile_csv(std::istream& is);
void write_profile_csv(std::ostream& os, const ReflectivityProfile& p);

} // namespace wxmimo

#endif
