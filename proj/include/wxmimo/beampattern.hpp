// SPDX-License-Identifier: Apache-2.0
//
// Array factors on principal-plane cuts, Taylor tapering, two-way pattern
// composition, and beamwidth / sidelobe metric extraction.

#ifndef WXMIMO_BEAMPATTERN_HPP
#define WXMIMO_BEAMPATTERN_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "wxmimo/geometry.hpp"

namespace wxmimo {

struct BeamPattern {
    std::vector<double> angles_deg; // strictly increasing
    std::vector<double> gain;       // linear power, normalized so max == 1
    double frequency_hz = 0.0;
};

enum class TaperKind { kUniform, kTaylor };

struct Taper {
    TaperKind kind = TaperKind::kUniform;
    double sll_db = 0.0;
    int nbar = 0;
    std::vector<double> weights; // nonnegative, normalized to sum == n
};

enum class CutPlane { kAzimuth, kElevation };

Taper uniform_taper(std::size_t n);

// Classical Taylor n-bar line-source synthesis sampled at n element positions.
// sll_db in [-70, -20], nbar >= 2. Rejects nbar/sll combinations outside the
// validity region (sigma < 1) and nbar too large for the element count.
Taper taylor_taper(std::size_t n, double sll_db, int nbar);

// Uniform grid [-span, span] with the given step; step must be <= 0.02 deg so a
// 1.5 deg beam is well resolved.
std::vector<double> angle_grid(double span_deg, double step_deg);

// Power pattern of arbitrary weighted positions on a principal-plane cut
// (kAzimuth sweeps azimuth at elevation 0; kElevation the converse). steer_deg
// steers the beam within the cut plane. Normalized to peak 1.
BeamPattern array_factor(std::span<const Point2> positions, std::span<const double> weights,
                         double freq_hz, double steer_deg, std::span<const double> grid_deg,
                         CutPlane cut = CutPlane::kAzimuth);

// Full az x el power grid, row-major over elevation. Not used by the metric
// path; principal cuts cover the per-axis beamwidths.
std::vector<double> array_factor_2d(std::span<const Point2> positions,
                                    std::span<const double> weights, double freq_hz,
                                    std::span<const double> az_deg,
                                    std::span<const double> el_deg);

// Separable per-element weights w(x)*w(y) for a layout from per-axis tapers.
std::vector<double> planar_weights(const ArrayLayout& layout, const Taper& taper_x,
                                   const Taper& taper_y);

// Weights over virtual positions so that each distinct spatial cell carries the
// per-axis taper value once: taper(x)*taper(y)/multiplicity(cell). Coincident
// samples refine the estimate, they do not reshape the beam.
std::vector<double> virtual_weights(const VirtualArray& va, const Taper& taper_x,
                                    const Taper& taper_y);

// Pointwise product of two linear-power patterns on the same grid, renormalized.
BeamPattern two_way_pattern(const BeamPattern& tx, const BeamPattern& rx);

// Width between the two -3 dB crossings bracketing the peak (linear
// interpolation between grid samples). Throws when a crossing is missing.
double half_power_beamwidth_deg(const BeamPattern& p);

// Peak gain outside the first nulls, in dB relative to the pattern peak.
// Throws when no null brackets the mainlobe.
double peak_sidelobe_dbc(const BeamPattern& p);

// First-null offsets (degrees, relative to the peak angle): {left, right}.
std::pair<double, double> first_null_offsets_deg(const BeamPattern& p);

void write_pattern_csv(std::ostream& os, const BeamPattern& p);

} // namespace wxmimo

#endif
