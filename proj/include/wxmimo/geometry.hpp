// SPDX-License-Identifier: Apache-2.0
//
// Planar array layouts, quadrant phase centers, and virtual arrays formed by
// the spatial convolution of transmit and receive phase centers.

#ifndef WXMIMO_GEOMETRY_HPP
#define WXMIMO_GEOMETRY_HPP

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

namespace wxmimo {

struct Point2 {
    double x = 0.0; // m
    double y = 0.0; // m
};

enum class ElementRole { kRx, kTxRx };

struct ArrayLayout {
    int nx = 0, ny = 0;
    double spacing = 0.0;              // grid pitch, m
    std::vector<Point2> elements;      // grid positions centered at the origin
    std::vector<int> quadrant;         // per element, 1..4
    std::vector<ElementRole> role;     // per element

    double extent_x() const { return (nx - 1) * spacing; }
    double extent_y() const { return (ny - 1) * spacing; }
};

struct PhaseCenterSet {
    std::vector<Point2> tx_centers;
    std::vector<Point2> rx_centers;
};

struct VirtualArray {
    std::vector<Point2> positions; // tx (+) rx convolution, multiplicity retained, centered
    double extent_x = 0.0;         // geometric span of positions, m
    double extent_y = 0.0;
    int cells_x = 0;               // distinct occupied grid columns/rows (0 if off-grid)
    int cells_y = 0;
    int coincidence_count = 0;     // virtual samples landing on physical element positions
    double grid_quantum = 0.0;     // index quantum used for the cell counts (spacing/2)
};

// Regular nx x ny grid with the given pitch, centered at the origin. Quadrants
// are assigned by the sign of (x, y); all elements are TX+RX in the quadrant
// scheme. nx, ny must be even (quadrants partition equally) and >= 2.
ArrayLayout build_planar_array(int nx, int ny, double spacing_m);

// Four TX centers at the quadrant centroids plus one RX center at the array
// centroid. The TX set is symmetric under 90-degree rotation.
PhaseCenterSet quadrant_phase_centers(const ArrayLayout& layout);

// Single TX phase center at the array centroid (surveillance / phased-array mode).
PhaseCenterSet full_array_phase_center(const ArrayLayout& layout);

// Virtual positions {t + r - c : t in tx_centers, r in rx elements}, c chosen so
// the set is centered at the origin. |positions| = |tx| * |rx| always.
VirtualArray virtual_array(const PhaseCenterSet& pcs, const ArrayLayout& rx);

// Ratio of distinct spatial sample positions per axis to physical positions per
// axis, exact on grid indices. 1.0 for a single TX center, 1.5 for the quadrant
// scheme on any even N x N layout. Throws if the virtual array does not sit on
// the layout's half-pitch grid or the two axes disagree.
double overlap_factor(const VirtualArray& va, const ArrayLayout& layout);

// Per-axis occupied-cell ratio as a reduced integer fraction (virtual, physical).
std::pair<long long, long long> extent_ratio_exact(const VirtualArray& va,
                                                   const ArrayLayout& layout);

void write_geometry_csv(std::ostream& os, const ArrayLayout& layout);
void write_virtual_csv(std::ostream& os, const VirtualArray& va);

} // namespace wxmimo

#endif
