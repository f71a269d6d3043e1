// SPDX-License-Identifier: Apache-2.0

#include "wxmimo/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include "wxmimo/csv.hpp"

namespace wxmimo {

namespace {

int quadrant_of(double x, double y) {
    if (x > 0.0) {
        return y > 0.0 ? 1 : 4;
    }
    return y > 0.0 ? 2 : 3;
}

struct GridIndex {
    std::int64_t ix = 0, iy = 0;
    bool operator<(const GridIndex& o) const {
        return ix != o.ix ? ix < o.ix : iy < o.iy;
    }
};

// Map a position onto integer indices of the quantum grid. Returns false when
// the position is further than tol*quantum from any grid node.
bool to_grid(const Point2& p, double quantum, GridIndex& out, double tol = 1e-6) {
    const double fx = p.x / quantum;
    const double fy = p.y / quantum;
    const double rx = std::round(fx);
    const double ry = std::round(fy);
    if (std::abs(fx - rx) > tol || std::abs(fy - ry) > tol) {
        return false;
    }
    out.ix = static_cast<std::int64_t>(rx);
    out.iy = static_cast<std::int64_t>(ry);
    return true;
}

struct CellCounts {
    int cells_x = 0, cells_y = 0;
    int coincidence = 0;
    bool on_grid = false;
};

CellCounts count_cells(const std::vector<Point2>& virt, const ArrayLayout& layout) {
    CellCounts out;
    const double q = layout.spacing / 2.0;
    std::set<std::int64_t> vx, vy;
    std::set<GridIndex> physical;
    for (const Point2& p : layout.elements) {
        GridIndex gi;
        if (!to_grid(p, q, gi)) {
            return out;
        }
        physical.insert(gi);
    }
    int coincidence = 0;
    for (const Point2& p : virt) {
        GridIndex gi;
        if (!to_grid(p, q, gi)) {
            return out;
        }
        vx.insert(gi.ix);
        vy.insert(gi.iy);
        if (physical.count(gi)) {
            ++coincidence;
        }
    }
    out.cells_x = static_cast<int>(vx.size());
    out.cells_y = static_cast<int>(vy.size());
    out.coincidence = coincidence;
    out.on_grid = true;
    return out;
}

} // namespace

ArrayLayout build_planar_array(int nx, int ny, double spacing_m) {
    if (nx < 2 || ny < 2 || nx % 2 != 0 || ny % 2 != 0) {
        throw std::invalid_argument(
            "build_planar_array: nx and ny must be even and >= 2 (equal quadrants)");
    }
    if (!(spacing_m > 0.0)) {
        throw std::invalid_argument("build_planar_array: spacing must be > 0");
    }
    ArrayLayout layout;
    layout.nx = nx;
    layout.ny = ny;
    layout.spacing = spacing_m;
    layout.elements.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double x = (i - (nx - 1) / 2.0) * spacing_m;
            const double y = (j - (ny - 1) / 2.0) * spacing_m;
            layout.elements.push_back({x, y});
            layout.quadrant.push_back(quadrant_of(x, y));
            layout.role.push_back(ElementRole::kTxRx);
        }
    }
    return layout;
}

PhaseCenterSet quadrant_phase_centers(const ArrayLayout& layout) {
    if (layout.elements.empty() || layout.quadrant.size() != layout.elements.size()) {
        throw std::invalid_argument("quadrant_phase_centers: invalid layout");
    }
    PhaseCenterSet pcs;
    pcs.tx_centers.resize(4);
    std::array<std::size_t, 4> counts{};
    std::array<Point2, 4> sums{};
    Point2 total{};
    for (std::size_t k = 0; k < layout.elements.size(); ++k) {
        const int q = layout.quadrant[k];
        if (q < 1 || q > 4) {
            throw std::invalid_argument("quadrant_phase_centers: quadrant index out of range");
        }
        sums[q - 1].x += layout.elements[k].x;
        sums[q - 1].y += layout.elements[k].y;
        ++counts[q - 1];
        total.x += layout.elements[k].x;
        total.y += layout.elements[k].y;
    }
    const std::size_t quarter = layout.elements.size() / 4;
    for (int q = 0; q < 4; ++q) {
        if (counts[q] != quarter) {
            throw std::invalid_argument("quadrant_phase_centers: quadrants are not equal blocks");
        }
        pcs.tx_centers[q] = {sums[q].x / counts[q], sums[q].y / counts[q]};
    }
    const double n = static_cast<double>(layout.elements.size());
    pcs.rx_centers = {{total.x / n, total.y / n}};
    return pcs;
}

PhaseCenterSet full_array_phase_center(const ArrayLayout& layout) {
    if (layout.elements.empty()) {
        throw std::invalid_argument("full_array_phase_center: empty layout");
    }
    Point2 total{};
    for (const Point2& p : layout.elements) {
        total.x += p.x;
        total.y += p.y;
    }
    const double n = static_cast<double>(layout.elements.size());
    PhaseCenterSet pcs;
    pcs.tx_centers = {{total.x / n, total.y / n}};
    pcs.rx_centers = pcs.tx_centers;
    return pcs;
}

VirtualArray virtual_array(const PhaseCenterSet& pcs, const ArrayLayout& rx) {
    if (pcs.tx_centers.empty() || rx.elements.empty()) {
        throw std::invalid_argument("virtual_array: empty TX centers or RX elements");
    }
    VirtualArray va;
    va.positions.reserve(pcs.tx_centers.size() * rx.elements.size());
    Point2 mean{};
    for (const Point2& t : pcs.tx_centers) {
        for (const Point2& r : rx.elements) {
            va.positions.push_back({t.x + r.x, t.y + r.y});
            mean.x += t.x + r.x;
            mean.y += t.y + r.y;
        }
    }
    mean.x /= static_cast<double>(va.positions.size());
    mean.y /= static_cast<double>(va.positions.size());
    double min_x = va.positions.front().x, max_x = min_x;
    double min_y = va.positions.front().y, max_y = min_y;
    for (Point2& p : va.positions) {
        p.x -= mean.x;
        p.y -= mean.y;
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    va.extent_x = max_x - min_x;
    va.extent_y = max_y - min_y;
    va.grid_quantum = rx.spacing / 2.0;

    const CellCounts cc = count_cells(va.positions, rx);
    if (cc.on_grid) {
        va.cells_x = cc.cells_x;
        va.cells_y = cc.cells_y;
        va.coincidence_count = cc.coincidence;
    } else {
        // Off-grid phase centers: fall back to tolerance matching at spacing/100.
        va.cells_x = 0;
        va.cells_y = 0;
        int coincidence = 0;
        const double tol = rx.spacing / 100.0;
        for (const Point2& p : va.positions) {
            for (const Point2& e : rx.elements) {
                if (std::abs(p.x - e.x) <= tol && std::abs(p.y - e.y) <= tol) {
                    ++coincidence;
                    break;
                }
            }
        }
        va.coincidence_count = coincidence;
    }
    return va;
}

double overlap_factor(const VirtualArray& va, const ArrayLayout& layout) {
    const auto [num, den] = extent_ratio_exact(va, layout);
    return static_cast<double>(num) / static_cast<double>(den);
}

std::pair<long long, long long> extent_ratio_exact(const VirtualArray& va,
                                                   const ArrayLayout& layout) {
    if (va.cells_x <= 0 || va.cells_y <= 0) {
        throw std::invalid_argument(
            "overlap_factor: virtual array is not aligned to the layout grid");
    }
    if (std::abs(va.grid_quantum - layout.spacing / 2.0) >
        1e-12 * std::max(1.0, layout.spacing)) {
        throw std::invalid_argument("overlap_factor: virtual array derived from a different layout");
    }
    const long long vx = va.cells_x, vy = va.cells_y;
    const long long px = layout.nx, py = layout.ny;
    if (vx * py != vy * px) {
        throw std::invalid_argument("overlap_factor: axes disagree (anisotropic virtual array)");
    }
    const long long g = std::gcd(vx, px);
    return {vx / g, px / g};
}

void write_geometry_csv(std::ostream& os, const ArrayLayout& layout) {
    os << "x_m,y_m,quadrant,role\n";
    for (std::size_t k = 0; k < layout.elements.size(); ++k) {
        os << csv::num(layout.elements[k].x) << ',' << csv::num(layout.elements[k].y) << ','
           << layout.quadrant[k] << ','
           << (layout.role[k] == ElementRole::kTxRx ? "TX+RX" : "RX") << '\n';
    }
}

void write_virtual_csv(std::ostream& os, const VirtualArray& va) {
    os << "x_m,y_m\n";
    for (const Point2& p : va.positions) {
        os << csv::num(p.x) << ',' << csv::num(p.y) << '\n';
    }
}

} // namespace wxmimo
