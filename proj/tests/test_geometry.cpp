// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "support/oracles.hpp"
#include "wxmimo/geometry.hpp"

using namespace wxmimo;

namespace {

// brute-force coincidence oracle: position matching at tolerance spacing/100
int brute_force_coincidence(const VirtualArray& va, const ArrayLayout& layout) {
    const double tol = layout.spacing / 100.0;
    int count = 0;
    for (const Point2& p : va.positions) {
        for (const Point2& e : layout.elements) {
            if (std::abs(p.x - e.x) <= tol && std::abs(p.y - e.y) <= tol) {
                ++count;
                break;
            }
        }
    }
    return count;
}

// brute-force grid counting oracle for the per-axis independent-sample ratio
double brute_force_overlap(const VirtualArray& va, const ArrayLayout& layout) {
    const double q = layout.spacing / 2.0;
    std::set<long long> vx, vy, px, py;
    for (const Point2& p : va.positions) {
        vx.insert(std::llround(p.x / q));
        vy.insert(std::llround(p.y / q));
    }
    for (const Point2& p : layout.elements) {
        px.insert(std::llround(p.x / q));
        py.insert(std::llround(p.y / q));
    }
    REQUIRE(vx.size() * py.size() == vy.size() * px.size());
    return static_cast<double>(vx.size()) / static_cast<double>(px.size());
}

std::multiset<std::pair<long long, long long>> index_multiset(const VirtualArray& va,
                                                              double quantum) {
    std::multiset<std::pair<long long, long long>> out;
    for (const Point2& p : va.positions) {
        out.insert({std::llround(p.x / quantum), std::llround(p.y / quantum)});
    }
    return out;
}

} // namespace

TEST_CASE("build_planar_array basics") {
    const ArrayLayout a = build_planar_array(8, 8, 0.016);
    CHECK(a.elements.size() == 64);
    CHECK(a.extent_x() == doctest::Approx(0.112).epsilon(1e-12));
    CHECK(a.extent_y() == doctest::Approx(0.112).epsilon(1e-12));
    // centered at the origin
    double sx = 0.0, sy = 0.0;
    for (const auto& p : a.elements) {
        sx += p.x;
        sy += p.y;
    }
    CHECK(std::abs(sx) < 1e-12);
    CHECK(std::abs(sy) < 1e-12);
    // quadrants partition into four equal contiguous blocks
    std::array<int, 4> counts{};
    for (std::size_t k = 0; k < a.elements.size(); ++k) {
        REQUIRE(a.quadrant[k] >= 1);
        REQUIRE(a.quadrant[k] <= 4);
        ++counts[a.quadrant[k] - 1];
        const bool xpos = a.elements[k].x > 0, ypos = a.elements[k].y > 0;
        const int expect = xpos ? (ypos ? 1 : 4) : (ypos ? 2 : 3);
        CHECK(a.quadrant[k] == expect);
    }
    for (const int c : counts) {
        CHECK(c == 16);
    }

    const ArrayLayout tiny = build_planar_array(2, 2, 1.0);
    CHECK(tiny.elements.size() == 4);
    std::set<int> quads(tiny.quadrant.begin(), tiny.quadrant.end());
    CHECK(quads.size() == 4);

    const ArrayLayout paper = build_planar_array(34, 34, 0.016);
    CHECK(paper.extent_x() == doctest::Approx(0.528).epsilon(1e-12));

    CHECK_THROWS_AS(build_planar_array(7, 8, 0.016), std::invalid_argument);
    CHECK_THROWS_AS(build_planar_array(8, 7, 0.016), std::invalid_argument);
    CHECK_THROWS_AS(build_planar_array(8, 8, 0.0), std::invalid_argument);
}

TEST_CASE("quadrant phase centers") {
    const ArrayLayout tiny = build_planar_array(2, 2, 1.0);
    const PhaseCenterSet pcs = quadrant_phase_centers(tiny);
    REQUIRE(pcs.tx_centers.size() == 4);
    REQUIRE(pcs.rx_centers.size() == 1);
    std::multiset<std::pair<double, double>> got;
    for (const auto& t : pcs.tx_centers) {
        got.insert({t.x, t.y});
    }
    const std::multiset<std::pair<double, double>> want{
        {0.5, 0.5}, {-0.5, 0.5}, {-0.5, -0.5}, {0.5, -0.5}};
    CHECK(got == want);

    // 8x8: centroid of each 4x4 block by direct averaging
    const double d = 0.016;
    const ArrayLayout a = build_planar_array(8, 8, d);
    const PhaseCenterSet p8 = quadrant_phase_centers(a);
    std::array<Point2, 4> sums{};
    std::array<int, 4> counts{};
    for (std::size_t k = 0; k < a.elements.size(); ++k) {
        sums[a.quadrant[k] - 1].x += a.elements[k].x;
        sums[a.quadrant[k] - 1].y += a.elements[k].y;
        ++counts[a.quadrant[k] - 1];
    }
    for (int q = 0; q < 4; ++q) {
        CHECK(p8.tx_centers[q].x == doctest::Approx(sums[q].x / counts[q]).epsilon(1e-14));
        CHECK(p8.tx_centers[q].y == doctest::Approx(sums[q].y / counts[q]).epsilon(1e-14));
        CHECK(std::abs(std::abs(p8.tx_centers[q].x) - 2.0 * d) < 1e-12);
        CHECK(std::abs(std::abs(p8.tx_centers[q].y) - 2.0 * d) < 1e-12);
    }

    // mean of the TX centers equals the RX center; 90-degree rotation symmetry
    double mx = 0.0, my = 0.0;
    std::multiset<std::pair<double, double>> rotated, original;
    for (const auto& t : p8.tx_centers) {
        mx += t.x / 4.0;
        my += t.y / 4.0;
        original.insert({t.x, t.y});
        rotated.insert({-t.y, t.x});
    }
    CHECK(std::abs(mx - p8.rx_centers[0].x) < 1e-15);
    CHECK(std::abs(my - p8.rx_centers[0].y) < 1e-15);
    CHECK(rotated == original);
}

TEST_CASE("virtual array identity and counts") {
    const ArrayLayout a = build_planar_array(8, 8, 0.016);
    PhaseCenterSet identity;
    identity.tx_centers = {{0.0, 0.0}};
    identity.rx_centers = {{0.0, 0.0}};
    const VirtualArray va = virtual_array(identity, a);
    REQUIRE(va.positions.size() == a.elements.size());
    for (std::size_t k = 0; k < a.elements.size(); ++k) {
        CHECK(va.positions[k].x == doctest::Approx(a.elements[k].x).epsilon(1e-12));
        CHECK(va.positions[k].y == doctest::Approx(a.elements[k].y).epsilon(1e-12));
    }
    CHECK(overlap_factor(va, a) == 1.0);

    const PhaseCenterSet quad = quadrant_phase_centers(a);
    const VirtualArray vq = virtual_array(quad, a);
    CHECK(vq.positions.size() == 4 * 64);
    CHECK(vq.coincidence_count == brute_force_coincidence(vq, a));
    CHECK(vq.coincidence_count == 144);
    // extent(virtual) = extent(physical) + spread(tx centers)
    CHECK(vq.extent_x == doctest::Approx(a.extent_x() + 4 * 0.016).epsilon(1e-12));
}

TEST_CASE("quadrant-scheme law: 1.5x cells and overlap factor, exact") {
    for (const int n : {4, 8, 16, 34}) {
        const ArrayLayout a = build_planar_array(n, n, 0.016);
        const VirtualArray va = virtual_array(quadrant_phase_centers(a), a);
        const auto ratio = extent_ratio_exact(va, a);
        CHECK(ratio.first == 3);
        CHECK(ratio.second == 2);
        CHECK(overlap_factor(va, a) == 1.5);
        CHECK(va.cells_x == 3 * n / 2);
        CHECK(brute_force_overlap(va, a) == 1.5);
    }
}

TEST_CASE("convolution symmetry: swapping TX and RX roles keeps the multiset") {
    const ArrayLayout a = build_planar_array(4, 4, 0.5);
    const PhaseCenterSet quad = quadrant_phase_centers(a);
    const VirtualArray forward = virtual_array(quad, a);

    // swapped: TX at the element positions, RX "layout" holding the 4 centers
    PhaseCenterSet swapped;
    swapped.tx_centers = a.elements;
    swapped.rx_centers = {{0.0, 0.0}};
    ArrayLayout centers_as_layout = build_planar_array(2, 2, 1.0);
    centers_as_layout.spacing = a.spacing;
    centers_as_layout.elements = quad.tx_centers;
    const VirtualArray backward = virtual_array(swapped, centers_as_layout);

    CHECK(index_multiset(forward, a.spacing / 2) == index_multiset(backward, a.spacing / 2));
}

TEST_CASE("scaling: coordinates scale the extent, overlap unchanged") {
    for (const double s : {0.25, 3.0}) {
        const ArrayLayout a = build_planar_array(8, 8, 0.016);
        const ArrayLayout b = build_planar_array(8, 8, 0.016 * s);
        const VirtualArray va = virtual_array(quadrant_phase_centers(a), a);
        const VirtualArray vb = virtual_array(quadrant_phase_centers(b), b);
        CHECK(vb.extent_x == doctest::Approx(va.extent_x * s).epsilon(1e-12));
        CHECK(overlap_factor(vb, b) == overlap_factor(va, a));
    }
}

TEST_CASE("count law: |virtual| = |TX| * |RX| for arbitrary TX subsets") {
    const ArrayLayout a = build_planar_array(6, 6, 0.03);
    for (const std::size_t ntx : {1u, 2u, 3u, 5u}) {
        PhaseCenterSet pcs;
        for (std::size_t k = 0; k < ntx; ++k) {
            pcs.tx_centers.push_back(a.elements[k * 7 % a.elements.size()]);
        }
        pcs.rx_centers = {{0.0, 0.0}};
        const VirtualArray va = virtual_array(pcs, a);
        CHECK(va.positions.size() == ntx * a.elements.size());
    }
}

TEST_CASE("overlap_factor rejects mismatched geometries") {
    const ArrayLayout a = build_planar_array(8, 8, 0.016);
    const ArrayLayout other = build_planar_array(8, 8, 0.020);
    const VirtualArray va = virtual_array(quadrant_phase_centers(a), a);
    CHECK_THROWS_AS(overlap_factor(va, other), std::invalid_argument);

    // off-grid TX centers leave the cell counts unavailable
    PhaseCenterSet odd;
    odd.tx_centers = {{0.0137, 0.0}, {-0.0137, 0.0}};
    odd.rx_centers = {{0.0, 0.0}};
    const VirtualArray voff = virtual_array(odd, a);
    CHECK(voff.cells_x == 0);
    CHECK_THROWS_AS(overlap_factor(voff, a), std::invalid_argument);
}

TEST_CASE("geometry csv export") {
    const ArrayLayout a = build_planar_array(2, 2, 1.0);
    std::ostringstream os;
    write_geometry_csv(os, a);
    const std::string out = os.str();
    CHECK(out.rfind("x_m,y_m,quadrant,role\n", 0) == 0);
    CHECK(out.find("TX+RX") != std::string::npos);
    CHECK(std::count(out.begin(), out.end(), '\n') == 5);
}
