// SPDX-License-Identifier: Apache-2.0

#include "wxmimo/beampattern.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>

#include "wxmimo/constants.hpp"
#include "wxmimo/csv.hpp"
#include "wxmimo/kernels/kernels.hpp"

namespace wxmimo {

namespace {

std::size_t peak_index(const BeamPattern& p) {
    if (p.gain.empty() || p.gain.size() != p.angles_deg.size()) {
        throw std::invalid_argument("pattern: empty or inconsistent");
    }
    return static_cast<std::size_t>(
        std::max_element(p.gain.begin(), p.gain.end()) - p.gain.begin());
}

// Walk outward from the peak while the (normalized) gain is non-increasing;
// the turning point is the first null. Returns npos if the walk hits the edge.
std::size_t walk_to_null(const std::vector<double>& g, std::size_t peak, int dir) {
    std::size_t i = peak;
    while (true) {
        const std::ptrdiff_t next = static_cast<std::ptrdiff_t>(i) + dir;
        if (next < 0 || next >= static_cast<std::ptrdiff_t>(g.size())) {
            return static_cast<std::size_t>(-1);
        }
        if (g[static_cast<std::size_t>(next)] > g[i]) {
            return i;
        }
        i = static_cast<std::size_t>(next);
    }
}

} // namespace

Taper uniform_taper(std::size_t n) {
    Taper t;
    t.kind = TaperKind::kUniform;
    t.weights.assign(n, 1.0);
    return t;
}

Taper taylor_taper(std::size_t n, double sll_db, int nbar) {
    if (n < 2) {
        throw std::invalid_argument("taylor_taper: need at least 2 elements");
    }
    // -13.26 dB is the uniform aperture's natural level; shallower is unphysical
    if (!(sll_db >= -70.0 && sll_db <= -13.0)) {
        throw std::invalid_argument("taylor_taper: sll_db outside [-70, -13]");
    }
    if (nbar < 2) {
        throw std::invalid_argument("taylor_taper: nbar must be >= 2");
    }
    const double R = std::pow(10.0, -sll_db / 20.0);
    const double A = std::acosh(R) / kPi;
    const double sigma2 = nbar * nbar / (A * A + (nbar - 0.5) * (nbar - 0.5));
    if (sigma2 < 1.0) {
        throw std::invalid_argument(
            "taylor_taper: nbar incompatible with sll (need nbar >= A^2 + 0.25 = " +
            std::to_string(A * A + 0.25) + ")");
    }
    if (static_cast<std::size_t>(nbar - 1) > n / 2) {
        throw std::invalid_argument(
            "taylor_taper: nbar too large for the requested sll/element count (max " +
            std::to_string(n / 2 + 1) + ")");
    }

    std::vector<double> F(static_cast<std::size_t>(nbar) - 1, 0.0);
    for (int m = 1; m < nbar; ++m) {
        double num = 1.0, den = 1.0;
        for (int k = 1; k < nbar; ++k) {
            num *= 1.0 - m * m / (sigma2 * (A * A + (k - 0.5) * (k - 0.5)));
            if (k != m) {
                den *= 1.0 - static_cast<double>(m) * m / (static_cast<double>(k) * k);
            }
        }
        F[m - 1] = ((m % 2 == 1) ? 0.5 : -0.5) * num / den;
    }

    Taper t;
    t.kind = TaperKind::kTaylor;
    t.sll_db = sll_db;
    t.nbar = nbar;
    t.weights.resize(n);
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = (static_cast<double>(k) - (n - 1) / 2.0) / static_cast<double>(n);
        double w = 1.0;
        for (int m = 1; m < nbar; ++m) {
            w += 2.0 * F[m - 1] * std::cos(2.0 * kPi * m * x);
        }
        t.weights[k] = w;
        sum += w;
    }
    const double scale = static_cast<double>(n) / sum;
    for (double& w : t.weights) {
        w *= scale;
    }
    // enforce exact symmetry against rounding drift in the cos evaluations
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double avg = 0.5 * (t.weights[k] + t.weights[n - 1 - k]);
        t.weights[k] = avg;
        t.weights[n - 1 - k] = avg;
    }
    return t;
}

std::vector<double> angle_grid(double span_deg, double step_deg) {
    if (!(step_deg > 0.0) || step_deg > 0.02) {
        throw std::invalid_argument("angle_grid: step must be in (0, 0.02] deg");
    }
    if (!(span_deg > 0.0) || span_deg > 90.0) {
        throw std::invalid_argument("angle_grid: span must be in (0, 90] deg");
    }
    const auto n = static_cast<std::size_t>(std::llround(2.0 * span_deg / step_deg));
    std::vector<double> grid(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        grid[i] = -span_deg + static_cast<double>(i) * step_deg;
    }
    return grid;
}

BeamPattern array_factor(std::span<const Point2> positions, std::span<const double> weights,
                         double freq_hz, double steer_deg, std::span<const double> grid_deg,
                         CutPlane cut) {
    if (positions.empty()) {
        throw std::invalid_argument("array_factor: empty positions");
    }
    if (weights.size() != positions.size()) {
        throw std::invalid_argument("array_factor: weights/positions size mismatch");
    }
    if (grid_deg.empty()) {
        throw std::invalid_argument("array_factor: empty angle grid");
    }
    if (std::abs(steer_deg) > 90.0) {
        throw std::invalid_argument("array_factor: |steer| must be <= 90 deg");
    }
    if (!(freq_hz > 0.0)) {
        throw std::invalid_argument("array_factor: frequency must be > 0");
    }
    for (std::size_t i = 1; i < grid_deg.size(); ++i) {
        if (!(grid_deg[i] > grid_deg[i - 1])) {
            throw std::invalid_argument("array_factor: angle grid not strictly increasing");
        }
    }

    // On a principal cut only one coordinate enters the phase; collapse
    // positions sharing it so large planar arrays cost one term per column.
    std::map<double, double> collapsed;
    for (std::size_t k = 0; k < positions.size(); ++k) {
        const double c = (cut == CutPlane::kAzimuth) ? positions[k].x : positions[k].y;
        collapsed[c] += weights[k];
    }
    std::vector<double> coord, wsum, zeros;
    coord.reserve(collapsed.size());
    wsum.reserve(collapsed.size());
    for (const auto& [c, w] : collapsed) {
        coord.push_back(c);
        wsum.push_back(w);
    }
    zeros.assign(coord.size(), 0.0);

    const double k_wave = 2.0 * kPi / wavelength_m(freq_hz);
    const double u_steer = std::sin(deg2rad(steer_deg));

    BeamPattern p;
    p.frequency_hz = freq_hz;
    p.angles_deg.assign(grid_deg.begin(), grid_deg.end());
    p.gain.resize(grid_deg.size());
    double gmax = 0.0;
    for (std::size_t i = 0; i < grid_deg.size(); ++i) {
        const double u = std::sin(deg2rad(grid_deg[i])) - u_steer;
        const std::complex<double> v =
            kernels::phase_sum(coord.data(), zeros.data(), wsum.data(), coord.size(),
                               k_wave * u, 0.0);
        p.gain[i] = std::norm(v);
        gmax = std::max(gmax, p.gain[i]);
    }
    if (!(gmax > 0.0)) {
        throw std::invalid_argument("array_factor: degenerate pattern (zero gain everywhere)");
    }
    for (double& g : p.gain) {
        g /= gmax;
    }
    return p;
}

std::vector<double> array_factor_2d(std::span<const Point2> positions,
                                    std::span<const double> weights, double freq_hz,
                                    std::span<const double> az_deg,
                                    std::span<const double> el_deg) {
    if (positions.empty() || weights.size() != positions.size()) {
        throw std::invalid_argument("array_factor_2d: bad positions/weights");
    }
    if (az_deg.empty() || el_deg.empty()) {
        throw std::invalid_argument("array_factor_2d: empty angle grid");
    }
    std::vector<double> xs(positions.size()), ys(positions.size()), ws(weights.begin(),
                                                                       weights.end());
    for (std::size_t k = 0; k < positions.size(); ++k) {
        xs[k] = positions[k].x;
        ys[k] = positions[k].y;
    }
    const double k_wave = 2.0 * kPi / wavelength_m(freq_hz);
    std::vector<double> out(az_deg.size() * el_deg.size());
    double gmax = 0.0;
    for (std::size_t j = 0; j < el_deg.size(); ++j) {
        const double el = deg2rad(el_deg[j]);
        const double uy = std::sin(el);
        for (std::size_t i = 0; i < az_deg.size(); ++i) {
            const double ux = std::sin(deg2rad(az_deg[i])) * std::cos(el);
            const std::complex<double> v = kernels::phase_sum(
                xs.data(), ys.data(), ws.data(), xs.size(), k_wave * ux, k_wave * uy);
            out[j * az_deg.size() + i] = std::norm(v);
            gmax = std::max(gmax, out[j * az_deg.size() + i]);
        }
    }
    for (double& g : out) {
        g /= gmax;
    }
    return out;
}

std::vector<double> planar_weights(const ArrayLayout& layout, const Taper& taper_x,
                                   const Taper& taper_y) {
    if (taper_x.weights.size() != static_cast<std::size_t>(layout.nx) ||
        taper_y.weights.size() != static_cast<std::size_t>(layout.ny)) {
        throw std::invalid_argument("planar_weights: taper length must match layout axes");
    }
    std::vector<double> w(layout.elements.size());
    for (int j = 0; j < layout.ny; ++j) {
        for (int i = 0; i < layout.nx; ++i) {
            w[static_cast<std::size_t>(j) * layout.nx + i] =
                taper_x.weights[i] * taper_y.weights[j];
        }
    }
    return w;
}

std::vector<double> virtual_weights(const VirtualArray& va, const Taper& taper_x,
                                    const Taper& taper_y) {
    if (va.cells_x <= 0 || va.cells_y <= 0) {
        throw std::invalid_argument("virtual_weights: virtual array is not grid-aligned");
    }
    if (taper_x.weights.size() != static_cast<std::size_t>(va.cells_x) ||
        taper_y.weights.size() != static_cast<std::size_t>(va.cells_y)) {
        throw std::invalid_argument("virtual_weights: taper length must match cell counts");
    }
    const double q = va.grid_quantum;
    std::map<std::int64_t, int> xs, ys;
    std::map<std::pair<std::int64_t, std::int64_t>, int> mult;
    std::vector<std::pair<std::int64_t, std::int64_t>> idx(va.positions.size());
    for (std::size_t k = 0; k < va.positions.size(); ++k) {
        const auto ix = static_cast<std::int64_t>(std::llround(va.positions[k].x / q));
        const auto iy = static_cast<std::int64_t>(std::llround(va.positions[k].y / q));
        idx[k] = {ix, iy};
        xs[ix] = 0;
        ys[iy] = 0;
        ++mult[{ix, iy}];
    }
    int rank = 0;
    for (auto& [k, v] : xs) {
        v = rank++;
    }
    rank = 0;
    for (auto& [k, v] : ys) {
        v = rank++;
    }
    std::vector<double> w(va.positions.size());
    for (std::size_t k = 0; k < va.positions.size(); ++k) {
        const double t = taper_x.weights[xs[idx[k].first]] * taper_y.weights[ys[idx[k].second]];
        w[k] = t / mult[idx[k]];
    }
    return w;
}

BeamPattern two_way_pattern(const BeamPattern& tx, const BeamPattern& rx) {
    if (tx.angles_deg != rx.angles_deg) {
        throw std::invalid_argument("two_way_pattern: angle grids differ");
    }
    BeamPattern p;
    p.frequency_hz = tx.frequency_hz;
    p.angles_deg = tx.angles_deg;
    p.gain.resize(tx.gain.size());
    double gmax = 0.0;
    for (std::size_t i = 0; i < tx.gain.size(); ++i) {
        p.gain[i] = tx.gain[i] * rx.gain[i];
        gmax = std::max(gmax, p.gain[i]);
    }
    if (!(gmax > 0.0)) {
        throw std::invalid_argument("two_way_pattern: degenerate product");
    }
    for (double& g : p.gain) {
        g /= gmax;
    }
    return p;
}

double half_power_beamwidth_deg(const BeamPattern& p) {
    const std::size_t peak = peak_index(p);
    const double half = 0.5 * p.gain[peak];
    const auto cross = [&](int dir) -> double {
        std::size_t i = peak;
        while (true) {
            const std::ptrdiff_t next = static_cast<std::ptrdiff_t>(i) + dir;
            if (next < 0 || next >= static_cast<std::ptrdiff_t>(p.gain.size())) {
                throw std::invalid_argument(
                    "half_power_beamwidth: no -3 dB crossing inside the grid");
            }
            const auto j = static_cast<std::size_t>(next);
            if (p.gain[j] < half) {
                const double f = (half - p.gain[i]) / (p.gain[j] - p.gain[i]);
                return p.angles_deg[i] + f * (p.angles_deg[j] - p.angles_deg[i]);
            }
            i = j;
        }
    };
    return cross(+1) - cross(-1);
}

std::pair<double, double> first_null_offsets_deg(const BeamPattern& p) {
    const std::size_t peak = peak_index(p);
    const std::size_t left = walk_to_null(p.gain, peak, -1);
    const std::size_t right = walk_to_null(p.gain, peak, +1);
    if (left == static_cast<std::size_t>(-1) || right == static_cast<std::size_t>(-1)) {
        throw std::invalid_argument("pattern: no null brackets the mainlobe");
    }
    return {p.angles_deg[left] - p.angles_deg[peak], p.angles_deg[right] - p.angles_deg[peak]};
}

double peak_sidelobe_dbc(const BeamPattern& p) {
    const std::size_t peak = peak_index(p);
    const std::size_t left = walk_to_null(p.gain, peak, -1);
    const std::size_t right = walk_to_null(p.gain, peak, +1);
    if (left == static_cast<std::size_t>(-1) || right == static_cast<std::size_t>(-1)) {
        throw std::invalid_argument("peak_sidelobe: no null brackets the mainlobe");
    }
    double side = 0.0;
    for (std::size_t i = 0; i < left; ++i) {
        side = std::max(side, p.gain[i]);
    }
    for (std::size_t i = right + 1; i < p.gain.size(); ++i) {
        side = std::max(side, p.gain[i]);
    }
    if (!(side > 0.0)) {
        throw std::invalid_argument("peak_sidelobe: no sidelobe energy outside the first nulls");
    }
    return 10.0 * std::log10(side / p.gain[peak]);
}

void write_pattern_csv(std::ostream& os, const BeamPattern& p) {
    os << "angle_deg,gain_db\n";
    for (std::size_t i = 0; i < p.angles_deg.size(); ++i) {
        const double db = p.gain[i] > 0.0 ? 10.0 * std::log10(p.gain[i]) : -400.0;
        os << csv::num(p.angles_deg[i]) << ',' << csv::num(db) << '\n';
    }
}

} // namespace wxmimo
