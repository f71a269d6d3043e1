// SPDX-License-Identifier: Apache-2.0

#include "wxmimo/mimo_model.hpp"

#include <cmath>
#include <stdexcept>

#include "wxmimo/constants.hpp"

namespace wxmimo {

std::vector<double> geometric_delays(std::span<const Point2> centers, Direction dir) {
    if (centers.empty()) {
        throw std::invalid_argument("geometric_delays: empty phase-center list");
    }
    const double el = deg2rad(dir.el_deg);
    const double ux = std::sin(deg2rad(dir.az_deg)) * std::cos(el);
    const double uy = std::sin(el);
    std::vector<double> tau(centers.size());
    for (std::size_t m = 0; m < centers.size(); ++m) {
        tau[m] = (centers[m].x * ux + centers[m].y * uy) / kSpeedOfLight;
    }
    return tau;
}

std::vector<std::complex<double>> steering_vector(std::span<const Point2> centers,
                                                  Direction dir, double frequency_hz) {
    const std::vector<double> tau = geometric_delays(centers, dir);
    std::vector<std::complex<double>> v(tau.size());
    for (std::size_t m = 0; m < tau.size(); ++m) {
        v[m] = std::polar(1.0, 2.0 * kPi * frequency_hz * tau[m]);
    }
    return v;
}

SteeringContext make_steering_context(std::span<const Point2> tx_centers,
                                      std::span<const Point2> rx_centers, Direction dir,
                                      double frequency_hz) {
    SteeringContext ctx;
    ctx.tx_delays_s = geometric_delays(tx_centers, dir);
    ctx.rx_delays_s = geometric_delays(rx_centers, dir);
    ctx.frequency_hz = frequency_hz;
    ctx.direction = dir;
    return ctx;
}

PathMatrix path_matrix(const SteeringContext& ctx) {
    if (ctx.tx_delays_s.empty() || ctx.rx_delays_s.empty()) {
        throw std::invalid_argument("path_matrix: empty delay sets");
    }
    PathMatrix pm;
    pm.n_tx = ctx.tx_delays_s.size();
    pm.n_rx = ctx.rx_delays_s.size();
    std::vector<std::complex<double>> at(pm.n_tx), ar(pm.n_rx);
    for (std::size_t k = 0; k < pm.n_tx; ++k) {
        at[k] = std::polar(1.0, 2.0 * kPi * ctx.frequency_hz * ctx.tx_delays_s[k]);
    }
    for (std::size_t l = 0; l < pm.n_rx; ++l) {
        ar[l] = std::polar(1.0, 2.0 * kPi * ctx.frequency_hz * ctx.rx_delays_s[l]);
    }
    pm.a.resize(pm.n_tx * pm.n_rx);
    for (std::size_t k = 0; k < pm.n_tx; ++k) {
        for (std::size_t l = 0; l < pm.n_rx; ++l) {
            pm.a[k * pm.n_rx + l] = at[k] * ar[l];
        }
    }
    return pm;
}

std::vector<std::complex<double>> synthesize_snapshot(
    const PathMatrix& a, std::span<const std::complex<double>> tx_samples) {
    if (tx_samples.size() != a.n_tx) {
        throw std::invalid_argument("synthesize_snapshot: |tx_samples| must equal N_t");
    }
    std::vector<std::complex<double>> out(a.n_rx, {0.0, 0.0});
    for (std::size_t k = 0; k < a.n_tx; ++k) {
        for (std::size_t l = 0; l < a.n_rx; ++l) {
            out[l] += a.at(k, l) * tx_samples[k];
        }
    }
    return out;
}

} // namespace wxmimo
