// SPDX-License-Identifier: Apache-2.0
//
// MIMO snapshot signal model: geometric delays, steering vectors, the
// TX-by-RX path matrix, and snapshot synthesis. Phase convention is
// exp(+j*2*pi*f*tau) throughout; only relative phases matter downstream.

#ifndef WXMIMO_MIMO_MODEL_HPP
#define WXMIMO_MIMO_MODEL_HPP

#include <complex>
#include <span>
#include <vector>

#include "wxmimo/geometry.hpp"

namespace wxmimo {

struct Direction {
    double az_deg = 0.0;
    double el_deg = 0.0;
};

struct SteeringContext {
    std::vector<double> tx_delays_s;
    std::vector<double> rx_delays_s;
    double frequency_hz = 0.0; // narrowband: constant over a pulse
    Direction direction;
};

// (p . u)/c per phase center, with direction cosines u = (sin az cos el, sin el).
// Zero for a phase center at the origin.
std::vector<double> geometric_delays(std::span<const Point2> centers, Direction dir);

std::vector<std::complex<double>> steering_vector(std::span<const Point2> centers,
                                                  Direction dir, double frequency_hz);

SteeringContext make_steering_context(std::span<const Point2> tx_centers,
                                      std::span<const Point2> rx_centers, Direction dir,
                                      double frequency_hz);

struct PathMatrix {
    std::size_t n_tx = 0, n_rx = 0;
    std::vector<std::complex<double>> a; // row-major, a[k*n_rx + l], |a| == 1

    std::complex<double> at(std::size_t k, std::size_t l) const { return a[k * n_rx + l]; }
};

// A[k, l] = exp(j*2*pi*f*(tau_tx[k] + tau_rx[l])), built as the outer product of
// the two steering vectors (rank 1 by construction).
PathMatrix path_matrix(const SteeringContext& ctx);

// Received snapshot: per-RX sample sum_k A[k, l] * tx_samples[k].
std::vector<std::complex<double>> synthesize_snapshot(
    const PathMatrix& a, std::span<const std::complex<double>> tx_samples);

} // namespace wxmimo

#endif
