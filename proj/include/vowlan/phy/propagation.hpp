// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_PHY_PROPAGATION_HPP
#define VOWLAN_PHY_PROPAGATION_HPP

#include <cmath>

#include "vowlan/sim/error.hpp"

namespace vowlan::phy {

inline constexpr double kSpeedOfLight = 299792458.0;

struct RadioConfig {
    double tx_power_dbm = 39.0;
    double antenna_gain_dbi = 15.0;
    double carrier_freq_hz = 5.7e9;
    double antenna_height_m = 1.5;
    double noise_floor_dbm = -96.0;

    bool operator==(const RadioConfig&) const = default;
};

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Crossover distance between the free-space and ground-reflection regimes:
//
//   d_c = 4 * pi * h_t * h_r / lambda
//
// At d_c both equations predict the same power, so the combined model is
// continuous there.
inline double crossover_distance_m(const RadioConfig& tx, const RadioConfig& rx) {
    const double lambda = kSpeedOfLight / tx.carrier_freq_hz;
    return 4.0 * M_PI * tx.antenna_height_m * rx.antenna_height_m / lambda;
}

// Two-ray ground reflection receive power.
//
// Below d_c, Friis free space:   Pr = Pt*Gt*Gr * (lambda / (4*pi*d))^2
// At/beyond d_c, ground bounce:  Pr = Pt*Gt*Gr * ht^2*hr^2 / d^4
//
// All math in linear units; the result is converted back to dBm.
inline double two_ray_rx_power_dbm(const RadioConfig& tx, const RadioConfig& rx,
                                   double distance_m) {
    if (distance_m <= 0.0)
        throw MisuseError("two_ray_rx_power: distance must be positive");

    const double lambda = kSpeedOfLight / tx.carrier_freq_hz;
    const double pt_mw = dbm_to_mw(tx.tx_power_dbm);
    const double gt = db_to_linear(tx.antenna_gain_dbi);
    const double gr = db_to_linear(rx.antenna_gain_dbi);
    const double dc = crossover_distance_m(tx, rx);

    double pr_mw;
    if (distance_m < dc) {
        const double ratio = lambda / (4.0 * M_PI * distance_m);
        pr_mw = pt_mw * gt * gr * ratio * ratio;
    } else {
        const double ht = tx.antenna_height_m;
        const double hr = rx.antenna_height_m;
        pr_mw = pt_mw * gt * gr * (ht * ht * hr * hr) /
                (distance_m * distance_m * distance_m * distance_m);
    }
    return mw_to_dbm(pr_mw);
}

} // namespace vowlan::phy

#endif
