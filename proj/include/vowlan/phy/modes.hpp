// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_PHY_MODES_HPP
#define VOWLAN_PHY_MODES_HPP

#include <array>
#include <string>

#include "vowlan/sim/error.hpp"

namespace vowlan::phy {

// One 802.11a OFDM rate. A symbol lasts 4 us, so a mode carrying R Mbit/s
// moves 4*R data bits per symbol.
struct PhyMode {
    int data_rate_mbps = 54;
    int data_bits_per_symbol = 216;
    double min_rx_snr_db = 25.0;

    bool operator==(const PhyMode&) const = default;
};

// The eight mandatory/optional 802.11a rates. The per-mode receive SNR
// thresholds are defaults (monotone in rate) and can be overridden per
// scenario; only their ordering matters to the shipped scenarios.
inline const std::array<PhyMode, 8>& mode_table() {
    static const std::array<PhyMode, 8> table{{
        {6, 24, 6.0},
        {9, 36, 8.0},
        {12, 48, 10.0},
        {18, 72, 12.0},
        {24, 96, 15.0},
        {36, 144, 19.0},
        {48, 192, 22.0},
        {54, 216, 25.0},
    }};
    return table;
}

inline PhyMode mode_for_rate(int mbps) {
    for (const auto& m : mode_table())
        if (m.data_rate_mbps == mbps)
            return m;
    throw ConfigError("unknown 802.11a data rate: " + std::to_string(mbps) +
                      " Mbit/s (valid: 6, 9, 12, 18, 24, 36, 48, 54)");
}

} // namespace vowlan::phy

#endif
