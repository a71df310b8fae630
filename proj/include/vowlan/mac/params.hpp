// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_MAC_PARAMS_HPP
#define VOWLAN_MAC_PARAMS_HPP

#include <algorithm>

#include "vowlan/sim/error.hpp"
#include "vowlan/sim/time.hpp"

namespace vowlan::mac {

// 802.11a MAC parameters. Slot/CW values follow the 802.11a PHY; SIFS is the
// standard's 16 us. DIFS and PIFS are derived, never stored.
struct MacParams {
    SimTime slot_time = SimTime::us(9);
    SimTime sifs = SimTime::us(16);
    int cw_min = 16;
    int cw_max = 1023;
    int retry_limit = 7;
    int ack_bytes = 14;
    int mac_header_bytes = 24;
    int fcs_bytes = 4;
    bool rts_cts = false;
    int rts_bytes = 20;
    int cts_bytes = 14;
    // SIFS + ACK airtime + one slot of margin; filled in from the control
    // rate when a scenario is loaded.
    SimTime ack_timeout = SimTime::us(16 + 44 + 9);

    void validate() const {
        if (cw_min > cw_max)
            throw ConfigError("mac: cw_min > cw_max");
        if (slot_time.ticks < 0 || sifs.ticks <= 0)
            throw ConfigError("mac: slot_time/sifs must be positive");
        if (retry_limit < 0)
            throw ConfigError("mac: retry_limit must be >= 0");
    }
};

// DIFS = SIFS + 2 * slot time. Gates every new DCF transmission.
inline SimTime difs(const MacParams& p) { return p.sifs + 2 * p.slot_time; }

// PIFS = SIFS + slot time. Lets the point coordinator seize the medium ahead
// of DCF stations (PIFS < DIFS whenever slot_time > 0).
inline SimTime pifs(const MacParams& p) { return p.sifs + p.slot_time; }

// Binary exponential growth clamped at cw_max: 16 -> 33 -> 67 -> ... -> 1023.
// The window resets to cw_min on delivery success (callers do that).
inline int next_cw(int cw, const MacParams& p) {
    if (cw < p.cw_min)
        throw MisuseError("next_cw: cw below cw_min");
    return std::min((cw + 1) * 2 - 1, p.cw_max);
}

} // namespace vowlan::mac

#endif
