// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_PHY_CHANNEL_HPP
#define VOWLAN_PHY_CHANNEL_HPP

#include <cstdint>
#include <string>

#include "vowlan/phy/modes.hpp"
#include "vowlan/sim/error.hpp"

namespace vowlan::phy {

// 4-bit channel mask; bit i set means channel i is usable. Two radios can
// exchange frames iff their masks share a bit.
struct ChannelMask {
    unsigned bits = 0;

    constexpr ChannelMask() = default;
    constexpr explicit ChannelMask(unsigned b) : bits(b & 0xFu) {}

    // Parses the scenario notation, e.g. "0100" (MSB = channel 3).
    static ChannelMask parse(const std::string& s) {
        if (s.size() != 4)
            throw ConfigError("channel mask must be 4 bits, got \"" + s + "\"");
        unsigned b = 0;
        for (char c : s) {
            if (c != '0' && c != '1')
                throw ConfigError("channel mask must be binary, got \"" + s + "\"");
            b = (b << 1) | static_cast<unsigned>(c - '0');
        }
        return ChannelMask(b);
    }

    std::string to_string() const {
        std::string s(4, '0');
        for (int i = 0; i < 4; ++i)
            if (bits & (1u << (3 - i)))
                s[static_cast<std::size_t>(i)] = '1';
        return s;
    }

    constexpr bool empty() const { return bits == 0; }
    constexpr bool operator==(const ChannelMask&) const = default;
};

inline constexpr bool channels_compatible(ChannelMask a, ChannelMask b) {
    return (a.bits & b.bits) != 0;
}

enum class Reception { Delivered, LostSnr, LostCollision };

// Reception decision for a frame that reached the antenna. Any temporal
// overlap on a compatible channel destroys the frame (no capture effect);
// otherwise delivery requires SNR at or above the mode threshold (inclusive).
inline Reception reception_outcome(double rx_power_dbm, const PhyMode& mode,
                                   bool concurrent_overlap, double noise_floor_dbm) {
    if (concurrent_overlap)
        return Reception::LostCollision;
    return (rx_power_dbm - noise_floor_dbm) >= mode.min_rx_snr_db
               ? Reception::Delivered
               : Reception::LostSnr;
}

inline const char* reception_name(Reception r) {
    switch (r) {
    case Reception::Delivered: return "delivered";
    case Reception::LostSnr: return "lost_snr";
    case Reception::LostCollision: return "lost_collision";
    }
    return "?";
}

} // namespace vowlan::phy

#endif
