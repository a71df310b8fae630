// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_PHY_AIRTIME_HPP
#define VOWLAN_PHY_AIRTIME_HPP

#include <cstdint>

#include "vowlan/phy/modes.hpp"
#include "vowlan/sim/error.hpp"
#include "vowlan/sim/time.hpp"

namespace vowlan::phy {

// PLCP framing constants for the OFDM PHY.
inline constexpr std::int64_t kPreambleUs = 16;     // PLCP preamble
inline constexpr std::int64_t kSignalHeaderUs = 4;  // SIGNAL field, one symbol
inline constexpr std::int64_t kSymbolUs = 4;
inline constexpr int kServiceBits = 16;
inline constexpr int kTailBits = 6;

// On-air duration of a PPDU carrying an MPDU of the given size:
//
//   T = 16us preamble + 4us SIGNAL
//     + 4us * ceil((16 service + 8*bytes + 6 tail) / data_bits_per_symbol)
//
// The final symbol is padded up to a whole symbol, so T - 20us is always a
// multiple of 4us.
inline SimTime ppdu_duration(std::int64_t mpdu_bytes, const PhyMode& mode) {
    if (mpdu_bytes < 0)
        throw MisuseError("ppdu_duration: negative MPDU size");
    const std::int64_t data_bits = kServiceBits + 8 * mpdu_bytes + kTailBits;
    const std::int64_t symbols =
        (data_bits + mode.data_bits_per_symbol - 1) / mode.data_bits_per_symbol;
    return SimTime::us(kPreambleUs + kSignalHeaderUs + kSymbolUs * symbols);
}

// Pad bits appended to fill the last symbol.
inline int ppdu_pad_bits(std::int64_t mpdu_bytes, const PhyMode& mode) {
    const std::int64_t data_bits = kServiceBits + 8 * mpdu_bytes + kTailBits;
    const std::int64_t rem = data_bits % mode.data_bits_per_symbol;
    return rem == 0 ? 0 : static_cast<int>(mode.data_bits_per_symbol - rem);
}

} // namespace vowlan::phy

#endif
