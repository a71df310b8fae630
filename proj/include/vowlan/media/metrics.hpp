// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_MEDIA_METRICS_HPP
#define VOWLAN_MEDIA_METRICS_HPP

#include <cstdint>
#include <optional>

#include "vowlan/sim/error.hpp"
#include "vowlan/sim/time.hpp"

namespace vowlan::media {

// Per-direction flow counters. Byte counts are IP-layer (payload plus
// RTP/UDP/IP headers), taken above the MAC so retransmissions never inflate
// them.
struct FlowMetrics {
    std::int64_t bytes_sent = 0;
    std::int64_t bytes_received = 0;
    std::int64_t bytes_lost = 0;
    std::int64_t payload_bits_delivered = 0;
    SimTime rtp_delay_sum{};
    std::uint64_t rtp_delivered = 0;
    std::uint64_t packets_sent = 0;
    std::uint64_t packets_lost = 0;

    void on_sent(std::int64_t wire_bytes) {
        bytes_sent += wire_bytes;
        ++packets_sent;
    }
    void on_delivered(std::int64_t wire_bytes, std::int64_t payload_bytes, SimTime delay) {
        bytes_received += wire_bytes;
        payload_bits_delivered += payload_bytes * 8;
        rtp_delay_sum += delay;
        ++rtp_delivered;
    }
    void on_lost(std::int64_t wire_bytes) {
        bytes_lost += wire_bytes;
        ++packets_lost;
    }

    bool conserved() const { return bytes_sent == bytes_received + bytes_lost; }
};

// Mean send-to-receive delay over delivered packets, on the one simulated
// clock. Unset (not zero) when nothing was delivered.
inline std::optional<double> rtp_avg_e2e_delay_s(const FlowMetrics& m) {
    if (m.rtp_delivered == 0)
        return std::nullopt;
    return m.rtp_delay_sum.seconds() / static_cast<double>(m.rtp_delivered);
}

// Delivered payload bits per second of window.
inline double overall_throughput_bps(std::int64_t payload_bits_delivered, SimTime window) {
    if (window.ticks <= 0)
        throw MisuseError("overall_throughput: window must be positive");
    return static_cast<double>(payload_bits_delivered) / window.seconds();
}

} // namespace vowlan::media

#endif
