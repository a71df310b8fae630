// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_NET_PACKET_HPP
#define VOWLAN_NET_PACKET_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "vowlan/sim/error.hpp"
#include "vowlan/sim/time.hpp"

namespace vowlan::net {

inline constexpr std::int64_t kRtpHeaderBytes = 12;
inline constexpr std::int64_t kUdpHeaderBytes = 8;
inline constexpr std::int64_t kIpHeaderBytes = 20;

inline constexpr std::int64_t kVoipPayloadMin = 20;
inline constexpr std::int64_t kVoipPayloadMax = 160;

// RTP + UDP + IP header bytes on every media packet.
inline constexpr std::int64_t header_overhead() {
    return kRtpHeaderBytes + kUdpHeaderBytes + kIpHeaderBytes; // 40
}

// UDP + IP only; signaling and background traffic carry no RTP header.
inline constexpr std::int64_t transport_overhead() {
    return kUdpHeaderBytes + kIpHeaderBytes; // 28
}

enum class PacketKind { RtpMedia, Signaling, Ftp, Cbr };

inline const char* packet_kind_name(PacketKind k) {
    switch (k) {
    case PacketKind::RtpMedia: return "rtp";
    case PacketKind::Signaling: return "signaling";
    case PacketKind::Ftp: return "ftp";
    case PacketKind::Cbr: return "cbr";
    }
    return "?";
}

// IP-layer unit exchanged between applications and the MAC. wire_bytes is
// what both the byte metrics and the MAC body size see; the MAC adds its own
// 28 bytes of header+FCS on air.
struct Packet {
    PacketKind kind = PacketKind::RtpMedia;
    std::int64_t payload_bytes = 0;
    std::uint64_t seq_no = 0;
    SimTime created_at{};
    int flow_id = -1;
    bool reverse = false; // false: initiator->receiver direction
    int src_node = 0;
    int dst_node = 0;

    std::int64_t wire_bytes() const {
        return payload_bytes +
               (kind == PacketKind::RtpMedia ? header_overhead() : transport_overhead());
    }
};

// Wraps a codec payload in RTP/UDP/IP. Payload bounds come from the media
// packet format; a violation is a configuration problem (bad codec setting),
// not a runtime fault.
inline Packet encapsulate_voip(std::int64_t payload_bytes) {
    if (payload_bytes < kVoipPayloadMin || payload_bytes > kVoipPayloadMax)
        throw ConfigError("voip payload of " + std::to_string(payload_bytes) +
                          " bytes outside [" + std::to_string(kVoipPayloadMin) + ", " +
                          std::to_string(kVoipPayloadMax) +
                          "]; adjust the codec frame period or aggregation");
    Packet p;
    p.kind = PacketKind::RtpMedia;
    p.payload_bytes = payload_bytes;
    return p;
}

enum class LossReason {
    None,
    MacRetryExhausted,
    SnrBelowThreshold,
    Collision,
    DroppedAtProxy,
    EndOfRun,
};

inline const char* loss_reason_name(LossReason r) {
    switch (r) {
    case LossReason::None: return "none";
    case LossReason::MacRetryExhausted: return "mac_retry_exhausted";
    case LossReason::SnrBelowThreshold: return "snr";
    case LossReason::Collision: return "collision";
    case LossReason::DroppedAtProxy: return "dropped_at_proxy";
    case LossReason::EndOfRun: return "end_of_run";
    }
    return "?";
}

// Fate of one packet: either a receive timestamp or a loss reason. The raw
// material behind the byte and delay metrics.
struct DeliveryRecord {
    int flow_id = -1;
    bool reverse = false;
    std::uint64_t seq_no = 0;
    SimTime sent_at{};
    std::optional<SimTime> received_at;
    LossReason lost = LossReason::None;
    std::int64_t wire_bytes = 0;
    std::int64_t payload_bytes = 0;
    PacketKind kind = PacketKind::RtpMedia;

    bool delivered() const { return received_at.has_value(); }
    bool resolved() const { return delivered() || lost != LossReason::None; }
};

enum class TransportOutcome { Delivered, SilentlyLost };

// UDP semantics: a loss is silent. No retransmission, no sender notification;
// MAC-level retries are a separate, bounded mechanism below this layer.
inline TransportOutcome udp_delivery_contract(DeliveryRecord& rec, SimTime received_at,
                                              bool was_delivered, LossReason reason_if_lost) {
    if (was_delivered) {
        if (received_at < rec.sent_at)
            throw MisuseError("udp_delivery_contract: received before sent");
        rec.received_at = received_at;
        rec.lost = LossReason::None;
        return TransportOutcome::Delivered;
    }
    rec.received_at.reset();
    rec.lost = reason_if_lost;
    return TransportOutcome::SilentlyLost;
}

} // namespace vowlan::net

#endif
