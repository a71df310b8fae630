// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_MEDIA_SOURCES_HPP
#define VOWLAN_MEDIA_SOURCES_HPP

#include <cstdint>
#include <utility>

#include "vowlan/media/codec.hpp"
#include "vowlan/net/packet.hpp"
#include "vowlan/sim/error.hpp"
#include "vowlan/sim/time.hpp"

namespace vowlan::media {

// Periodic RTP packetizer: one packet every codec period, jitter-free at the
// source, sequence numbers dense from 0. Emission times are start + k*period
// in exact integer ticks, so there is no drift over any horizon.
class RtpSource {
public:
    RtpSource() = default;
    RtpSource(const Codec& codec, int flow_id, bool reverse, int src_node, int dst_node)
        : pack_(codec_packetize(codec)), flow_id_(flow_id), reverse_(reverse),
          src_node_(src_node), dst_node_(dst_node) {}

    // Emits the packet due now; returns it and the next emission time.
    std::pair<net::Packet, SimTime> tick(SimTime now) {
        net::Packet p = net::encapsulate_voip(pack_.payload_bytes);
        p.seq_no = next_seq_++;
        p.created_at = now;
        p.flow_id = flow_id_;
        p.reverse = reverse_;
        p.src_node = src_node_;
        p.dst_node = dst_node_;
        return {p, now + pack_.period};
    }

    const Packetization& packetization() const { return pack_; }
    std::uint64_t emitted() const { return next_seq_; }

private:
    Packetization pack_{160, SimTime::ms(20)};
    int flow_id_ = -1;
    bool reverse_ = false;
    int src_node_ = 0;
    int dst_node_ = 0;
    std::uint64_t next_seq_ = 0;
};

// Constant-bit-rate background source: fixed-size packets at a fixed period.
class CbrSource {
public:
    CbrSource() = default;
    CbrSource(std::int64_t rate_bps, std::int64_t packet_bytes, int flow_id,
              int src_node, int dst_node)
        : packet_bytes_(packet_bytes), flow_id_(flow_id), src_node_(src_node),
          dst_node_(dst_node) {
        if (rate_bps <= 0)
            throw ConfigError("cbr: rate must be positive");
        if (packet_bytes <= 0)
            throw ConfigError("cbr: packet size must be positive");
        // period = bits per packet / rate, to the nearest microsecond
        period_ = SimTime{(packet_bytes * 8 * 1000000 + rate_bps / 2) / rate_bps};
        if (period_.ticks <= 0)
            throw ConfigError("cbr: rate too high for a 1 us tick");
    }

    std::pair<net::Packet, SimTime> tick(SimTime now) {
        net::Packet p;
        p.kind = net::PacketKind::Cbr;
        p.payload_bytes = packet_bytes_;
        p.seq_no = next_seq_++;
        p.created_at = now;
        p.flow_id = flow_id_;
        p.src_node = src_node_;
        p.dst_node = dst_node_;
        return {p, now + period_};
    }

    SimTime period() const { return period_; }

private:
    std::int64_t packet_bytes_ = 512;
    SimTime period_ = SimTime::ms(10);
    int flow_id_ = -1;
    int src_node_ = 0;
    int dst_node_ = 0;
    std::uint64_t next_seq_ = 0;
};

// Closed-loop file transfer, stop-and-wait at the application: the next
// segment is handed to the MAC when the previous one's first hop resolves
// (acknowledged or dropped); a dropped segment is sent again until it clears.
struct FtpTransfer {
    std::int64_t file_bytes = 0;
    std::int64_t segment_bytes = 1024;
    std::int64_t sent_ok_bytes = 0; // segments that cleared the first hop
    std::uint64_t next_seq = 0;
    std::uint64_t app_retransmits = 0;

    void validate() const {
        if (segment_bytes <= 0)
            throw ConfigError("ftp: segment size must be positive");
        if (segment_bytes > 1460)
            throw ConfigError("ftp: segment of " + std::to_string(segment_bytes) +
                              " B exceeds the 1460 B MTU-safe bound");
        if (file_bytes < 0)
            throw ConfigError("ftp: negative file size");
    }

    bool done() const { return sent_ok_bytes >= file_bytes; }

    std::int64_t next_segment_size() const {
        const std::int64_t remaining = file_bytes - sent_ok_bytes;
        return remaining < segment_bytes ? remaining : segment_bytes;
    }

    net::Packet make_segment(SimTime now, int flow_id, int src_node, int dst_node) {
        net::Packet p;
        p.kind = net::PacketKind::Ftp;
        p.payload_bytes = next_segment_size();
        p.seq_no = next_seq;
        p.created_at = now;
        p.flow_id = flow_id;
        p.src_node = src_node;
        p.dst_node = dst_node;
        return p;
    }

    // First-hop fate of the outstanding segment.
    void on_first_hop_resolved(bool delivered) {
        if (delivered) {
            sent_ok_bytes += next_segment_size();
            ++next_seq;
        } else {
            ++app_retransmits; // same segment goes again
        }
    }
};

} // namespace vowlan::media

#endif
