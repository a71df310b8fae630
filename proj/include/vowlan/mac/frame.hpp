// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_MAC_FRAME_HPP
#define VOWLAN_MAC_FRAME_HPP

#include <cstdint>

#include "vowlan/mac/params.hpp"
#include "vowlan/phy/airtime.hpp"
#include "vowlan/phy/modes.hpp"

namespace vowlan::mac {

using NodeId = int;

// MAC protocol data unit: header + variable body + FCS. Control frames (Ack,
// Rts, Cts) have a fixed total size instead; Null carries no payload.
struct Mpdu {
    enum class Kind { Data, Ack, Beacon, Poll, Null, Rts, Cts };

    Kind kind = Kind::Data;
    NodeId src = 0;
    NodeId dst = 0;
    std::int64_t body_bytes = 0;
    // Identifies the network-layer packet riding in a Data frame (index into
    // the engine's in-flight table); -1 for control/management frames.
    std::int64_t packet_ref = -1;

    std::int64_t total_bytes(const MacParams& p) const {
        switch (kind) {
        case Kind::Ack: return p.ack_bytes;
        case Kind::Rts: return p.rts_bytes;
        case Kind::Cts: return p.cts_bytes;
        case Kind::Data:
        case Kind::Beacon:
        case Kind::Poll:
        case Kind::Null:
            return p.mac_header_bytes + body_bytes + p.fcs_bytes;
        }
        return 0;
    }

    SimTime airtime(const MacParams& p, const phy::PhyMode& mode) const {
        return phy::ppdu_duration(total_bytes(p), mode);
    }
};

inline const char* mpdu_kind_name(Mpdu::Kind k) {
    switch (k) {
    case Mpdu::Kind::Data: return "data";
    case Mpdu::Kind::Ack: return "ack";
    case Mpdu::Kind::Beacon: return "beacon";
    case Mpdu::Kind::Poll: return "poll";
    case Mpdu::Kind::Null: return "null";
    case Mpdu::Kind::Rts: return "rts";
    case Mpdu::Kind::Cts: return "cts";
    }
    return "?";
}

// Data frame airtime + SIFS + ACK airtime: the full cost of one successful
// unicast exchange, excluding the access wait in front of it.
inline SimTime ack_exchange_time(std::int64_t body_bytes, const phy::PhyMode& data_mode,
                                 const phy::PhyMode& ctrl_mode, const MacParams& p) {
    const std::int64_t mpdu = p.mac_header_bytes + body_bytes + p.fcs_bytes;
    return phy::ppdu_duration(mpdu, data_mode) + p.sifs +
           phy::ppdu_duration(p.ack_bytes, ctrl_mode);
}

} // namespace vowlan::mac

#endif
