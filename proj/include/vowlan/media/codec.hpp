// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_MEDIA_CODEC_HPP
#define VOWLAN_MEDIA_CODEC_HPP

#include <cstdint>
#include <string>

#include "vowlan/net/packet.hpp"
#include "vowlan/sim/error.hpp"
#include "vowlan/sim/time.hpp"

namespace vowlan::media {

enum class CodecName { G711, G729, G7231 };

inline const char* codec_name_str(CodecName c) {
    switch (c) {
    case CodecName::G711: return "G711";
    case CodecName::G729: return "G729";
    case CodecName::G7231: return "G7231";
    }
    return "?";
}

inline CodecName codec_from_string(const std::string& s) {
    if (s == "G711" || s == "g711") return CodecName::G711;
    if (s == "G729" || s == "g729") return CodecName::G729;
    if (s == "G7231" || s == "g7231" || s == "G723.1") return CodecName::G7231;
    throw ConfigError("unknown codec \"" + s + "\" (G711, G729, G7231)");
}

// Waveform codec parameters: 8000 samples/s gathered into fixed-period
// frames. Bit rates are the codec standards' (64 / 8 / 6.3 kbit/s); the frame
// period is the scenario's to vary.
struct Codec {
    CodecName name = CodecName::G711;
    std::int64_t bit_rate_bps = 64000;
    SimTime frame_period = SimTime::ms(20);
    int sample_rate_hz = 8000;
    int frames_per_packet = 1; // aggregation to satisfy the payload floor

    static Codec make(CodecName name, SimTime frame_period, int frames_per_packet = 1) {
        Codec c;
        c.name = name;
        c.frame_period = frame_period;
        c.frames_per_packet = frames_per_packet;
        switch (name) {
        case CodecName::G711: c.bit_rate_bps = 64000; break;
        case CodecName::G729: c.bit_rate_bps = 8000; break;
        case CodecName::G7231: c.bit_rate_bps = 6300; break;
        }
        return c;
    }

    static SimTime default_period(CodecName name) {
        switch (name) {
        case CodecName::G711: return SimTime::ms(20);
        case CodecName::G729: return SimTime::ms(10);
        case CodecName::G7231: return SimTime::ms(30);
        }
        return SimTime::ms(20);
    }
};

struct Packetization {
    std::int64_t payload_bytes = 0;
    SimTime period{};
};

// Frame bits = bit_rate * frame_period, rounded up to whole bytes (G.723.1
// at 6.3 kbit/s x 30 ms = 23.625 -> 24 is the one case that rounds).
// Aggregated frames share one packet. Payload outside the RTP format's
// [20, 160] byte range is a configuration error naming the codec.
inline Packetization codec_packetize(const Codec& c) {
    if (c.frame_period.ticks <= 0)
        throw ConfigError(std::string(codec_name_str(c.name)) + ": frame period must be positive");
    if (c.frames_per_packet < 1)
        throw ConfigError(std::string(codec_name_str(c.name)) + ": frames_per_packet must be >= 1");
    const std::int64_t bits_num = c.bit_rate_bps * c.frame_period.ticks; // bit*us
    const std::int64_t denom = 8ll * 1000000ll;
    const std::int64_t frame_bytes = (bits_num + denom - 1) / denom;
    Packetization p;
    p.payload_bytes = frame_bytes * c.frames_per_packet;
    p.period = SimTime{c.frame_period.ticks * c.frames_per_packet};
    if (p.payload_bytes < net::kVoipPayloadMin || p.payload_bytes > net::kVoipPayloadMax)
        throw ConfigError(std::string(codec_name_str(c.name)) + " at " +
                          std::to_string(c.frame_period.ticks / 1000) + " ms x" +
                          std::to_string(c.frames_per_packet) + " frames/packet yields " +
                          std::to_string(p.payload_bytes) + " B payload, outside [" +
                          std::to_string(net::kVoipPayloadMin) + ", " +
                          std::to_string(net::kVoipPayloadMax) + "]");
    return p;
}

} // namespace vowlan::media

#endif
