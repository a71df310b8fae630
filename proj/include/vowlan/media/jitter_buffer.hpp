// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_MEDIA_JITTER_BUFFER_HPP
#define VOWLAN_MEDIA_JITTER_BUFFER_HPP

#include <cstdint>

#include "vowlan/sim/time.hpp"

namespace vowlan::media {

enum class JitterOutcome { Queued, DroppedLate };

// Fixed-offset playout buffer, anchored on the first arrival. Packet s is
// due at first_arrival + playout_offset + (s - first_seq) * period; anything
// arriving after its deadline is dropped (and only those are).
class JitterBuffer {
public:
    JitterBuffer() = default;
    JitterBuffer(SimTime depth, SimTime period)
        : depth_(depth), playout_offset_(depth), period_(period) {}

    JitterOutcome offer(std::uint64_t seq_no, SimTime arrived) {
        if (!anchored_) {
            anchored_ = true;
            anchor_time_ = arrived;
            anchor_seq_ = seq_no;
            ++queued_;
            return JitterOutcome::Queued;
        }
        const SimTime deadline = deadline_for(seq_no);
        if (arrived > deadline) {
            ++dropped_late_;
            return JitterOutcome::DroppedLate;
        }
        ++queued_;
        return JitterOutcome::Queued;
    }

    SimTime deadline_for(std::uint64_t seq_no) const {
        const std::int64_t gap =
            static_cast<std::int64_t>(seq_no) - static_cast<std::int64_t>(anchor_seq_);
        return anchor_time_ + playout_offset_ + SimTime{gap * period_.ticks};
    }

    SimTime depth() const { return depth_; }
    std::uint64_t queued() const { return queued_; }
    std::uint64_t dropped_late() const { return dropped_late_; }

private:
    SimTime depth_ = SimTime::ms(60);
    SimTime playout_offset_ = SimTime::ms(60);
    SimTime period_ = SimTime::ms(20);
    bool anchored_ = false;
    SimTime anchor_time_{};
    std::uint64_t anchor_seq_ = 0;
    std::uint64_t queued_ = 0;
    std::uint64_t dropped_late_ = 0;
};

} // namespace vowlan::media

#endif
