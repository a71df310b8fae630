// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_SIM_KERNEL_HPP
#define VOWLAN_SIM_KERNEL_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "vowlan/sim/error.hpp"
#include "vowlan/sim/time.hpp"

namespace vowlan {

// Opaque handle for a scheduled event; valid for cancellation until the event
// fires. The (fire_at, seq) pair is unique for the lifetime of a run.
struct EventHandle {
    SimTime fire_at{};
    std::uint64_t seq = 0;
    bool valid = false;
};

// Single-threaded discrete-event engine. Events fire in (fire_at, seq)
// lexicographic order; seq is the insertion counter, so simultaneous events
// fire in the order they were scheduled. The clock never moves backwards.
class Kernel {
public:
    using Callback = std::function<void()>;

    SimTime now() const { return now_; }

    EventHandle schedule(SimTime fire_at, Callback fn, const char* target = "") {
        if (fire_at < now_)
            throw MisuseError("Kernel::schedule: event scheduled in the past (t="
                              + std::to_string(fire_at.ticks) + " < now="
                              + std::to_string(now_.ticks) + ", target=" + target + ")");
        const Key key{fire_at.ticks, next_seq_++};
        queue_.emplace(key, Entry{std::move(fn), target});
        return EventHandle{fire_at, key.second, true};
    }

    EventHandle schedule_in(SimTime delay, Callback fn, const char* target = "") {
        return schedule(now_ + delay, std::move(fn), target);
    }

    // True iff the event existed and had not fired; it will no longer fire.
    bool cancel(EventHandle& h) {
        if (!h.valid)
            return false;
        h.valid = false;
        return queue_.erase(Key{h.fire_at.ticks, h.seq}) > 0;
    }

    // Fires every event with fire_at <= t_end (inclusive), then leaves the
    // clock at t_end. Returns the number of events fired.
    std::uint64_t run_until(SimTime t_end) {
        std::uint64_t fired = 0;
        while (!queue_.empty()) {
            auto first = queue_.begin();
            if (first->first.first > t_end.ticks)
                break;
            now_ = SimTime{first->first.first};
            Entry entry = std::move(first->second);
            record_fired(now_, first->first.second, entry.target);
            queue_.erase(first);
            entry.fn();
            ++fired;
        }
        if (t_end > now_)
            now_ = t_end;
        total_fired_ += fired;
        return fired;
    }

    std::size_t pending() const { return queue_.size(); }
    std::uint64_t total_fired() const { return total_fired_; }

    // Tail of recently fired events, oldest first. Attached to fatal
    // state-machine diagnostics.
    std::vector<std::string> recent_trace() const {
        std::vector<std::string> out;
        const std::size_t n = std::min<std::size_t>(recent_count_, kRecent);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& r = recent_[(recent_head_ + kRecent - n + i) % kRecent];
            out.push_back("t=" + std::to_string(r.at.ticks) + "us seq=" +
                          std::to_string(r.seq) + " " + r.target);
        }
        return out;
    }

private:
    using Key = std::pair<std::int64_t, std::uint64_t>; // (ticks, seq)
    struct Entry {
        Callback fn;
        const char* target;
    };
    struct Fired {
        SimTime at;
        std::uint64_t seq;
        const char* target;
    };

    void record_fired(SimTime at, std::uint64_t seq, const char* target) {
        recent_[recent_head_] = Fired{at, seq, target};
        recent_head_ = (recent_head_ + 1) % kRecent;
        ++recent_count_;
    }

    static constexpr std::size_t kRecent = 32;

    std::map<Key, Entry> queue_;
    SimTime now_{};
    std::uint64_t next_seq_ = 0;
    std::uint64_t total_fired_ = 0;
    std::array<Fired, kRecent> recent_{};
    std::size_t recent_head_ = 0;
    std::size_t recent_count_ = 0;
};

} // namespace vowlan

#endif
