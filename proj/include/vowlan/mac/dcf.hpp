// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_MAC_DCF_HPP
#define VOWLAN_MAC_DCF_HPP

#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "vowlan/mac/frame.hpp"
#include "vowlan/mac/params.hpp"
#include "vowlan/sim/error.hpp"
#include "vowlan/sim/rng.hpp"
#include "vowlan/sim/time.hpp"

namespace vowlan::mac {

// CSMA/CA access rules implemented here:
//  - A frame arriving to an idle medium waits one DIFS and transmits with no
//    backoff on this first attempt.
//  - A frame arriving to a busy medium draws a backoff immediately; once the
//    medium frees, the station waits DIFS and counts the backoff down.
//  - If the medium turns busy during the first DIFS, the backoff is drawn at
//    that point (found busy on first sense).
//  - A busy medium during the countdown freezes the timer at its current
//    value; counting resumes after the next idle DIFS from the frozen value.
//  - A missing ACK doubles the window (clamped), redraws the backoff, and
//    retries; a frame that exhausts retry_limit is dropped and the window
//    resets.
//  - Queued follow-up frames always go through DIFS + backoff (they arrived
//    while the station itself held the medium).

enum class DcfPhase { Idle, WaitDifs, Backoff, Transmitting, WaitAck };

inline const char* dcf_phase_name(DcfPhase p) {
    switch (p) {
    case DcfPhase::Idle: return "Idle";
    case DcfPhase::WaitDifs: return "WaitDifs";
    case DcfPhase::Backoff: return "Backoff";
    case DcfPhase::Transmitting: return "Transmitting";
    case DcfPhase::WaitAck: return "WaitAck";
    }
    return "?";
}

struct DcfState {
    DcfPhase phase = DcfPhase::Idle;
    int cw = 16;
    SimTime backoff_remaining{0};
    SimTime backoff_started_at{0};
    bool counting = false; // backoff timer currently running
    int retries = 0;
    bool medium_busy = false;
    std::deque<Mpdu> pending;

    static DcfState initial(const MacParams& p) {
        DcfState s;
        s.cw = p.cw_min;
        return s;
    }
};

struct DcfInput {
    enum class Kind {
        FrameEnqueued,
        MediumBusy,
        MediumIdle,
        DifsExpired,
        BackoffExpired,
        TxDone,
        AckReceived,
        AckTimeout,
    };
    Kind kind;
    Mpdu frame{}; // FrameEnqueued only

    static DcfInput enqueue(Mpdu f) { return {Kind::FrameEnqueued, std::move(f)}; }
    static DcfInput medium_busy() { return {Kind::MediumBusy, {}}; }
    static DcfInput medium_idle() { return {Kind::MediumIdle, {}}; }
    static DcfInput difs_expired() { return {Kind::DifsExpired, {}}; }
    static DcfInput backoff_expired() { return {Kind::BackoffExpired, {}}; }
    static DcfInput tx_done() { return {Kind::TxDone, {}}; }
    static DcfInput ack_received() { return {Kind::AckReceived, {}}; }
    static DcfInput ack_timeout() { return {Kind::AckTimeout, {}}; }
};

inline const char* dcf_input_name(DcfInput::Kind k) {
    switch (k) {
    case DcfInput::Kind::FrameEnqueued: return "FrameEnqueued";
    case DcfInput::Kind::MediumBusy: return "MediumBusy";
    case DcfInput::Kind::MediumIdle: return "MediumIdle";
    case DcfInput::Kind::DifsExpired: return "DifsExpired";
    case DcfInput::Kind::BackoffExpired: return "BackoffExpired";
    case DcfInput::Kind::TxDone: return "TxDone";
    case DcfInput::Kind::AckReceived: return "AckReceived";
    case DcfInput::Kind::AckTimeout: return "AckTimeout";
    }
    return "?";
}

struct DcfAction {
    enum class Kind {
        StartTimer,
        CancelTimer,
        TransmitPpdu,
        FreezeBackoff,
        DropFrame,
        DeliverSuccess,
    };
    enum class Timer { None, Difs, Backoff, AckTimeout };

    Kind kind;
    Timer timer = Timer::None;
    SimTime duration{};
    Mpdu frame{};
};

// Backoff Time = k * slot_time, k uniform over [0, CW] inclusive.
inline SimTime draw_backoff(const DcfState& state, const MacParams& p, Rng& rng) {
    const auto k = rng.uniform_int(0, state.cw);
    return SimTime{k * p.slot_time.ticks};
}

namespace detail {

inline void start_access(DcfState& s, const MacParams& p, std::vector<DcfAction>& out) {
    if (!s.medium_busy) {
        s.phase = DcfPhase::WaitDifs;
        out.push_back({DcfAction::Kind::StartTimer, DcfAction::Timer::Difs, difs(p), {}});
    } else {
        s.phase = DcfPhase::Backoff; // frozen until the medium frees
        s.counting = false;
    }
}

// Frame at the head finished (delivered or dropped): reset the window and
// move to the next pending frame, which always takes the backoff path.
inline void advance_queue(DcfState& s, const MacParams& p, Rng& rng,
                          std::vector<DcfAction>& out) {
    s.cw = p.cw_min;
    s.retries = 0;
    if (s.pending.empty()) {
        s.phase = DcfPhase::Idle;
        s.backoff_remaining = SimTime{0};
        return;
    }
    s.backoff_remaining = draw_backoff(s, p, rng);
    start_access(s, p, out);
}

[[noreturn]] inline void illegal(const DcfState& s, const DcfInput& in) {
    throw MisuseError(std::string("dcf_step: illegal input ") +
                      dcf_input_name(in.kind) + " in phase " +
                      dcf_phase_name(s.phase));
}

} // namespace detail

// Pure transition function: state and input in, new state and actions out.
// Timers live in the caller; StartTimer/CancelTimer/FreezeBackoff tell it
// what to do with them.
inline std::pair<DcfState, std::vector<DcfAction>>
dcf_step(DcfState state, const DcfInput& in, SimTime now, const MacParams& p, Rng& rng) {
    std::vector<DcfAction> out;
    using K = DcfInput::Kind;

    switch (in.kind) {
    case K::FrameEnqueued:
        state.pending.push_back(in.frame);
        if (state.phase == DcfPhase::Idle) {
            state.retries = 0;
            state.backoff_remaining =
                state.medium_busy ? draw_backoff(state, p, rng) : SimTime{0};
            detail::start_access(state, p, out);
        }
        break;

    case K::MediumBusy:
        if (state.medium_busy)
            break; // already known busy
        state.medium_busy = true;
        if (state.phase == DcfPhase::WaitDifs) {
            out.push_back({DcfAction::Kind::CancelTimer, DcfAction::Timer::Difs, {}, {}});
            if (state.backoff_remaining.ticks == 0)
                state.backoff_remaining = draw_backoff(state, p, rng);
            state.phase = DcfPhase::Backoff;
            state.counting = false;
        } else if (state.phase == DcfPhase::Backoff && state.counting) {
            // Only whole idle slots count; a partial slot is not consumed.
            const std::int64_t elapsed = (now - state.backoff_started_at).ticks;
            const std::int64_t slots = elapsed / p.slot_time.ticks;
            const std::int64_t counted =
                std::min(slots * p.slot_time.ticks, state.backoff_remaining.ticks);
            state.backoff_remaining -= SimTime{counted};
            state.counting = false;
            out.push_back({DcfAction::Kind::FreezeBackoff, DcfAction::Timer::Backoff,
                           state.backoff_remaining, {}});
        }
        break;

    case K::MediumIdle:
        if (!state.medium_busy)
            break;
        state.medium_busy = false;
        if (state.phase == DcfPhase::Backoff && !state.counting) {
            state.phase = DcfPhase::WaitDifs;
            out.push_back({DcfAction::Kind::StartTimer, DcfAction::Timer::Difs, difs(p), {}});
        }
        break;

    case K::DifsExpired:
        if (state.phase != DcfPhase::WaitDifs || state.medium_busy)
            detail::illegal(state, in);
        if (state.backoff_remaining.ticks == 0) {
            state.phase = DcfPhase::Transmitting;
            out.push_back({DcfAction::Kind::TransmitPpdu, DcfAction::Timer::None, {},
                           state.pending.front()});
        } else {
            state.phase = DcfPhase::Backoff;
            state.counting = true;
            state.backoff_started_at = now;
            out.push_back({DcfAction::Kind::StartTimer, DcfAction::Timer::Backoff,
                           state.backoff_remaining, {}});
        }
        break;

    case K::BackoffExpired:
        if (state.phase != DcfPhase::Backoff || !state.counting || state.medium_busy)
            detail::illegal(state, in);
        state.counting = false;
        state.backoff_remaining = SimTime{0};
        state.phase = DcfPhase::Transmitting;
        out.push_back({DcfAction::Kind::TransmitPpdu, DcfAction::Timer::None, {},
                       state.pending.front()});
        break;

    case K::TxDone:
        if (state.phase != DcfPhase::Transmitting || state.pending.empty())
            detail::illegal(state, in);
        if (state.pending.front().kind == Mpdu::Kind::Data) {
            state.phase = DcfPhase::WaitAck;
            out.push_back({DcfAction::Kind::StartTimer, DcfAction::Timer::AckTimeout,
                           p.ack_timeout, {}});
        } else {
            // Unacknowledged kinds complete at end of transmission.
            out.push_back({DcfAction::Kind::DeliverSuccess, DcfAction::Timer::None, {},
                           state.pending.front()});
            state.pending.pop_front();
            detail::advance_queue(state, p, rng, out);
        }
        break;

    case K::AckReceived:
        if (state.phase != DcfPhase::WaitAck)
            break; // stray ACK (e.g. raced with the timeout); ignore
        out.push_back({DcfAction::Kind::CancelTimer, DcfAction::Timer::AckTimeout, {}, {}});
        out.push_back({DcfAction::Kind::DeliverSuccess, DcfAction::Timer::None, {},
                       state.pending.front()});
        state.pending.pop_front();
        detail::advance_queue(state, p, rng, out);
        break;

    case K::AckTimeout:
        if (state.phase != DcfPhase::WaitAck || state.pending.empty())
            detail::illegal(state, in);
        if (state.retries >= p.retry_limit) {
            out.push_back({DcfAction::Kind::DropFrame, DcfAction::Timer::None, {},
                           state.pending.front()});
            state.pending.pop_front();
            detail::advance_queue(state, p, rng, out);
        } else {
            ++state.retries;
            state.cw = next_cw(state.cw, p);
            state.backoff_remaining = draw_backoff(state, p, rng);
            detail::start_access(state, p, out);
        }
        break;
    }
    return {std::move(state), std::move(out)};
}

} // namespace vowlan::mac

#endif
