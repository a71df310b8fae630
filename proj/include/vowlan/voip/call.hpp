// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_VOIP_CALL_HPP
#define VOWLAN_VOIP_CALL_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "vowlan/net/packet.hpp"
#include "vowlan/sim/error.hpp"
#include "vowlan/sim/time.hpp"
#include "vowlan/voip/messages.hpp"

namespace vowlan::voip {

// Serialized setup legs before a call is established. SIP after registration:
// INVITE, 200 OK, ACK. The H.323 basic flow: ARQ, ACF, Setup, Call
// Proceeding, Alerting, Connect, two capability sets, OLC + ack in each
// direction. The gap between the two is what makes H.323 session setup slower
// on identical channels.
inline constexpr int kSipSetupLegs = 3;
inline constexpr int kH323SetupLegs = 12;

// The H.323 flow is configuration-visible: dropping the Call Proceeding /
// Alerting progress legs shrinks the basic call to 10 legs.
struct H323FlowOptions {
    bool progress_legs = true;
};

inline constexpr int h323_setup_legs(const H323FlowOptions& o) {
    return o.progress_legs ? kH323SetupLegs : kH323SetupLegs - 2;
}

// Signaling reliability and forwarding knobs (both protocols ride UDP here,
// so the application layer retransmits; a symmetric policy keeps the
// comparison fair).
struct SignalingPolicy {
    SimTime retransmit_initial = SimTime::ms(500);
    int retransmit_backoff = 2; // timer doubles per try
    int retransmit_max = 6;     // retransmissions before giving up
    SimTime proxy_forward_delay = SimTime::ms(2);
    SimTime endpoint_delay = SimTime::us(0);
};

enum class CallPhase {
    // shared
    Start,
    Established,
    Terminated,
    Cancelled,
    // SIP
    SipRegistered,
    SipCalling,   // initiator: INVITE out, awaiting 200 OK
    SipAnswering, // receiver: 200 OK out, awaiting ACK
    // H.323 initiator
    H323AdmissionWait,
    H323SetupSent,
    H323Proceeding,
    H323Alerted,
    H323CapsSent,
    H323OlcSent,
    H323OlcAcked,
    // H.323 receiver
    H323ProceedingSent,
    H323AlertingSent,
    H323ConnectSent,
    H323CapsReplied,
    H323OlcAckSent,
    H323OlcSentBack,
};

struct CallState {
    Protocol protocol = Protocol::Sip;
    Role role = Role::Initiator;
    CallPhase phase = CallPhase::Start;
    std::optional<SimTime> initiated_at;
    std::optional<SimTime> established_at;
    std::optional<SimTime> terminated_at;
    std::int64_t bytes_sent = 0;
    std::int64_t bytes_received = 0;
    std::uint64_t messages_sent = 0;
    std::uint64_t messages_received = 0;
    std::uint64_t stray_dropped = 0; // wrong-phase arrivals (e.g. duplicates)
    bool setup_failed = false;

    bool established() const { return established_at.has_value(); }

    void mark_established(SimTime now) {
        if (established_at)
            throw MisuseError("call: established_at set twice");
        if (initiated_at && now < *initiated_at)
            throw MisuseError("call: established before initiated");
        established_at = now;
    }
};

// Transport accounting, applied by whoever actually moves the messages (the
// engine, or a test harness): application size + UDP/IP overhead.
inline void note_sent(CallState& c, int size_bytes) {
    c.bytes_sent += size_bytes + net::transport_overhead();
    ++c.messages_sent;
}
inline void note_received(CallState& c, int size_bytes) {
    c.bytes_received += size_bytes + net::transport_overhead();
    ++c.messages_received;
}

struct ByteTotals {
    std::int64_t sent = 0;
    std::int64_t received = 0;
};

inline ByteTotals signaling_byte_totals(const CallState& c) {
    return {c.bytes_sent, c.bytes_received};
}

struct EstablishmentTimes {
    // Absolute simulation time of establishment (the reported convention) and
    // the latency relative to call initiation.
    std::optional<SimTime> established_at;
    std::optional<SimTime> setup_latency;
};

inline EstablishmentTimes establishment_time(const CallState& c) {
    if (!c.established_at)
        return {};
    EstablishmentTimes t;
    t.established_at = c.established_at;
    if (c.initiated_at)
        t.setup_latency = *c.established_at - *c.initiated_at;
    return t;
}

// ---------------------------------------------------------------------------
// SIP

struct SipInput {
    enum class Kind { AgentStart, StartCall, HangUp, Message };
    Kind kind;
    SipMessage msg{};

    static SipInput agent_start() { return {Kind::AgentStart, {}}; }
    static SipInput start_call() { return {Kind::StartCall, {}}; }
    static SipInput hang_up() { return {Kind::HangUp, {}}; }
    static SipInput message(SipMessage m) { return {Kind::Message, m}; }
};

namespace detail {

inline SipMessage make_sip(SipMethod m, Role from, const SignalingSizes& sz) {
    return SipMessage{m, sz.size_of(m), from, true};
}

} // namespace detail

// SIP call machine, both roles. Registration happens once at agent start;
// INVITE / 200 OK / ACK establish, BYE tears down, CANCEL aborts a pending
// INVITE. Wrong-phase messages are dropped and counted, never fatal.
inline std::pair<CallState, std::vector<SipMessage>>
sip_step(CallState state, const SipInput& in, SimTime now,
         const SignalingSizes& sizes = {}) {
    std::vector<SipMessage> out;
    const Role me = state.role;

    auto stray = [&] { ++state.stray_dropped; };

    switch (in.kind) {
    case SipInput::Kind::AgentStart:
        if (state.phase == CallPhase::Start) {
            out.push_back(detail::make_sip(SipMethod::Register, me, sizes));
            state.phase = CallPhase::SipRegistered;
        }
        break;

    case SipInput::Kind::StartCall:
        if (me != Role::Initiator)
            throw MisuseError("sip_step: StartCall on a receiver agent");
        if (state.phase != CallPhase::SipRegistered)
            throw MisuseError("sip_step: StartCall before registration");
        state.initiated_at = now;
        out.push_back(detail::make_sip(SipMethod::Invite, me, sizes));
        state.phase = CallPhase::SipCalling;
        break;

    case SipInput::Kind::HangUp:
        if (state.phase == CallPhase::Established) {
            out.push_back(detail::make_sip(SipMethod::Bye, me, sizes));
            state.terminated_at = now;
            state.phase = CallPhase::Terminated;
        } else if (state.phase == CallPhase::SipCalling) {
            // abort a pending INVITE
            out.push_back(detail::make_sip(SipMethod::Cancel, me, sizes));
            state.terminated_at = now;
            state.phase = CallPhase::Cancelled;
        }
        break;

    case SipInput::Kind::Message: {
        const SipMethod m = in.msg.method;
        if (me == Role::Initiator) {
            if (m == SipMethod::Ok200 && state.phase == CallPhase::SipCalling) {
                state.mark_established(now);
                out.push_back(detail::make_sip(SipMethod::Ack, me, sizes));
                state.phase = CallPhase::Established;
            } else if (m == SipMethod::Bye && state.phase == CallPhase::Established) {
                state.terminated_at = now;
                state.phase = CallPhase::Terminated;
            } else {
                stray();
            }
        } else {
            if (m == SipMethod::Invite && state.phase == CallPhase::SipRegistered) {
                state.initiated_at = now;
                out.push_back(detail::make_sip(SipMethod::Ok200, me, sizes));
                state.phase = CallPhase::SipAnswering;
            } else if (m == SipMethod::Ack && state.phase == CallPhase::SipAnswering) {
                state.mark_established(now);
                state.phase = CallPhase::Established;
            } else if (m == SipMethod::Cancel &&
                       (state.phase == CallPhase::SipAnswering ||
                        state.phase == CallPhase::SipRegistered)) {
                state.terminated_at = now;
                state.setup_failed = !state.established();
                state.phase = CallPhase::Cancelled;
            } else if (m == SipMethod::Bye && state.phase == CallPhase::Established) {
                state.terminated_at = now;
                state.phase = CallPhase::Terminated;
            } else {
                stray();
            }
        }
        break;
    }
    }
    return {std::move(state), std::move(out)};
}

// ---------------------------------------------------------------------------
// H.323

struct H323Input {
    enum class Kind { StartCall, HangUp, Message, SendResolved };
    Kind kind;
    H323Message msg{};

    static H323Input start_call() { return {Kind::StartCall, {}}; }
    static H323Input hang_up() { return {Kind::HangUp, {}}; }
    static H323Input message(H323Message m) { return {Kind::Message, m}; }
    // Transport-level confirmation that one of this agent's own messages has
    // been delivered (or definitively lost). Paces same-direction message
    // sequences, which in real deployments ride an ordered TCP connection.
    static H323Input send_resolved(H323MsgKind k) {
        return {Kind::SendResolved, H323Message{k, 0, Role::Initiator, false}};
    }
};

namespace detail {

inline H323Message make_h323(H323MsgKind k, Role from, const SignalingSizes& sz) {
    return H323Message{k, sz.size_of(k), from, k == H323MsgKind::RasArq || k == H323MsgKind::RasAcf};
}

} // namespace detail

// H.323 call machine, both roles. The initiator clears admission with the
// gatekeeper (ARQ/ACF), runs call signaling, then both sides exchange
// capabilities and open logical channels. The receiver's Call Proceeding /
// Alerting / Connect burst and its OLC after its own OLC ACK are paced by
// SendResolved, keeping the flow strictly serialized.
inline std::pair<CallState, std::vector<H323Message>>
h323_step(CallState state, const H323Input& in, SimTime now,
          const SignalingSizes& sizes = {}, const H323FlowOptions& options = {}) {
    std::vector<H323Message> out;
    const Role me = state.role;

    auto stray = [&] { ++state.stray_dropped; };
    auto send = [&](H323MsgKind k) { out.push_back(detail::make_h323(k, me, sizes)); };

    switch (in.kind) {
    case H323Input::Kind::StartCall:
        if (me != Role::Initiator)
            throw MisuseError("h323_step: StartCall on a receiver agent");
        if (state.phase != CallPhase::Start)
            throw MisuseError("h323_step: StartCall in a non-initial phase");
        state.initiated_at = now;
        send(H323MsgKind::RasArq);
        state.phase = CallPhase::H323AdmissionWait;
        break;

    case H323Input::Kind::HangUp:
        if (state.phase != CallPhase::Start && state.phase != CallPhase::Terminated) {
            send(H323MsgKind::ReleaseComplete);
            state.terminated_at = now;
            state.setup_failed = !state.established();
            state.phase = CallPhase::Terminated;
        }
        break;

    case H323Input::Kind::SendResolved:
        if (me == Role::Receiver) {
            if (in.msg.kind == H323MsgKind::CallProceeding &&
                state.phase == CallPhase::H323ProceedingSent) {
                send(H323MsgKind::Alerting);
                state.phase = CallPhase::H323AlertingSent;
            } else if (in.msg.kind == H323MsgKind::Alerting &&
                       state.phase == CallPhase::H323AlertingSent) {
                send(H323MsgKind::Connect);
                state.phase = CallPhase::H323ConnectSent;
            } else if (in.msg.kind == H323MsgKind::OlcAck &&
                       state.phase == CallPhase::H323OlcAckSent) {
                send(H323MsgKind::OpenLogicalChannel);
                state.phase = CallPhase::H323OlcSentBack;
            }
        }
        break;

    case H323Input::Kind::Message: {
        const H323MsgKind k = in.msg.kind;
        if (k == H323MsgKind::ReleaseComplete) {
            if (state.phase != CallPhase::Terminated) {
                state.terminated_at = now;
                state.setup_failed = !state.established();
                state.phase = CallPhase::Terminated;
            }
            break;
        }
        if (me == Role::Initiator) {
            switch (state.phase) {
            case CallPhase::H323AdmissionWait:
                if (k == H323MsgKind::RasAcf) {
                    send(H323MsgKind::Setup);
                    state.phase = CallPhase::H323SetupSent;
                } else {
                    stray();
                }
                break;
            case CallPhase::H323SetupSent:
                if (k == H323MsgKind::CallProceeding)
                    state.phase = CallPhase::H323Proceeding;
                else if (k == H323MsgKind::Alerting)
                    state.phase = CallPhase::H323Alerted; // proceeding got lost; go on
                else if (k == H323MsgKind::Connect) {
                    send(H323MsgKind::CapsExchange);
                    state.phase = CallPhase::H323CapsSent;
                } else
                    stray();
                break;
            case CallPhase::H323Proceeding:
                if (k == H323MsgKind::Alerting)
                    state.phase = CallPhase::H323Alerted;
                else if (k == H323MsgKind::Connect) {
                    send(H323MsgKind::CapsExchange);
                    state.phase = CallPhase::H323CapsSent;
                } else
                    stray();
                break;
            case CallPhase::H323Alerted:
                if (k == H323MsgKind::Connect) {
                    send(H323MsgKind::CapsExchange);
                    state.phase = CallPhase::H323CapsSent;
                } else
                    stray();
                break;
            case CallPhase::H323CapsSent:
                if (k == H323MsgKind::CapsExchange) {
                    send(H323MsgKind::OpenLogicalChannel);
                    state.phase = CallPhase::H323OlcSent;
                } else
                    stray();
                break;
            case CallPhase::H323OlcSent:
                if (k == H323MsgKind::OlcAck)
                    state.phase = CallPhase::H323OlcAcked;
                else
                    stray();
                break;
            case CallPhase::H323OlcAcked:
                if (k == H323MsgKind::OpenLogicalChannel) {
                    send(H323MsgKind::OlcAck);
                    state.mark_established(now);
                    state.phase = CallPhase::Established;
                } else
                    stray();
                break;
            default:
                stray();
                break;
            }
        } else { // receiver
            switch (state.phase) {
            case CallPhase::Start:
                if (k == H323MsgKind::Setup) {
                    state.initiated_at = now;
                    if (options.progress_legs) {
                        send(H323MsgKind::CallProceeding);
                        state.phase = CallPhase::H323ProceedingSent;
                    } else {
                        send(H323MsgKind::Connect);
                        state.phase = CallPhase::H323ConnectSent;
                    }
                } else {
                    stray();
                }
                break;
            case CallPhase::H323ConnectSent:
                if (k == H323MsgKind::CapsExchange) {
                    send(H323MsgKind::CapsExchange);
                    state.phase = CallPhase::H323CapsReplied;
                } else {
                    stray();
                }
                break;
            case CallPhase::H323CapsReplied:
                if (k == H323MsgKind::OpenLogicalChannel) {
                    send(H323MsgKind::OlcAck);
                    state.phase = CallPhase::H323OlcAckSent;
                } else {
                    stray();
                }
                break;
            case CallPhase::H323OlcSentBack:
                if (k == H323MsgKind::OlcAck) {
                    state.mark_established(now);
                    state.phase = CallPhase::Established;
                } else {
                    stray();
                }
                break;
            default:
                stray();
                break;
            }
        }
        break;
    }
    }
    return {std::move(state), std::move(out)};
}

// Admission control at the gatekeeper: grant every request. (A rejecting
// gatekeeper simply never answers; the caller stays in admission.)
inline std::optional<H323Message> gatekeeper_step(const H323Message& in,
                                                  const SignalingSizes& sizes = {}) {
    if (in.kind == H323MsgKind::RasArq)
        return detail::make_h323(H323MsgKind::RasAcf, Role::Receiver, sizes);
    return std::nullopt;
}

} // namespace vowlan::voip

#endif
