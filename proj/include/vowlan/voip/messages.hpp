// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_VOIP_MESSAGES_HPP
#define VOWLAN_VOIP_MESSAGES_HPP

#include <string>

#include "vowlan/sim/error.hpp"

namespace vowlan::voip {

enum class Protocol { Sip, H323 };

inline const char* protocol_name(Protocol p) {
    return p == Protocol::Sip ? "sip" : "h323";
}

enum class Role { Initiator, Receiver };

enum class SipMethod { Register, Invite, Ok200, Ack, Bye, Cancel };

inline const char* sip_method_name(SipMethod m) {
    switch (m) {
    case SipMethod::Register: return "REGISTER";
    case SipMethod::Invite: return "INVITE";
    case SipMethod::Ok200: return "200 OK";
    case SipMethod::Ack: return "ACK";
    case SipMethod::Bye: return "BYE";
    case SipMethod::Cancel: return "CANCEL";
    }
    return "?";
}

// Basic call sequence: RAS admission with the gatekeeper, call signaling
// between the endpoints, capability exchange, then logical channels in both
// directions.
enum class H323MsgKind {
    RasArq,
    RasAcf,
    Setup,
    CallProceeding,
    Alerting,
    Connect,
    CapsExchange,
    OpenLogicalChannel,
    OlcAck,
    ReleaseComplete,
};

inline const char* h323_msg_name(H323MsgKind k) {
    switch (k) {
    case H323MsgKind::RasArq: return "ARQ";
    case H323MsgKind::RasAcf: return "ACF";
    case H323MsgKind::Setup: return "SETUP";
    case H323MsgKind::CallProceeding: return "CALL PROCEEDING";
    case H323MsgKind::Alerting: return "ALERTING";
    case H323MsgKind::Connect: return "CONNECT";
    case H323MsgKind::CapsExchange: return "TCS";
    case H323MsgKind::OpenLogicalChannel: return "OLC";
    case H323MsgKind::OlcAck: return "OLC ACK";
    case H323MsgKind::ReleaseComplete: return "RELEASE COMPLETE";
    }
    return "?";
}

struct SipMessage {
    SipMethod method = SipMethod::Invite;
    int size_bytes = 0;
    Role from = Role::Initiator;
    bool via_proxy = true;
};

struct H323Message {
    H323MsgKind kind = H323MsgKind::Setup;
    int size_bytes = 0;
    Role from = Role::Initiator;
    bool to_gatekeeper = false; // RAS traffic terminates at the gatekeeper
};

// Message sizes on the wire (application bytes, before UDP/IP). All
// scenario-overridable; nothing downstream depends on the absolute values,
// only on their documented sums.
struct SignalingSizes {
    int sip_register = 300;
    int sip_invite = 620;
    int sip_ok200 = 450;
    int sip_ack = 250;
    int sip_bye = 250;
    int sip_cancel = 250;
    int h323_ras = 120;   // ARQ / ACF
    int h323_q931 = 260;  // Setup / CallProceeding / Alerting / Connect / ReleaseComplete
    int h323_caps = 380;  // terminal capability set, each direction
    int h323_olc = 150;   // OLC / OLC ACK, each

    int size_of(SipMethod m) const {
        switch (m) {
        case SipMethod::Register: return sip_register;
        case SipMethod::Invite: return sip_invite;
        case SipMethod::Ok200: return sip_ok200;
        case SipMethod::Ack: return sip_ack;
        case SipMethod::Bye: return sip_bye;
        case SipMethod::Cancel: return sip_cancel;
        }
        return 0;
    }

    int size_of(H323MsgKind k) const {
        switch (k) {
        case H323MsgKind::RasArq:
        case H323MsgKind::RasAcf:
            return h323_ras;
        case H323MsgKind::Setup:
        case H323MsgKind::CallProceeding:
        case H323MsgKind::Alerting:
        case H323MsgKind::Connect:
        case H323MsgKind::ReleaseComplete:
            return h323_q931;
        case H323MsgKind::CapsExchange:
            return h323_caps;
        case H323MsgKind::OpenLogicalChannel:
        case H323MsgKind::OlcAck:
            return h323_olc;
        }
        return 0;
    }

    void validate() const {
        for (int v : {sip_register, sip_invite, sip_ok200, sip_ack, sip_bye, sip_cancel,
                      h323_ras, h323_q931, h323_caps, h323_olc})
            if (v <= 0)
                throw ConfigError("signaling message sizes must be positive");
    }
};

} // namespace vowlan::voip

#endif
