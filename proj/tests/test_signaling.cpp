// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "vowlan/sim/kernel.hpp"
#include "vowlan/voip/call.hpp"
#include "vowlan/voip/messages.hpp"

using namespace vowlan;
using namespace vowlan::voip;

namespace {

// Lossless ordered channel with a uniform one-way delay between any two
// agents and zero processing time. Establishment latency over it must equal
// (serialized legs) x delay, which is what these tests pin down.
class Harness {
public:
    Harness(Protocol proto, SimTime one_way_delay)
        : delay_(one_way_delay) {
        initiator.protocol = proto;
        initiator.role = Role::Initiator;
        receiver.protocol = proto;
        receiver.role = Role::Receiver;
    }

    void sip_agent_start() {
        feed_sip(initiator, SipInput::agent_start());
        feed_sip(receiver, SipInput::agent_start());
    }

    void sip_start_call() { feed_sip(initiator, SipInput::start_call()); }
    void sip_hang_up(Role who) { feed_sip(side(who), SipInput::hang_up()); }
    void h323_start_call() { feed_h323(initiator, H323Input::start_call()); }
    void h323_hang_up(Role who) { feed_h323(side(who), H323Input::hang_up()); }

    void run() { kernel.run_until(kernel.now() + SimTime::s(100)); }
    SimTime now() const { return kernel.now(); }

    Kernel kernel;
    CallState initiator;
    CallState receiver;
    SignalingSizes sizes;
    H323FlowOptions h323_options;
    bool drop_sip_ack = false;

private:
    CallState& side(Role r) { return r == Role::Initiator ? initiator : receiver; }
    CallState& peer(Role r) { return r == Role::Initiator ? receiver : initiator; }

    void feed_sip(CallState& who, const SipInput& in) {
        auto [next, out] = sip_step(who, in, kernel.now(), sizes);
        who = next;
        for (const auto& m : out)
            send_sip(who.role, m);
    }

    void send_sip(Role from, const SipMessage& m) {
        note_sent(side(from), m.size_bytes);
        if (m.method == SipMethod::Register)
            return; // terminates at the registrar
        if (m.method == SipMethod::Ack && drop_sip_ack)
            return;
        kernel.schedule_in(delay_, [this, from, m] {
            CallState& dst = peer(from);
            note_received(dst, m.size_bytes);
            feed_sip(dst, SipInput::message(m));
        });
    }

    void feed_h323(CallState& who, const H323Input& in) {
        auto [next, out] = h323_step(who, in, kernel.now(), sizes, h323_options);
        who = next;
        for (const auto& m : out)
            send_h323(who.role, m);
    }

    void send_h323(Role from, const H323Message& m) {
        note_sent(side(from), m.size_bytes);
        kernel.schedule_in(delay_, [this, from, m] {
            // transport confirms the sender's message once it lands
            feed_h323(side(from), H323Input::send_resolved(m.kind));
            if (m.to_gatekeeper) {
                if (auto reply = gatekeeper_step(m, sizes)) {
                    note_sent_gk(*reply);
                    kernel.schedule_in(delay_, [this, from, r = *reply] {
                        CallState& dst = side(from);
                        note_received(dst, r.size_bytes);
                        feed_h323(dst, H323Input::message(r));
                    });
                }
                return;
            }
            CallState& dst = peer(from);
            note_received(dst, m.size_bytes);
            feed_h323(dst, H323Input::message(m));
        });
    }

    void note_sent_gk(const H323Message&) {} // gatekeeper bytes not under test

    SimTime delay_;
};

} // namespace

TEST(SipFlow, EstablishmentLegsOnLosslessChannel) {
    const SimTime d = SimTime::ms(10);
    Harness h(Protocol::Sip, d);
    h.sip_agent_start();
    h.kernel.run_until(SimTime::s(1));
    const SimTime t0 = h.kernel.now();
    h.sip_start_call();
    h.run();

    // initiator: INVITE out, 200 OK back -> 2 legs; receiver: + ACK -> 3 legs
    ASSERT_TRUE(h.initiator.established());
    ASSERT_TRUE(h.receiver.established());
    EXPECT_EQ((*h.initiator.established_at - t0).ticks, 2 * d.ticks);
    EXPECT_EQ((*h.receiver.established_at - t0).ticks, 3 * d.ticks);
    EXPECT_EQ((*h.receiver.established_at - *h.initiator.established_at), d);
    EXPECT_EQ(h.initiator.stray_dropped, 0u);
    EXPECT_EQ(h.receiver.stray_dropped, 0u);
}

TEST(SipFlow, CancelBeforeAnswerLeavesCallUnestablished) {
    const SimTime d = SimTime::ms(50);
    Harness h(Protocol::Sip, d);
    h.sip_agent_start();
    h.kernel.run_until(SimTime::s(1));
    h.sip_start_call();
    // INVITE still in flight; 200 OK not yet back
    h.kernel.run_until(h.kernel.now() + SimTime::ms(10));
    h.sip_hang_up(Role::Initiator);
    h.run();

    EXPECT_FALSE(h.initiator.established());
    EXPECT_FALSE(h.receiver.established());
    EXPECT_EQ(h.initiator.phase, CallPhase::Cancelled);
    EXPECT_TRUE(h.initiator.terminated_at.has_value());
}

TEST(SipFlow, LostAckLeavesOnlyReceiverUnestablished) {
    Harness h(Protocol::Sip, SimTime::ms(10));
    h.drop_sip_ack = true;
    h.sip_agent_start();
    h.kernel.run_until(SimTime::s(1));
    h.sip_start_call();
    h.run();

    EXPECT_TRUE(h.initiator.established());
    EXPECT_FALSE(h.receiver.established());
}

TEST(SipFlow, ByteTotalsMatchMessageSums) {
    Harness h(Protocol::Sip, SimTime::ms(10));
    h.sip_agent_start();
    h.kernel.run_until(SimTime::s(1));
    h.sip_start_call();
    h.run();

    // initiator sent REGISTER + INVITE + ACK, received 200 OK
    const auto t = signaling_byte_totals(h.initiator);
    EXPECT_EQ(t.sent, (300 + 620 + 250) + 3 * 28);
    EXPECT_EQ(t.received, 450 + 28);

    // receiver sent REGISTER + 200 OK, received INVITE + ACK
    const auto r = signaling_byte_totals(h.receiver);
    EXPECT_EQ(r.sent, (300 + 450) + 2 * 28);
    EXPECT_EQ(r.received, (620 + 250) + 2 * 28);
}

TEST(SipFlow, ZeroMessageStateHasZeroTotals) {
    CallState c;
    const auto t = signaling_byte_totals(c);
    EXPECT_EQ(t.sent, 0);
    EXPECT_EQ(t.received, 0);
}

TEST(SipFlow, WrongPhaseMessageIsDroppedAndCounted) {
    CallState c;
    c.protocol = Protocol::Sip;
    c.role = Role::Initiator;
    SignalingSizes sizes;
    auto [c1, out1] = sip_step(c, SipInput::message({SipMethod::Ok200, 450, Role::Receiver, true}),
                               SimTime::ms(5), sizes);
    EXPECT_EQ(c1.stray_dropped, 1u);
    EXPECT_TRUE(out1.empty());
    EXPECT_EQ(c1.phase, CallPhase::Start);
}

TEST(H323Flow, TwelveLegsOnLosslessChannel) {
    const SimTime d = SimTime::ms(10);
    Harness h(Protocol::H323, d);
    h.kernel.run_until(SimTime::s(1));
    const SimTime t0 = h.kernel.now();
    h.h323_start_call();
    h.run();

    ASSERT_TRUE(h.initiator.established());
    ASSERT_TRUE(h.receiver.established());
    // initiator done when it returns the final OLC ACK (11 legs in), receiver
    // when that ack lands (12 legs)
    EXPECT_EQ((*h.initiator.established_at - t0).ticks, (kH323SetupLegs - 1) * d.ticks);
    EXPECT_EQ((*h.receiver.established_at - t0).ticks, kH323SetupLegs * d.ticks);
    EXPECT_EQ(h.initiator.stray_dropped, 0u);
    EXPECT_EQ(h.receiver.stray_dropped, 0u);
}

TEST(H323Flow, TenLegsWithoutProgressMessages) {
    // configuration-shrunk flow: Setup answered directly with Connect
    const SimTime d = SimTime::ms(10);
    Harness h(Protocol::H323, d);
    h.h323_options.progress_legs = false;
    h.kernel.run_until(SimTime::s(1));
    const SimTime t0 = h.kernel.now();
    h.h323_start_call();
    h.run();

    ASSERT_TRUE(h.receiver.established());
    const int legs = h323_setup_legs(H323FlowOptions{false});
    EXPECT_EQ(legs, 10);
    EXPECT_EQ((*h.receiver.established_at - t0).ticks, legs * d.ticks);
    // still strictly slower than the 3-leg SIP flow
    EXPECT_GT(legs, kSipSetupLegs);
}

TEST(H323Flow, SlowerThanSipForEqualDelay) {
    const SimTime d = SimTime::ms(10);

    Harness sip(Protocol::Sip, d);
    sip.sip_agent_start();
    sip.kernel.run_until(SimTime::s(1));
    const SimTime sip_t0 = sip.kernel.now();
    sip.sip_start_call();
    sip.run();

    Harness h323(Protocol::H323, d);
    h323.kernel.run_until(SimTime::s(1));
    const SimTime h_t0 = h323.kernel.now();
    h323.h323_start_call();
    h323.run();

    const SimTime sip_latency = *sip.receiver.established_at - sip_t0;
    const SimTime h323_latency = *h323.receiver.established_at - h_t0;
    EXPECT_LT(sip_latency, h323_latency);
    // exact symbolic leg counts
    EXPECT_EQ(sip_latency.ticks, kSipSetupLegs * d.ticks);
    EXPECT_EQ(h323_latency.ticks, kH323SetupLegs * d.ticks);
    EXPECT_GT(kH323SetupLegs, kSipSetupLegs);
}

TEST(H323Flow, WithheldAdmissionKeepsCallUnestablished) {
    CallState c;
    c.protocol = Protocol::H323;
    c.role = Role::Initiator;
    SignalingSizes sizes;
    auto [c1, out1] = h323_step(c, H323Input::start_call(), SimTime::ms(1), sizes);
    ASSERT_EQ(out1.size(), 1u);
    EXPECT_EQ(out1[0].kind, H323MsgKind::RasArq);
    EXPECT_EQ(c1.phase, CallPhase::H323AdmissionWait);
    // no ACF ever arrives; nothing further happens
    EXPECT_FALSE(c1.established());
}

TEST(H323Flow, ReleaseCompleteSetsTerminatedWhenEstablished) {
    Harness h(Protocol::H323, SimTime::ms(5));
    h.kernel.run_until(SimTime::s(1));
    h.h323_start_call();
    h.run();
    ASSERT_TRUE(h.initiator.established());

    h.h323_hang_up(Role::Initiator);
    h.run();
    EXPECT_TRUE(h.initiator.terminated_at.has_value());
    EXPECT_TRUE(h.receiver.terminated_at.has_value());
    EXPECT_FALSE(h.receiver.setup_failed);
}

TEST(H323Flow, TotalSignalingBytesExceedSip) {
    const SimTime d = SimTime::ms(10);
    Harness sip(Protocol::Sip, d);
    sip.sip_agent_start();
    sip.kernel.run_until(SimTime::s(1));
    sip.sip_start_call();
    sip.run();
    sip.sip_hang_up(Role::Initiator);
    sip.run();

    Harness h323(Protocol::H323, d);
    h323.kernel.run_until(SimTime::s(1));
    h323.h323_start_call();
    h323.run();
    h323.h323_hang_up(Role::Initiator);
    h323.run();

    const auto sip_total =
        signaling_byte_totals(sip.initiator).sent + signaling_byte_totals(sip.receiver).sent;
    const auto h323_total =
        signaling_byte_totals(h323.initiator).sent + signaling_byte_totals(h323.receiver).sent;
    EXPECT_GT(h323_total, sip_total);
}

TEST(H323Flow, InitiatorPreEstablishmentBytesBelowSip) {
    // Default sizes keep the SIP initiator's signaling byte count above
    // H.323's for the setup portion (REGISTER+INVITE+ACK vs ARQ+Setup+TCS+
    // OLC+OLC ACK); the byte-sent comparison direction rests on this.
    SignalingSizes sz;
    const int sip = sz.sip_register + sz.sip_invite + sz.sip_ack + 3 * 28;
    const int h323 = sz.h323_ras + sz.h323_q931 + sz.h323_caps + 2 * sz.h323_olc + 5 * 28;
    EXPECT_GT(sip, h323);
}

TEST(CallState, EstablishedSetExactlyOnce) {
    CallState c;
    c.initiated_at = SimTime::ms(10);
    c.mark_established(SimTime::ms(20));
    EXPECT_THROW(c.mark_established(SimTime::ms(30)), MisuseError);
    EXPECT_THROW(
        [] {
            CallState bad;
            bad.initiated_at = SimTime::ms(50);
            bad.mark_established(SimTime::ms(40)); // before initiation
        }(),
        MisuseError);
}

TEST(CallState, EstablishmentTimeReportsBothConventions) {
    CallState c;
    c.initiated_at = SimTime::s(120);
    c.mark_established(SimTime::s(125));
    const auto t = establishment_time(c);
    ASSERT_TRUE(t.established_at.has_value());
    ASSERT_TRUE(t.setup_latency.has_value());
    EXPECT_EQ(t.established_at->seconds(), 125.0);
    EXPECT_EQ(t.setup_latency->seconds(), 5.0);

    CallState never;
    const auto u = establishment_time(never);
    EXPECT_FALSE(u.established_at.has_value());
    EXPECT_FALSE(u.setup_latency.has_value());
}
