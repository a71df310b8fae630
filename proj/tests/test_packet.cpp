// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "vowlan/net/packet.hpp"
#include "vowlan/sim/rng.hpp"

using namespace vowlan;
using namespace vowlan::net;

TEST(Encapsulation, PayloadPlusFortyBytes) {
    EXPECT_EQ(encapsulate_voip(160).wire_bytes(), 200);
    EXPECT_EQ(encapsulate_voip(20).wire_bytes(), 60);
}

TEST(Encapsulation, PayloadBoundsAreConfigErrors) {
    EXPECT_THROW(encapsulate_voip(19), ConfigError);
    EXPECT_THROW(encapsulate_voip(161), ConfigError);
    EXPECT_NO_THROW(encapsulate_voip(20));
    EXPECT_NO_THROW(encapsulate_voip(160));
}

TEST(Encapsulation, HeaderOverheadIsTwelvePlusEightPlusTwenty) {
    EXPECT_EQ(header_overhead(), 40);
    EXPECT_EQ(transport_overhead(), 28);
    // overhead fraction for a full G.711 packet: 40/200 = 20%
    EXPECT_DOUBLE_EQ(40.0 / encapsulate_voip(160).wire_bytes(), 0.20);
}

TEST(Encapsulation, WireBytesInvariantAcrossPayloadRange) {
    for (std::int64_t payload = 20; payload <= 160; ++payload)
        EXPECT_EQ(encapsulate_voip(payload).wire_bytes() - payload, 40);
}

TEST(Packet, NonMediaKindsCarryTransportOverheadOnly) {
    Packet sig;
    sig.kind = PacketKind::Signaling;
    sig.payload_bytes = 620;
    EXPECT_EQ(sig.wire_bytes(), 648);

    Packet ftp;
    ftp.kind = PacketKind::Ftp;
    ftp.payload_bytes = 1024;
    EXPECT_EQ(ftp.wire_bytes(), 1052);
}

TEST(UdpContract, LossIsSilentAndDeliveryStampsTime) {
    DeliveryRecord rec;
    rec.sent_at = SimTime::us(1000);
    rec.wire_bytes = 200;

    EXPECT_EQ(udp_delivery_contract(rec, {}, false, LossReason::MacRetryExhausted),
              TransportOutcome::SilentlyLost);
    EXPECT_FALSE(rec.delivered());
    EXPECT_EQ(rec.lost, LossReason::MacRetryExhausted);
    EXPECT_TRUE(rec.resolved());

    DeliveryRecord ok;
    ok.sent_at = SimTime::us(1000);
    EXPECT_EQ(udp_delivery_contract(ok, SimTime::us(1400), true, LossReason::None),
              TransportOutcome::Delivered);
    ASSERT_TRUE(ok.delivered());
    EXPECT_EQ(ok.received_at->ticks, 1400);
}

TEST(UdpContract, ReceiveBeforeSendIsMisuse) {
    DeliveryRecord rec;
    rec.sent_at = SimTime::us(1000);
    EXPECT_THROW(udp_delivery_contract(rec, SimTime::us(900), true, LossReason::None),
                 MisuseError);
}

// Conservation identity on a randomly generated fate table: sent equals
// received plus lost, exactly, and receiver-side sequence gaps equal the
// loss count.
TEST(Conservation, SentEqualsReceivedPlusLost) {
    Rng rng(424242);
    std::int64_t sent = 0, received = 0, lost = 0;
    std::uint64_t delivered_count = 0, lost_count = 0;
    const std::uint64_t total = 10000;
    for (std::uint64_t seq = 0; seq < total; ++seq) {
        DeliveryRecord rec;
        rec.seq_no = seq;
        rec.sent_at = SimTime::us(static_cast<std::int64_t>(seq) * 20000);
        rec.wire_bytes = 200;
        sent += rec.wire_bytes;
        const bool ok = rng.uniform_int(0, 99) < 97;
        udp_delivery_contract(rec, rec.sent_at + SimTime::us(500), ok,
                              LossReason::MacRetryExhausted);
        if (rec.delivered()) {
            received += rec.wire_bytes;
            ++delivered_count;
        } else {
            lost += rec.wire_bytes;
            ++lost_count;
        }
    }
    EXPECT_EQ(sent, received + lost);
    EXPECT_EQ(total - delivered_count, lost_count); // seq gaps == losses
    EXPECT_GT(lost_count, 0u);
}
