// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <string>

#include "vowlan/run/mobility.hpp"
#include "vowlan/run/scenario.hpp"

using namespace vowlan;
using namespace vowlan::run;

namespace {

std::string paper_scenario_path() {
    return std::string(VOWLAN_SCENARIO_DIR) + "/paper_80211a.scn";
}

std::string pcf_scenario_path() {
    return std::string(VOWLAN_SCENARIO_DIR) + "/pcf_roundrobin.scn";
}

} // namespace

TEST(ScenarioLoad, PaperScenarioShape) {
    const Scenario sc = load_scenario_file(paper_scenario_path());
    EXPECT_EQ(sc.name, "paper_80211a");
    EXPECT_EQ(sc.duration.ticks, 134'000'000);
    EXPECT_EQ(sc.nodes.size(), 10u);

    int voip = 0, ftp = 0, cbr = 0;
    for (const auto& a : sc.apps) {
        if (a.kind == AppSpec::Kind::Voip)
            ++voip;
        if (a.kind == AppSpec::Kind::Ftp)
            ++ftp;
        if (a.kind == AppSpec::Kind::Cbr)
            ++cbr;
    }
    EXPECT_EQ(voip, 5);
    EXPECT_EQ(ftp, 2);
    EXPECT_EQ(cbr, 1);

    // the VoIP links of the shipped scenario
    std::vector<std::pair<int, int>> voip_links;
    for (const auto& a : sc.apps)
        if (a.kind == AppSpec::Kind::Voip)
            voip_links.emplace_back(a.src, a.dst);
    const std::vector<std::pair<int, int>> expected{{4, 5}, {3, 7}, {1, 9}, {2, 8}, {5, 7}};
    EXPECT_EQ(voip_links, expected);

    // network membership: 1..5 on wlan1, 6..9 on wlan2, 10 wired only
    for (int id = 1; id <= 5; ++id)
        EXPECT_TRUE(sc.node_in_network(id, "wlan1")) << id;
    for (int id = 6; id <= 9; ++id)
        EXPECT_TRUE(sc.node_in_network(id, "wlan2")) << id;
    EXPECT_FALSE(sc.node_in_network(10, "wlan1"));
    EXPECT_TRUE(sc.node_in_network(10, "backbone"));

    // channel masks per the shipped table
    EXPECT_EQ(sc.find_network("wlan1")->listenable.to_string(), "0100");
    EXPECT_EQ(sc.find_network("wlan2")->listenable.to_string(), "0010");
    EXPECT_EQ(sc.find_network("backbone")->listenable.to_string(), "0001");
    EXPECT_TRUE(sc.find_network("backbone")->wired);

    // mobility: hosts 1, 7, 8 move; host 1 has 3 slow legs + 1 fast leg
    ASSERT_TRUE(sc.mobility.count(1));
    ASSERT_TRUE(sc.mobility.count(7));
    ASSERT_TRUE(sc.mobility.count(8));
    const auto& path1 = sc.mobility.at(1);
    ASSERT_EQ(path1.leg_speeds.size(), 4u);
    EXPECT_EQ(path1.leg_speeds[0], SpeedClass::Slow);
    EXPECT_EQ(path1.leg_speeds[1], SpeedClass::Slow);
    EXPECT_EQ(path1.leg_speeds[2], SpeedClass::Slow);
    EXPECT_EQ(path1.leg_speeds[3], SpeedClass::Fast);
}

TEST(ScenarioLoad, UnknownApplicationNodeIsError) {
    const std::string text = R"(
[general]
name = bad
duration_s = 10
[channels]
wlan1 0100 0100
[nodes]
4 0 0 wlan1
5 10 0 wlan1
[backbone]
hub = 5
[signaling]
proxy_node = 5
[applications]
voip 4 11 1 9
)";
    try {
        load_scenario(text);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("unknown node 11"), std::string::npos)
            << e.what();
    }
}

TEST(ScenarioLoad, ZeroMaskWirelessNetworkIsError) {
    const std::string text = R"(
[general]
name = bad
duration_s = 10
[channels]
wlan1 0000 0000
[nodes]
1 0 0 wlan1
[backbone]
hub = 1
)";
    try {
        load_scenario(text);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("all-zero mask"), std::string::npos) << e.what();
    }
}

TEST(ScenarioLoad, DuplicateNodeIdsAreError) {
    const std::string text = R"(
[general]
name = bad
duration_s = 10
[channels]
wlan1 0100 0100
[nodes]
1 0 0 wlan1
1 5 5 wlan1
[backbone]
hub = 1
)";
    EXPECT_THROW(load_scenario(text), ConfigError);
}

TEST(ScenarioLoad, ErrorsCarryLineNumbers) {
    const std::string text = "[general]\nname = x\nbogus_key = 3\n";
    try {
        load_scenario(text);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(ScenarioLoad, RoundTripIsIdentical) {
    const Scenario sc = load_scenario_file(paper_scenario_path());
    const std::string first = sc.serialize();
    const Scenario re = load_scenario(first);
    EXPECT_EQ(first, re.serialize());
    EXPECT_EQ(sc.hash(), re.hash());
}

TEST(ScenarioLoad, HashIgnoresSignalingMode) {
    Scenario sip = load_scenario_file(paper_scenario_path());
    Scenario h323 = sip;
    h323.signaling_mode = voip::Protocol::H323;
    EXPECT_EQ(sip.hash(), h323.hash());

    Scenario other = sip;
    other.apps[0].start = SimTime::s(11);
    EXPECT_NE(sip.hash(), other.hash());
}

TEST(ScenarioLoad, PcfScenarioParses) {
    const Scenario sc = load_scenario_file(pcf_scenario_path());
    EXPECT_TRUE(sc.pcf.enabled);
    EXPECT_EQ(sc.pcf.ap, 1);
    EXPECT_EQ(sc.pcf.superframe.ticks, 2000);
    EXPECT_EQ(sc.pcf.cfp.ticks, 700);
    EXPECT_EQ(sc.pcf.polled, (std::vector<int>{2, 3, 4}));
}

TEST(ScenarioLoad, AckTimeoutDerivedFromControlRate) {
    const Scenario sc = load_scenario_file(paper_scenario_path());
    // SIFS + ACK airtime at 6 Mbit/s + one slot = 16 + 44 + 9
    EXPECT_EQ(sc.mac_params.ack_timeout.ticks, 69);
}

TEST(ScenarioLoad, SnrThresholdsOverridable) {
    std::string text = R"(
[general]
name = snr
duration_s = 1
[radio]
min_snr_db = 1,2,3,4,5,6,7,8
[channels]
wlan1 0100 0100
[nodes]
1 0 0 wlan1
[backbone]
hub = 1
[signaling]
proxy_node = 1
)";
    const Scenario sc = load_scenario(text);
    EXPECT_DOUBLE_EQ(sc.mode_for(6).min_rx_snr_db, 1.0);
    EXPECT_DOUBLE_EQ(sc.mode_for(54).min_rx_snr_db, 8.0);
    EXPECT_EQ(sc.mode_for(54).data_bits_per_symbol, 216);

    // non-monotone tables are rejected
    std::string bad = text;
    bad.replace(bad.find("1,2,3,4,5,6,7,8"), 15, "9,2,3,4,5,6,7,8");
    EXPECT_THROW(load_scenario(bad), ConfigError);
}

TEST(ScenarioLoad, H323ProgressFlagParsesAndRoundTrips) {
    Scenario sc = load_scenario_file(paper_scenario_path());
    EXPECT_TRUE(sc.signaling.h323_flow.progress_legs); // default on

    std::string text = sc.serialize();
    text.replace(text.find("h323_progress = on"), 18, "h323_progress = off");
    const Scenario off = load_scenario(text);
    EXPECT_FALSE(off.signaling.h323_flow.progress_legs);
    EXPECT_EQ(off.serialize(), load_scenario(off.serialize()).serialize());
}

TEST(Mobility, MidpointInterpolation) {
    WaypointPath p = WaypointPath::fixed({0, 0});
    p.append_leg({100, 0}, SpeedClass::Slow); // 100 m at 1 m/s -> 100 s
    ASSERT_EQ(p.points.back().arrival.ticks, 100'000'000);
    const Position mid = position_at(p, SimTime::s(50));
    EXPECT_NEAR(mid.x, 50.0, 1e-9);
    EXPECT_NEAR(mid.y, 0.0, 1e-9);
}

TEST(Mobility, ClampsAfterFinalWaypoint) {
    WaypointPath p = WaypointPath::fixed({0, 0});
    p.append_leg({30, 40}, SpeedClass::Slow); // 50 m -> 50 s
    const Position end = position_at(p, SimTime::s(500));
    EXPECT_NEAR(end.x, 30.0, 1e-9);
    EXPECT_NEAR(end.y, 40.0, 1e-9);
}

TEST(Mobility, FastLegIsFiveTimesQuicker) {
    WaypointPath slow = WaypointPath::fixed({0, 0});
    slow.append_leg({100, 0}, SpeedClass::Slow);
    WaypointPath fast = WaypointPath::fixed({0, 0});
    fast.append_leg({100, 0}, SpeedClass::Fast);
    const auto slow_time = slow.points.back().arrival.ticks;
    const auto fast_time = fast.points.back().arrival.ticks;
    EXPECT_EQ(slow_time, 5 * fast_time);
}

TEST(Mobility, StaticNodeHoldsPosition) {
    const WaypointPath p = WaypointPath::fixed({7, 9});
    EXPECT_EQ(position_at(p, SimTime::s(0)), (Position{7, 9}));
    EXPECT_EQ(position_at(p, SimTime::s(1000)), (Position{7, 9}));
}
