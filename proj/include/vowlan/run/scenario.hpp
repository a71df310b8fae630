// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_RUN_SCENARIO_HPP
#define VOWLAN_RUN_SCENARIO_HPP

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vowlan/mac/params.hpp"
#include "vowlan/mac/pcf.hpp"
#include "vowlan/media/codec.hpp"
#include "vowlan/media/sources.hpp"
#include "vowlan/phy/airtime.hpp"
#include "vowlan/phy/channel.hpp"
#include "vowlan/phy/modes.hpp"
#include "vowlan/phy/propagation.hpp"
#include "vowlan/run/mobility.hpp"
#include "vowlan/sim/error.hpp"
#include "vowlan/sim/time.hpp"
#include "vowlan/voip/call.hpp"
#include "vowlan/voip/messages.hpp"

namespace vowlan::run {

struct NetworkSpec {
    std::string name;
    phy::ChannelMask listenable;
    phy::ChannelMask listening;
    bool wired = false;
};

struct NodeSpec {
    int id = 0;
    Position pos;
    std::vector<std::string> networks;
};

struct BackboneSpec {
    int hub = 10;
    std::vector<int> gateways;
    std::int64_t capacity_bps = 100'000'000;
    SimTime latency = SimTime::us(500);
};

struct PcfSpec {
    bool enabled = false;
    int ap = 0;
    SimTime superframe{};
    SimTime cfp{};
    std::vector<int> polled;
    int beacon_bytes = 48;
};

struct SignalingSpec {
    int proxy_node = 10;
    voip::SignalingPolicy policy;
    SimTime registration_lead = SimTime::s(5);
    voip::SignalingSizes sizes;
    voip::H323FlowOptions h323_flow;
};

struct AppSpec {
    enum class Kind { Voip, Ftp, Cbr };

    Kind kind = Kind::Voip;
    int src = 0;
    int dst = 0;
    SimTime start{};
    SimTime stop{};
    // voip
    media::CodecName codec = media::CodecName::G711;
    SimTime frame_period = SimTime::ms(20);
    int frames_per_packet = 1;
    SimTime jitter_depth = SimTime::ms(60);
    bool two_way = true;
    // ftp
    std::int64_t file_bytes = 1 << 20;
    std::int64_t segment_bytes = 1024;
    // cbr
    std::int64_t rate_bps = 409600;
    std::int64_t packet_bytes = 512;
};

inline const char* app_kind_name(AppSpec::Kind k) {
    switch (k) {
    case AppSpec::Kind::Voip: return "voip";
    case AppSpec::Kind::Ftp: return "ftp";
    case AppSpec::Kind::Cbr: return "cbr";
    }
    return "?";
}

struct Scenario {
    std::string name = "unnamed";
    SimTime duration = SimTime::s(134);
    voip::Protocol signaling_mode = voip::Protocol::Sip;

    phy::RadioConfig radio;
    int data_rate_mbps = 54;
    int control_rate_mbps = 6;
    // receive SNR thresholds per OFDM rate, in mode-table order (6..54)
    std::array<double, 8> min_rx_snr_db = default_snr_table();

    static std::array<double, 8> default_snr_table() {
        std::array<double, 8> t{};
        for (std::size_t i = 0; i < t.size(); ++i)
            t[i] = phy::mode_table()[i].min_rx_snr_db;
        return t;
    }

    // PhyMode for a rate with this scenario's SNR threshold applied.
    phy::PhyMode mode_for(int mbps) const {
        phy::PhyMode m = phy::mode_for_rate(mbps);
        for (std::size_t i = 0; i < phy::mode_table().size(); ++i)
            if (phy::mode_table()[i].data_rate_mbps == mbps)
                m.min_rx_snr_db = min_rx_snr_db[i];
        return m;
    }

    mac::MacParams mac_params;
    PcfSpec pcf;

    std::vector<NetworkSpec> networks;
    std::vector<NodeSpec> nodes;
    BackboneSpec backbone;
    SignalingSpec signaling;
    std::vector<AppSpec> apps;
    std::map<int, WaypointPath> mobility; // node id -> full path (start included)

    const NodeSpec* find_node(int id) const {
        for (const auto& n : nodes)
            if (n.id == id)
                return &n;
        return nullptr;
    }

    const NetworkSpec* find_network(const std::string& net_name) const {
        for (const auto& n : networks)
            if (n.name == net_name)
                return &n;
        return nullptr;
    }

    bool node_in_network(int id, const std::string& net_name) const {
        const NodeSpec* n = find_node(id);
        if (!n)
            return false;
        return std::find(n->networks.begin(), n->networks.end(), net_name) != n->networks.end();
    }

    // Movement path for a node; static nodes get a one-point path.
    WaypointPath path_for(int id) const {
        auto it = mobility.find(id);
        if (it != mobility.end())
            return it->second;
        const NodeSpec* n = find_node(id);
        if (!n)
            throw MisuseError("path_for: unknown node " + std::to_string(id));
        return WaypointPath::fixed(n->pos);
    }

    void validate() const;
    std::string serialize(bool for_hash = false) const;
    std::uint64_t hash() const;
};

// ---------------------------------------------------------------------------
// validation

inline void Scenario::validate() const {
    if (duration.ticks < 0)
        throw ConfigError("general: negative duration");
    phy::mode_for_rate(data_rate_mbps);
    phy::mode_for_rate(control_rate_mbps);
    for (std::size_t i = 1; i < min_rx_snr_db.size(); ++i)
        if (min_rx_snr_db[i] < min_rx_snr_db[i - 1])
            throw ConfigError("radio: min_snr_db must be monotone in rate");
    mac_params.validate();
    signaling.sizes.validate();

    std::set<int> ids;
    for (const auto& n : nodes) {
        if (!ids.insert(n.id).second)
            throw ConfigError("nodes: duplicate node id " + std::to_string(n.id));
        for (const auto& net : n.networks)
            if (!find_network(net))
                throw ConfigError("nodes: node " + std::to_string(n.id) +
                                  " references unknown network \"" + net + "\"");
    }

    std::set<std::string> net_names;
    for (const auto& net : networks) {
        if (!net_names.insert(net.name).second)
            throw ConfigError("channels: duplicate network \"" + net.name + "\"");
        if (!net.wired && (net.listenable.empty() || net.listening.empty()))
            throw ConfigError("channels: wireless network \"" + net.name +
                              "\" has an all-zero mask");
    }

    for (const auto& n : nodes) {
        bool has_radio = false;
        unsigned listen = 0;
        for (const auto& net_name : n.networks) {
            const NetworkSpec* net = find_network(net_name);
            if (net && !net->wired) {
                has_radio = true;
                listen |= net->listening.bits;
            }
        }
        if (has_radio && listen == 0)
            throw ConfigError("nodes: radio node " + std::to_string(n.id) +
                              " has an all-zero listening mask");
    }

    for (const auto& a : apps) {
        for (int endpoint : {a.src, a.dst})
            if (!find_node(endpoint))
                throw ConfigError(std::string("applications: ") + app_kind_name(a.kind) + " " +
                                  std::to_string(a.src) + " to " + std::to_string(a.dst) +
                                  ": unknown node " + std::to_string(endpoint));
        if (a.stop < a.start)
            throw ConfigError("applications: stop before start on " +
                              std::to_string(a.src) + " to " + std::to_string(a.dst));
        if (a.src == a.dst)
            throw ConfigError("applications: src and dst are both node " +
                              std::to_string(a.src));
        if (a.kind == AppSpec::Kind::Voip) {
            if (!find_node(signaling.proxy_node))
                throw ConfigError("signaling: proxy node " +
                                  std::to_string(signaling.proxy_node) + " does not exist");
            media::codec_packetize(
                media::Codec::make(a.codec, a.frame_period, a.frames_per_packet));
        }
        if (a.kind == AppSpec::Kind::Ftp) {
            media::FtpTransfer f;
            f.file_bytes = a.file_bytes;
            f.segment_bytes = a.segment_bytes;
            f.validate();
        }
        if (a.kind == AppSpec::Kind::Cbr && a.rate_bps <= 0)
            throw ConfigError("applications: cbr rate must be positive");
    }

    if (!find_node(backbone.hub))
        throw ConfigError("backbone: hub node " + std::to_string(backbone.hub) +
                          " does not exist");
    for (int g : backbone.gateways)
        if (!find_node(g))
            throw ConfigError("backbone: gateway node " + std::to_string(g) +
                              " does not exist");

    if (pcf.enabled) {
        if (!find_node(pcf.ap))
            throw ConfigError("mac: pcf access point node does not exist");
        mac::PcfSchedule sched;
        sched.superframe_period = pcf.superframe;
        sched.cfp_duration = pcf.cfp;
        sched.polling_list = pcf.polled;
        sched.validate();
        for (int s : pcf.polled)
            if (!find_node(s))
                throw ConfigError("mac: pcf polled station " + std::to_string(s) +
                                  " does not exist");
    }

    for (const auto& [node_id, path] : mobility) {
        if (!find_node(node_id))
            throw ConfigError("mobility: unknown node " + std::to_string(node_id));
        path.validate();
    }
}

// ---------------------------------------------------------------------------
// canonical serialization (defaults echoed; round-trips through load_scenario)

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string fmt_seconds(SimTime t) {
    return fmt_double(t.seconds());
}

} // namespace detail

inline std::string Scenario::serialize(bool for_hash) const {
    std::ostringstream out;
    out << "[general]\n";
    out << "name = " << name << "\n";
    out << "duration_s = " << detail::fmt_seconds(duration) << "\n";
    if (!for_hash)
        out << "signaling = " << voip::protocol_name(signaling_mode) << "\n";

    out << "\n[radio]\n";
    out << "tx_power_dbm = " << detail::fmt_double(radio.tx_power_dbm) << "\n";
    out << "antenna_gain_dbi = " << detail::fmt_double(radio.antenna_gain_dbi) << "\n";
    out << "carrier_freq_hz = " << detail::fmt_double(radio.carrier_freq_hz) << "\n";
    out << "antenna_height_m = " << detail::fmt_double(radio.antenna_height_m) << "\n";
    out << "noise_floor_dbm = " << detail::fmt_double(radio.noise_floor_dbm) << "\n";
    out << "data_rate_mbps = " << data_rate_mbps << "\n";
    out << "control_rate_mbps = " << control_rate_mbps << "\n";
    out << "min_snr_db = ";
    for (std::size_t i = 0; i < min_rx_snr_db.size(); ++i)
        out << (i ? "," : "") << detail::fmt_double(min_rx_snr_db[i]);
    out << "\n";

    out << "\n[mac]\n";
    out << "slot_time_us = " << mac_params.slot_time.ticks << "\n";
    out << "sifs_us = " << mac_params.sifs.ticks << "\n";
    out << "cw_min = " << mac_params.cw_min << "\n";
    out << "cw_max = " << mac_params.cw_max << "\n";
    out << "retry_limit = " << mac_params.retry_limit << "\n";
    out << "rts_cts = " << (mac_params.rts_cts ? "on" : "off") << "\n";
    out << "pcf = " << (pcf.enabled ? "on" : "off") << "\n";
    if (pcf.enabled) {
        out << "pcf_ap = " << pcf.ap << "\n";
        out << "pcf_superframe_us = " << pcf.superframe.ticks << "\n";
        out << "pcf_cfp_us = " << pcf.cfp.ticks << "\n";
        out << "pcf_beacon_bytes = " << pcf.beacon_bytes << "\n";
        out << "pcf_polled = ";
        for (std::size_t i = 0; i < pcf.polled.size(); ++i)
            out << (i ? "," : "") << pcf.polled[i];
        out << "\n";
    }

    out << "\n[channels]\n";
    for (const auto& net : networks) {
        out << net.name << " " << net.listenable.to_string() << " "
            << net.listening.to_string();
        if (net.wired)
            out << " wired";
        out << "\n";
    }

    out << "\n[nodes]\n";
    for (const auto& n : nodes) {
        out << n.id << " " << detail::fmt_double(n.pos.x) << " "
            << detail::fmt_double(n.pos.y) << " ";
        for (std::size_t i = 0; i < n.networks.size(); ++i)
            out << (i ? "," : "") << n.networks[i];
        out << "\n";
    }

    out << "\n[backbone]\n";
    out << "hub = " << backbone.hub << "\n";
    out << "gateways = ";
    for (std::size_t i = 0; i < backbone.gateways.size(); ++i)
        out << (i ? "," : "") << backbone.gateways[i];
    out << "\n";
    out << "capacity_bps = " << backbone.capacity_bps << "\n";
    out << "latency_us = " << backbone.latency.ticks << "\n";

    out << "\n[signaling]\n";
    out << "proxy_node = " << signaling.proxy_node << "\n";
    out << "proxy_delay_us = " << signaling.policy.proxy_forward_delay.ticks << "\n";
    out << "registration_lead_s = " << detail::fmt_seconds(signaling.registration_lead) << "\n";
    out << "retransmit_initial_ms = " << signaling.policy.retransmit_initial.ticks / 1000 << "\n";
    out << "retransmit_max = " << signaling.policy.retransmit_max << "\n";
    const auto& sz = signaling.sizes;
    out << "sip_register = " << sz.sip_register << "\n";
    out << "sip_invite = " << sz.sip_invite << "\n";
    out << "sip_ok200 = " << sz.sip_ok200 << "\n";
    out << "sip_ack = " << sz.sip_ack << "\n";
    out << "sip_bye = " << sz.sip_bye << "\n";
    out << "sip_cancel = " << sz.sip_cancel << "\n";
    out << "h323_ras = " << sz.h323_ras << "\n";
    out << "h323_q931 = " << sz.h323_q931 << "\n";
    out << "h323_caps = " << sz.h323_caps << "\n";
    out << "h323_olc = " << sz.h323_olc << "\n";
    out << "h323_progress = " << (signaling.h323_flow.progress_legs ? "on" : "off") << "\n";

    out << "\n[applications]\n";
    for (const auto& a : apps) {
        out << app_kind_name(a.kind) << " " << a.src << " " << a.dst << " "
            << detail::fmt_seconds(a.start) << " " << detail::fmt_seconds(a.stop);
        switch (a.kind) {
        case AppSpec::Kind::Voip:
            out << " codec=" << media::codec_name_str(a.codec);
            out << " frame_ms=" << a.frame_period.ticks / 1000;
            out << " frames_per_packet=" << a.frames_per_packet;
            out << " jitter_ms=" << a.jitter_depth.ticks / 1000;
            out << " media=" << (a.two_way ? "twoway" : "oneway");
            break;
        case AppSpec::Kind::Ftp:
            out << " file_bytes=" << a.file_bytes;
            out << " segment_bytes=" << a.segment_bytes;
            break;
        case AppSpec::Kind::Cbr:
            out << " rate_bps=" << a.rate_bps;
            out << " packet_bytes=" << a.packet_bytes;
            break;
        }
        out << "\n";
    }

    out << "\n[mobility]\n";
    for (const auto& [node_id, path] : mobility) {
        for (std::size_t leg = 0; leg + 1 < path.points.size(); ++leg) {
            const auto& pt = path.points[leg + 1];
            out << node_id << " " << speed_class_name(path.leg_speeds[leg]) << " "
                << detail::fmt_double(pt.pos.x) << " " << detail::fmt_double(pt.pos.y)
                << "\n";
        }
    }
    return out.str();
}

inline std::uint64_t Scenario::hash() const {
    // FNV-1a over the canonical serialization without the signaling mode, so
    // a SIP run and an H.323 run of the same file compare as the same world.
    const std::string text = serialize(/*for_hash=*/true);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// ---------------------------------------------------------------------------
// parsing

namespace detail {

struct Line {
    int number = 0;
    std::string text;
};

[[noreturn]] inline void parse_fail(const Line& ln, const std::string& why) {
    throw ConfigError("scenario line " + std::to_string(ln.number) + ": " + why +
                      " (\"" + ln.text + "\")");
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok)
        out.push_back(tok);
    return out;
}

inline std::vector<std::string> split_char(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const Line& ln, const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            parse_fail(ln, "bad number \"" + s + "\"");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        parse_fail(ln, "bad number \"" + s + "\"");
    }
}

inline std::int64_t parse_int(const Line& ln, const std::string& s) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size())
            parse_fail(ln, "bad integer \"" + s + "\"");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        parse_fail(ln, "bad integer \"" + s + "\"");
    }
}

inline bool parse_on_off(const Line& ln, const std::string& s) {
    if (s == "on" || s == "true" || s == "1")
        return true;
    if (s == "off" || s == "false" || s == "0")
        return false;
    parse_fail(ln, "expected on/off, got \"" + s + "\"");
}

inline std::vector<int> parse_int_list(const Line& ln, const std::string& s) {
    std::vector<int> out;
    for (const auto& part : split_char(s, ','))
        out.push_back(static_cast<int>(parse_int(ln, trim(part))));
    return out;
}

} // namespace detail

inline Scenario load_scenario(const std::string& text) {
    using detail::parse_fail;
    Scenario sc;
    sc.networks.clear();
    sc.nodes.clear();
    sc.apps.clear();

    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    // mobility legs must be resolved after [nodes]; collect then replay
    struct MobilityRow {
        detail::Line ln;
        int node;
        SpeedClass speed;
        double x, y;
    };
    std::vector<MobilityRow> mobility_rows;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string s = raw;
        if (const auto hash_pos = s.find('#'); hash_pos != std::string::npos)
            s = s.substr(0, hash_pos);
        s = detail::trim(s);
        if (s.empty())
            continue;
        const detail::Line ln{line_no, s};

        if (s.front() == '[') {
            if (s.back() != ']')
                parse_fail(ln, "unterminated section header");
            section = s.substr(1, s.size() - 2);
            const std::set<std::string> known{"general", "radio",    "mac",
                                              "channels", "nodes",   "backbone",
                                              "signaling", "applications", "mobility"};
            if (!known.count(section))
                parse_fail(ln, "unknown section \"" + section + "\"");
            continue;
        }
        if (section.empty())
            parse_fail(ln, "content before any [section]");

        if (section == "channels") {
            const auto tok = detail::split_ws(s);
            if (tok.size() != 3 && tok.size() != 4)
                parse_fail(ln, "expected: <network> <listenable> <listening> [wired]");
            NetworkSpec net;
            net.name = tok[0];
            net.listenable = phy::ChannelMask::parse(tok[1]);
            net.listening = phy::ChannelMask::parse(tok[2]);
            if (tok.size() == 4) {
                if (tok[3] != "wired")
                    parse_fail(ln, "trailing token must be \"wired\"");
                net.wired = true;
            }
            sc.networks.push_back(net);
            continue;
        }

        if (section == "nodes") {
            const auto tok = detail::split_ws(s);
            if (tok.size() != 4)
                parse_fail(ln, "expected: <id> <x_m> <y_m> <networks,comma,list>");
            NodeSpec n;
            n.id = static_cast<int>(detail::parse_int(ln, tok[0]));
            n.pos.x = detail::parse_double(ln, tok[1]);
            n.pos.y = detail::parse_double(ln, tok[2]);
            for (const auto& net : detail::split_char(tok[3], ','))
                n.networks.push_back(detail::trim(net));
            sc.nodes.push_back(n);
            continue;
        }

        if (section == "applications") {
            const auto tok = detail::split_ws(s);
            if (tok.size() < 5)
                parse_fail(ln, "expected: <kind> <src> <dst> <start_s> <stop_s> [k=v ...]");
            AppSpec a;
            if (tok[0] == "voip")
                a.kind = AppSpec::Kind::Voip;
            else if (tok[0] == "ftp")
                a.kind = AppSpec::Kind::Ftp;
            else if (tok[0] == "cbr")
                a.kind = AppSpec::Kind::Cbr;
            else
                parse_fail(ln, "unknown application kind \"" + tok[0] + "\"");
            a.src = static_cast<int>(detail::parse_int(ln, tok[1]));
            a.dst = static_cast<int>(detail::parse_int(ln, tok[2]));
            a.start = SimTime::from_seconds(detail::parse_double(ln, tok[3]));
            a.stop = SimTime::from_seconds(detail::parse_double(ln, tok[4]));
            for (std::size_t i = 5; i < tok.size(); ++i) {
                const auto kv = detail::split_char(tok[i], '=');
                if (kv.size() != 2)
                    parse_fail(ln, "expected key=value, got \"" + tok[i] + "\"");
                const std::string& key = kv[0];
                const std::string& val = kv[1];
                if (key == "codec")
                    a.codec = media::codec_from_string(val);
                else if (key == "frame_ms")
                    a.frame_period = SimTime::ms(detail::parse_int(ln, val));
                else if (key == "frames_per_packet")
                    a.frames_per_packet = static_cast<int>(detail::parse_int(ln, val));
                else if (key == "jitter_ms")
                    a.jitter_depth = SimTime::ms(detail::parse_int(ln, val));
                else if (key == "media") {
                    if (val == "twoway")
                        a.two_way = true;
                    else if (val == "oneway")
                        a.two_way = false;
                    else
                        parse_fail(ln, "media must be twoway or oneway");
                } else if (key == "file_bytes")
                    a.file_bytes = detail::parse_int(ln, val);
                else if (key == "segment_bytes")
                    a.segment_bytes = detail::parse_int(ln, val);
                else if (key == "rate_bps")
                    a.rate_bps = detail::parse_int(ln, val);
                else if (key == "packet_bytes")
                    a.packet_bytes = detail::parse_int(ln, val);
                else
                    parse_fail(ln, "unknown application parameter \"" + key + "\"");
            }
            sc.apps.push_back(a);
            continue;
        }

        if (section == "mobility") {
            const auto tok = detail::split_ws(s);
            if (tok.size() != 4)
                parse_fail(ln, "expected: <node> <slow|fast> <x_m> <y_m>");
            MobilityRow row;
            row.ln = ln;
            row.node = static_cast<int>(detail::parse_int(ln, tok[0]));
            if (tok[1] == "slow")
                row.speed = SpeedClass::Slow;
            else if (tok[1] == "fast")
                row.speed = SpeedClass::Fast;
            else
                parse_fail(ln, "speed class must be slow or fast");
            row.x = detail::parse_double(ln, tok[2]);
            row.y = detail::parse_double(ln, tok[3]);
            mobility_rows.push_back(row);
            continue;
        }

        // key = value sections
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            parse_fail(ln, "expected key = value");
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string val = detail::trim(s.substr(eq + 1));
        if (key.empty() || val.empty())
            parse_fail(ln, "empty key or value");

        if (section == "general") {
            if (key == "name")
                sc.name = val;
            else if (key == "duration_s")
                sc.duration = SimTime::from_seconds(detail::parse_double(ln, val));
            else if (key == "signaling") {
                if (val == "sip")
                    sc.signaling_mode = voip::Protocol::Sip;
                else if (val == "h323")
                    sc.signaling_mode = voip::Protocol::H323;
                else
                    parse_fail(ln, "signaling must be sip or h323");
            } else
                parse_fail(ln, "unknown key \"" + key + "\" in [general]");
        } else if (section == "radio") {
            if (key == "tx_power_dbm")
                sc.radio.tx_power_dbm = detail::parse_double(ln, val);
            else if (key == "antenna_gain_dbi")
                sc.radio.antenna_gain_dbi = detail::parse_double(ln, val);
            else if (key == "carrier_freq_hz")
                sc.radio.carrier_freq_hz = detail::parse_double(ln, val);
            else if (key == "antenna_height_m")
                sc.radio.antenna_height_m = detail::parse_double(ln, val);
            else if (key == "noise_floor_dbm")
                sc.radio.noise_floor_dbm = detail::parse_double(ln, val);
            else if (key == "data_rate_mbps")
                sc.data_rate_mbps = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "control_rate_mbps")
                sc.control_rate_mbps = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "min_snr_db") {
                const auto parts = detail::split_char(val, ',');
                if (parts.size() != sc.min_rx_snr_db.size())
                    parse_fail(ln, "min_snr_db needs exactly 8 values (rates 6..54)");
                for (std::size_t i = 0; i < parts.size(); ++i)
                    sc.min_rx_snr_db[i] = detail::parse_double(ln, detail::trim(parts[i]));
            } else
                parse_fail(ln, "unknown key \"" + key + "\" in [radio]");
        } else if (section == "mac") {
            if (key == "slot_time_us")
                sc.mac_params.slot_time = SimTime::us(detail::parse_int(ln, val));
            else if (key == "sifs_us")
                sc.mac_params.sifs = SimTime::us(detail::parse_int(ln, val));
            else if (key == "cw_min")
                sc.mac_params.cw_min = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "cw_max")
                sc.mac_params.cw_max = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "retry_limit")
                sc.mac_params.retry_limit = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "rts_cts")
                sc.mac_params.rts_cts = detail::parse_on_off(ln, val);
            else if (key == "pcf")
                sc.pcf.enabled = detail::parse_on_off(ln, val);
            else if (key == "pcf_ap")
                sc.pcf.ap = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "pcf_superframe_us")
                sc.pcf.superframe = SimTime::us(detail::parse_int(ln, val));
            else if (key == "pcf_cfp_us")
                sc.pcf.cfp = SimTime::us(detail::parse_int(ln, val));
            else if (key == "pcf_beacon_bytes")
                sc.pcf.beacon_bytes = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "pcf_polled")
                sc.pcf.polled = detail::parse_int_list(ln, val);
            else
                parse_fail(ln, "unknown key \"" + key + "\" in [mac]");
        } else if (section == "backbone") {
            if (key == "hub")
                sc.backbone.hub = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "gateways")
                sc.backbone.gateways = detail::parse_int_list(ln, val);
            else if (key == "capacity_bps")
                sc.backbone.capacity_bps = detail::parse_int(ln, val);
            else if (key == "capacity_mbps")
                sc.backbone.capacity_bps = detail::parse_int(ln, val) * 1000000;
            else if (key == "latency_us")
                sc.backbone.latency = SimTime::us(detail::parse_int(ln, val));
            else
                parse_fail(ln, "unknown key \"" + key + "\" in [backbone]");
        } else if (section == "signaling") {
            auto& sig = sc.signaling;
            if (key == "proxy_node")
                sig.proxy_node = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "proxy_delay_us")
                sig.policy.proxy_forward_delay = SimTime::us(detail::parse_int(ln, val));
            else if (key == "registration_lead_s")
                sig.registration_lead =
                    SimTime::from_seconds(detail::parse_double(ln, val));
            else if (key == "retransmit_initial_ms")
                sig.policy.retransmit_initial = SimTime::ms(detail::parse_int(ln, val));
            else if (key == "retransmit_max")
                sig.policy.retransmit_max = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "sip_register")
                sig.sizes.sip_register = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "sip_invite")
                sig.sizes.sip_invite = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "sip_ok200")
                sig.sizes.sip_ok200 = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "sip_ack")
                sig.sizes.sip_ack = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "sip_bye")
                sig.sizes.sip_bye = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "sip_cancel")
                sig.sizes.sip_cancel = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "h323_ras")
                sig.sizes.h323_ras = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "h323_q931")
                sig.sizes.h323_q931 = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "h323_caps")
                sig.sizes.h323_caps = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "h323_olc")
                sig.sizes.h323_olc = static_cast<int>(detail::parse_int(ln, val));
            else if (key == "h323_progress")
                sig.h323_flow.progress_legs = detail::parse_on_off(ln, val);
            else
                parse_fail(ln, "unknown key \"" + key + "\" in [signaling]");
        } else {
            parse_fail(ln, "key = value not valid in [" + section + "]");
        }
    }

    for (const auto& row : mobility_rows) {
        auto it = sc.mobility.find(row.node);
        if (it == sc.mobility.end()) {
            const NodeSpec* n = sc.find_node(row.node);
            if (!n)
                parse_fail(row.ln, "mobility for unknown node " + std::to_string(row.node));
            it = sc.mobility.emplace(row.node, WaypointPath::fixed(n->pos)).first;
        }
        it->second.append_leg({row.x, row.y}, row.speed);
    }

    // Fill the ACK timeout from the control-rate airtime.
    const auto ctrl = phy::mode_for_rate(sc.control_rate_mbps);
    sc.mac_params.ack_timeout = sc.mac_params.sifs +
                                phy::ppdu_duration(sc.mac_params.ack_bytes, ctrl) +
                                sc.mac_params.slot_time;

    sc.validate();
    return sc;
}

inline Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

} // namespace vowlan::run

#endif
