// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_RUN_REPORT_HPP
#define VOWLAN_RUN_REPORT_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vowlan/sim/error.hpp"
#include "vowlan/voip/messages.hpp"

namespace vowlan::run {

struct VoipFlowReport {
    int flow_id = -1;
    int src = 0;
    int dst = 0;
    std::optional<double> init_established_s;
    std::optional<double> recv_established_s;
    std::optional<double> init_setup_latency_s;
    std::optional<double> recv_setup_latency_s;
    bool setup_failed = false;
    // endpoint totals: signaling + media, IP-layer bytes
    std::int64_t init_bytes_sent = 0;
    std::int64_t init_bytes_received = 0;
    std::int64_t recv_bytes_sent = 0;
    std::int64_t recv_bytes_received = 0;
    // media stream accounting per direction (fwd = initiator -> receiver)
    std::int64_t media_sent_fwd = 0;
    std::int64_t media_received_fwd = 0;
    std::int64_t media_lost_fwd = 0;
    std::int64_t media_sent_rev = 0;
    std::int64_t media_received_rev = 0;
    std::int64_t media_lost_rev = 0;
    std::uint64_t rtp_delivered = 0;
    std::optional<double> rtp_avg_delay_s;
    std::uint64_t jb_drops_fwd = 0;
    std::uint64_t jb_drops_rev = 0;
    std::uint64_t sig_stray_dropped = 0;
    bool conserved = false;
};

struct BackgroundFlowReport {
    int flow_id = -1;
    std::string kind;
    int src = 0;
    int dst = 0;
    std::int64_t bytes_sent = 0;
    std::int64_t bytes_received = 0;
    std::int64_t bytes_lost = 0;
    std::uint64_t packets_delivered = 0;
    std::optional<double> avg_delay_s;
    bool conserved = false;
};

struct CurvePoint {
    std::int64_t x_ms = 0;
    double bps = 0.0;
};

struct MetricsReport {
    std::string scenario_name;
    std::uint64_t scenario_hash = 0;
    std::uint64_t seed = 0;
    voip::Protocol mode = voip::Protocol::Sip;
    double duration_s = 0.0;
    std::string scenario_echo; // canonical scenario with all defaults applied

    std::vector<VoipFlowReport> voip_flows;
    std::vector<BackgroundFlowReport> background_flows;

    double overall_throughput_bps = 0.0;
    std::vector<std::int64_t> throughput_bins_bits; // delivered payload bits per 1 s bin
    std::vector<CurvePoint> window_curve;           // throughput vs window length
    std::vector<CurvePoint> talkspurt_curve;        // media throughput vs audio length

    std::uint64_t mac_drops = 0;
    std::uint64_t collisions = 0;
    std::uint64_t sig_retransmits = 0;
    std::int64_t total_bytes_sent = 0;
    std::int64_t total_bytes_received = 0;
    std::int64_t total_bytes_lost = 0;
    bool conservation_ok = false;

    std::vector<std::string> trace_sample; // pre-formatted CSV rows

    // aggregate views used by summaries and the comparison
    double mean_init_established_s() const { return mean_of(&VoipFlowReport::init_established_s); }
    double mean_recv_established_s() const { return mean_of(&VoipFlowReport::recv_established_s); }
    double mean_setup_latency_s() const { return mean_of(&VoipFlowReport::init_setup_latency_s); }
    std::int64_t sum_init_bytes_sent() const {
        std::int64_t s = 0;
        for (const auto& f : voip_flows)
            s += f.init_bytes_sent;
        return s;
    }

private:
    double mean_of(std::optional<double> VoipFlowReport::*field) const {
        double sum = 0;
        int n = 0;
        for (const auto& f : voip_flows)
            if (f.*field) {
                sum += **&(f.*field);
                ++n;
            }
        return n ? sum / n : 0.0;
    }
};

// ---------------------------------------------------------------------------
// formatting helpers (fixed formats keep identical runs byte-identical)

namespace detail {

inline std::string fmt_opt(const std::optional<double>& v) {
    if (!v)
        return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
}

inline std::string fmt_f(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ConfigError("cannot write output file: " + p.string());
    out << content;
    if (!out)
        throw ConfigError("write failed: " + p.string());
}

} // namespace detail

// ---------------------------------------------------------------------------
// per-run emission

inline void emit(const MetricsReport& r, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory " + out_dir.string() + ": " +
                          ec.message());

    { // flows.csv: one row per application flow
        std::ostringstream csv;
        csv << "flow_id,kind,src,dst,mode,init_established_s,recv_established_s,"
               "init_setup_latency_s,recv_setup_latency_s,setup_failed,"
               "init_bytes_sent,init_bytes_received,recv_bytes_sent,recv_bytes_received,"
               "media_sent_fwd,media_received_fwd,media_lost_fwd,"
               "media_sent_rev,media_received_rev,media_lost_rev,"
               "rtp_delivered,rtp_avg_delay_s,jb_drops_fwd,jb_drops_rev,"
               "sig_stray_dropped,conserved\n";
        for (const auto& f : r.voip_flows) {
            csv << f.flow_id << ",voip," << f.src << "," << f.dst << ","
                << voip::protocol_name(r.mode) << "," << detail::fmt_opt(f.init_established_s)
                << "," << detail::fmt_opt(f.recv_established_s) << ","
                << detail::fmt_opt(f.init_setup_latency_s) << ","
                << detail::fmt_opt(f.recv_setup_latency_s) << "," << (f.setup_failed ? 1 : 0)
                << "," << f.init_bytes_sent << "," << f.init_bytes_received << ","
                << f.recv_bytes_sent << "," << f.recv_bytes_received << ","
                << f.media_sent_fwd << "," << f.media_received_fwd << "," << f.media_lost_fwd
                << "," << f.media_sent_rev << "," << f.media_received_rev << ","
                << f.media_lost_rev << "," << f.rtp_delivered << ","
                << detail::fmt_opt(f.rtp_avg_delay_s) << "," << f.jb_drops_fwd << ","
                << f.jb_drops_rev << "," << f.sig_stray_dropped << ","
                << (f.conserved ? 1 : 0) << "\n";
        }
        for (const auto& f : r.background_flows) {
            csv << f.flow_id << "," << f.kind << "," << f.src << "," << f.dst << ","
                << voip::protocol_name(r.mode) << ",,,,,0," << f.bytes_sent << ",0,0,"
                << f.bytes_received << "," << f.bytes_sent << "," << f.bytes_received << ","
                << f.bytes_lost << ",0,0,0," << f.packets_delivered << ","
                << detail::fmt_opt(f.avg_delay_s) << ",0,0,0," << (f.conserved ? 1 : 0)
                << "\n";
        }
        detail::write_file(out_dir / "flows.csv", csv.str());
    }

    { // throughput_series.csv: delivered payload bits per 1 s interval
        std::ostringstream csv;
        csv << "interval_start_s,delivered_payload_bits,throughput_bps\n";
        for (std::size_t i = 0; i < r.throughput_bins_bits.size(); ++i)
            csv << i << "," << r.throughput_bins_bits[i] << ","
                << detail::fmt_f(static_cast<double>(r.throughput_bins_bits[i])) << "\n";
        detail::write_file(out_dir / "throughput_series.csv", csv.str());
    }

    { // events_sample.csv: head of the event trace
        std::ostringstream csv;
        csv << "t_us,node,event,peer,detail\n";
        for (const auto& row : r.trace_sample)
            csv << row << "\n";
        detail::write_file(out_dir / "events_sample.csv", csv.str());
    }

    { // summary.txt: the five headline metrics per flow, plus run globals
        std::ostringstream s;
        s << "scenario: " << r.scenario_name << "\n";
        s << "signaling: " << voip::protocol_name(r.mode) << "\n";
        s << "seed: " << r.seed << "\n";
        char hash_hex[32];
        std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                      static_cast<unsigned long long>(r.scenario_hash));
        s << "scenario_hash: " << hash_hex << "\n";
        s << "duration_s: " << detail::fmt_f(r.duration_s) << "\n\n";
        for (const auto& f : r.voip_flows) {
            s << "voip flow " << f.flow_id << " (" << f.src << " -> " << f.dst << ")\n";
            s << "  session establishment time: initiator "
              << (f.init_established_s ? detail::fmt_opt(f.init_established_s) + " s"
                                       : std::string("unset"))
              << ", receiver "
              << (f.recv_established_s ? detail::fmt_opt(f.recv_established_s) + " s"
                                       : std::string("unset"))
              << " (setup latency " << detail::fmt_opt(f.init_setup_latency_s) << " s)\n";
            s << "  total bytes sent: initiator " << f.init_bytes_sent << ", receiver "
              << f.recv_bytes_sent << "\n";
            s << "  total bytes received: initiator " << f.init_bytes_received
              << ", receiver " << f.recv_bytes_received << "\n";
            s << "  rtp average end-to-end delay: "
              << (f.rtp_avg_delay_s ? detail::fmt_opt(f.rtp_avg_delay_s) + " s"
                                    : std::string("unset"))
              << "\n";
            s << "  jitter buffer drops: fwd " << f.jb_drops_fwd << ", rev " << f.jb_drops_rev
              << "\n";
        }
        for (const auto& f : r.background_flows) {
            s << f.kind << " flow " << f.flow_id << " (" << f.src << " -> " << f.dst
              << "): sent " << f.bytes_sent << " B, received " << f.bytes_received
              << " B, lost " << f.bytes_lost << " B\n";
        }
        s << "\noverall throughput: " << detail::fmt_f(r.overall_throughput_bps)
          << " bit/s\n";
        s << "mac drops: " << r.mac_drops << "\n";
        s << "collisions: " << r.collisions << "\n";
        s << "signaling retransmits: " << r.sig_retransmits << "\n";
        s << "conservation: " << (r.conservation_ok ? "ok" : "VIOLATED") << " (sent "
          << r.total_bytes_sent << " = received " << r.total_bytes_received << " + lost "
          << r.total_bytes_lost << ")\n";
        detail::write_file(out_dir / "summary.txt", s.str());
    }

    detail::write_file(out_dir / "run.log", r.scenario_echo);
}

// ---------------------------------------------------------------------------
// side-by-side comparison of a SIP run and an H.323 run

struct ComparisonRow {
    std::string metric;
    int flow_id = -1; // -1: global
    std::optional<double> sip;
    std::optional<double> h323;
    std::string direction;
};

struct Comparison {
    std::uint64_t scenario_hash = 0;
    std::vector<ComparisonRow> rows;
    const MetricsReport* sip = nullptr;
    const MetricsReport* h323 = nullptr;
};

namespace detail {

inline std::string lower_is(const std::optional<double>& s, const std::optional<double>& h,
                            const char* who_when_lower) {
    if (!s || !h)
        return "incomplete";
    if (*s == *h)
        return "equal";
    const bool sip_lower = *s < *h;
    return std::string(sip_lower ? "SIP " : "H323 ") + who_when_lower;
}

} // namespace detail

inline Comparison compare(const MetricsReport& a, const MetricsReport& b) {
    if (a.scenario_hash != b.scenario_hash)
        throw ConfigError("compare: reports come from different scenarios (hash mismatch)");
    if (a.mode == b.mode)
        throw ConfigError("compare: both reports use the same signaling mode; need one "
                          "SIP run and one H.323 run");
    const MetricsReport& sip = a.mode == voip::Protocol::Sip ? a : b;
    const MetricsReport& h323 = a.mode == voip::Protocol::Sip ? b : a;

    Comparison c;
    c.scenario_hash = a.scenario_hash;
    c.sip = &sip;
    c.h323 = &h323;

    auto opt_i64 = [](std::int64_t v) { return std::optional<double>(static_cast<double>(v)); };

    for (std::size_t i = 0; i < sip.voip_flows.size() || i < h323.voip_flows.size(); ++i) {
        const VoipFlowReport* fs = i < sip.voip_flows.size() ? &sip.voip_flows[i] : nullptr;
        const VoipFlowReport* fh = i < h323.voip_flows.size() ? &h323.voip_flows[i] : nullptr;
        const int flow = fs ? fs->flow_id : fh->flow_id;
        auto add = [&](const std::string& metric, std::optional<double> s,
                       std::optional<double> h, const char* when_lower) {
            c.rows.push_back({metric, flow, s, h, detail::lower_is(s, h, when_lower)});
        };
        add("initiator_established_s", fs ? fs->init_established_s : std::nullopt,
            fh ? fh->init_established_s : std::nullopt, "earlier");
        add("receiver_established_s", fs ? fs->recv_established_s : std::nullopt,
            fh ? fh->recv_established_s : std::nullopt, "earlier");
        add("setup_latency_s", fs ? fs->init_setup_latency_s : std::nullopt,
            fh ? fh->init_setup_latency_s : std::nullopt, "faster");
        add("init_bytes_sent", fs ? opt_i64(fs->init_bytes_sent) : std::nullopt,
            fh ? opt_i64(fh->init_bytes_sent) : std::nullopt, "lower");
        add("init_bytes_received", fs ? opt_i64(fs->init_bytes_received) : std::nullopt,
            fh ? opt_i64(fh->init_bytes_received) : std::nullopt, "lower");
        add("recv_bytes_sent", fs ? opt_i64(fs->recv_bytes_sent) : std::nullopt,
            fh ? opt_i64(fh->recv_bytes_sent) : std::nullopt, "lower");
        add("recv_bytes_received", fs ? opt_i64(fs->recv_bytes_received) : std::nullopt,
            fh ? opt_i64(fh->recv_bytes_received) : std::nullopt, "lower");
        add("rtp_avg_delay_s", fs ? fs->rtp_avg_delay_s : std::nullopt,
            fh ? fh->rtp_avg_delay_s : std::nullopt, "lower");
    }
    c.rows.push_back({"overall_throughput_bps", -1, sip.overall_throughput_bps,
                      h323.overall_throughput_bps,
                      sip.overall_throughput_bps == h323.overall_throughput_bps
                          ? "equal"
                          : (sip.overall_throughput_bps > h323.overall_throughput_bps
                                 ? "SIP higher"
                                 : "H323 higher")});
    return c;
}

inline void emit_comparison(const Comparison& c, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory " + out_dir.string() + ": " +
                          ec.message());

    { // full table
        std::ostringstream t;
        t << "metric,flow_id,sip,h323,direction\n";
        for (const auto& row : c.rows)
            t << row.metric << "," << (row.flow_id < 0 ? std::string("global")
                                                       : std::to_string(row.flow_id))
              << "," << detail::fmt_opt(row.sip) << "," << detail::fmt_opt(row.h323) << ","
              << row.direction << "\n";
        detail::write_file(out_dir / "comparison.csv", t.str());
    }

    auto per_flow_csv = [&](const char* fname, auto getter) {
        std::ostringstream t;
        t << "flow_id,sip,h323,direction\n";
        for (std::size_t i = 0; i < c.sip->voip_flows.size(); ++i) {
            if (i >= c.h323->voip_flows.size()) {
                t << c.sip->voip_flows[i].flow_id << "," << "" << "," << ""
                  << ",incomplete\n";
                continue;
            }
            const auto s = getter(c.sip->voip_flows[i]);
            const auto h = getter(c.h323->voip_flows[i]);
            std::string dir = "equal";
            if (s && h && *s != *h)
                dir = *s < *h ? "SIP lower" : "H323 lower";
            if (!s || !h)
                dir = "incomplete";
            t << c.sip->voip_flows[i].flow_id << "," << detail::fmt_opt(s) << ","
              << detail::fmt_opt(h) << "," << dir << "\n";
        }
        detail::write_file(out_dir / fname, t.str());
    };

    auto opt_i64 = [](std::int64_t v) { return std::optional<double>(static_cast<double>(v)); };
    per_flow_csv("fig3_initiator_establishment.csv",
                 [](const VoipFlowReport& f) { return f.init_established_s; });
    per_flow_csv("fig4_receiver_establishment.csv",
                 [](const VoipFlowReport& f) { return f.recv_established_s; });
    per_flow_csv("fig5_initiator_bytes_sent.csv",
                 [&](const VoipFlowReport& f) { return opt_i64(f.init_bytes_sent); });
    per_flow_csv("fig6_initiator_bytes_received.csv",
                 [&](const VoipFlowReport& f) { return opt_i64(f.init_bytes_received); });
    per_flow_csv("fig7_receiver_bytes_sent.csv",
                 [&](const VoipFlowReport& f) { return opt_i64(f.recv_bytes_sent); });
    per_flow_csv("fig8_receiver_bytes_received.csv",
                 [&](const VoipFlowReport& f) { return opt_i64(f.recv_bytes_received); });
    per_flow_csv("fig9_rtp_delay.csv",
                 [](const VoipFlowReport& f) { return f.rtp_avg_delay_s; });

    { // fig10: throughput against window length and against audio length
        std::ostringstream t;
        t << "curve,x_ms,sip_bps,h323_bps\n";
        for (std::size_t i = 0; i < c.sip->window_curve.size() &&
                                i < c.h323->window_curve.size();
             ++i)
            t << "window," << c.sip->window_curve[i].x_ms << ","
              << detail::fmt_f(c.sip->window_curve[i].bps) << ","
              << detail::fmt_f(c.h323->window_curve[i].bps) << "\n";
        for (std::size_t i = 0; i < c.sip->talkspurt_curve.size() &&
                                i < c.h323->talkspurt_curve.size();
             ++i)
            t << "talkspurt," << c.sip->talkspurt_curve[i].x_ms << ","
              << detail::fmt_f(c.sip->talkspurt_curve[i].bps) << ","
              << detail::fmt_f(c.h323->talkspurt_curve[i].bps) << "\n";
        detail::write_file(out_dir / "fig10_throughput.csv", t.str());
    }
}

} // namespace vowlan::run

#endif
