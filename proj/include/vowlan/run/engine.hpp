// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_RUN_ENGINE_HPP
#define VOWLAN_RUN_ENGINE_HPP

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "vowlan/mac/dcf.hpp"
#include "vowlan/mac/frame.hpp"
#include "vowlan/mac/params.hpp"
#include "vowlan/mac/pcf.hpp"
#include "vowlan/media/jitter_buffer.hpp"
#include "vowlan/media/metrics.hpp"
#include "vowlan/media/sources.hpp"
#include "vowlan/net/packet.hpp"
#include "vowlan/phy/airtime.hpp"
#include "vowlan/phy/channel.hpp"
#include "vowlan/phy/propagation.hpp"
#include "vowlan/run/mobility.hpp"
#include "vowlan/run/report.hpp"
#include "vowlan/run/scenario.hpp"
#include "vowlan/sim/kernel.hpp"
#include "vowlan/sim/rng.hpp"
#include "vowlan/voip/call.hpp"

namespace vowlan::run {

// Radios take one microsecond to notice a transition on the medium. Two
// stations whose backoffs expire in the same microsecond therefore both
// transmit, which is what makes collisions possible at all in a
// zero-propagation-delay model.
inline constexpr SimTime kCarrierSenseDelay = SimTime::us(1);

struct TraceEvent {
    enum class Type {
        TxStart,
        RxOutcome,
        MacDrop,
        MacServiceDone,
        PcfPoll,
        PacketDelivered,
        PacketLost,
        SigSent,
        SigDelivered,
    };

    SimTime t{};
    Type type = Type::TxStart;
    int node = -1;
    int peer = -1;
    mac::Mpdu::Kind frame_kind = mac::Mpdu::Kind::Data;
    net::PacketKind pkt_kind = net::PacketKind::RtpMedia;
    phy::Reception outcome = phy::Reception::Delivered;
    int channel = -1;
    std::int64_t a = 0;
    std::int64_t b = 0;
};

inline const char* trace_type_name(TraceEvent::Type t) {
    switch (t) {
    case TraceEvent::Type::TxStart: return "tx_start";
    case TraceEvent::Type::RxOutcome: return "rx";
    case TraceEvent::Type::MacDrop: return "mac_drop";
    case TraceEvent::Type::MacServiceDone: return "mac_service";
    case TraceEvent::Type::PcfPoll: return "pcf_poll";
    case TraceEvent::Type::PacketDelivered: return "pkt_delivered";
    case TraceEvent::Type::PacketLost: return "pkt_lost";
    case TraceEvent::Type::SigSent: return "sig_sent";
    case TraceEvent::Type::SigDelivered: return "sig_delivered";
    }
    return "?";
}

class TraceSink {
public:
    virtual ~TraceSink() = default;
    virtual void record(const TraceEvent& ev) = 0;
};

class Engine {
public:
    Engine(Scenario sc, std::uint64_t seed)
        : sc_(std::move(sc)), rng_(seed), seed_(seed),
          data_mode_(sc_.mode_for(sc_.data_rate_mbps)),
          ctrl_mode_(sc_.mode_for(sc_.control_rate_mbps)) {
        sc_.validate();
        setup();
    }

    void set_trace_sink(TraceSink* sink) { sink_ = sink; }

    MetricsReport run() {
        schedule_workload();
        try {
            kernel_.run_until(sc_.duration);
        } catch (const MisuseError& e) {
            // fatal state-machine faults abort with the event-trace tail
            std::string msg = e.what();
            msg += "\nrecent events:";
            for (const auto& line : kernel_.recent_trace())
                msg += "\n  " + line;
            throw MisuseError(msg);
        }
        return finalize();
    }

    const Kernel& kernel() const { return kernel_; }

private:
    // ------------------------------------------------------------------ types

    struct ActiveTx {
        std::int64_t id = 0;
        int tx_node = 0;
        mac::Mpdu mpdu;
        phy::PhyMode mode;
        SimTime start{}, end{};
        bool overlapped = false;
        bool dcf_managed = false;
        SimTime nav_duration{}; // for RTS/CTS overhearers
        int channel = -1;
    };

    struct Channel {
        std::string name;
        phy::ChannelMask listenable;
        phy::ChannelMask listening;
        std::vector<int> members; // node ids with a radio on this network
        std::vector<ActiveTx> active;
    };

    struct NodeRt {
        int id = 0;
        WaypointPath path;
        int channel = -1; // index into channels_, -1 for wired-only nodes
        bool on_backbone = false;

        mac::DcfState mac;
        EventHandle difs_timer, backoff_timer, ack_timer, cts_timer, nav_timer;
        std::deque<SimTime> enqueue_times; // mirrors mac.pending
        int others_active = 0;
        int own_tx = 0;
        SimTime nav_until{};
        bool last_busy = false;
        std::optional<mac::Mpdu> awaiting_cts; // RTS sent, data pending
        std::deque<std::int64_t> pcf_uplink;   // packet ids served by polls
    };

    struct SigMeta {
        voip::Protocol proto = voip::Protocol::Sip;
        int flow = -1;
        voip::Role from_role = voip::Role::Initiator;
        bool from_gk = false;
        voip::SipMethod sip_method = voip::SipMethod::Invite;
        voip::H323MsgKind h323_kind = voip::H323MsgKind::Setup;
        int size_bytes = 0;
        int final_dst = 0;
        bool absorb_at_proxy = false;
    };

    struct InFlight {
        net::Packet pkt;
        net::DeliveryRecord rec;
        bool has_sig = false;
        SigMeta sig;
    };

    struct RetxState {
        bool armed = false;
        EventHandle timer;
        int tries = 0;
        SimTime delay{};
        voip::SipMessage sip{};
        voip::H323Message h323{};
        bool is_sip = true;
    };

    struct VoipFlow {
        int flow_id = -1;
        AppSpec spec;
        voip::CallState init;
        voip::CallState recv;
        RetxState retx_init, retx_recv;
        media::RtpSource src_fwd, src_rev;
        bool fwd_started = false, rev_started = false;
        media::JitterBuffer jb_fwd, jb_rev;
        media::FlowMetrics media_fwd, media_rev; // fwd: initiator -> receiver
        media::FlowMetrics sig;                  // all signaling records of the flow
        bool recv_registered = false;            // SIP contact known at the proxy
        bool init_registered = false;
        std::vector<std::pair<std::int64_t, std::int64_t>> media_deliveries; // (offset_us, bits)
        SimTime media_epoch{};
        bool media_epoch_set = false;
    };

    struct BgFlow {
        int flow_id = -1;
        AppSpec spec;
        media::FlowMetrics metrics;
        media::FtpTransfer ftp;
        std::optional<media::CbrSource> cbr;
        bool stopped = false;
    };

    // ------------------------------------------------------------------ setup

    void setup() {
        for (std::size_t i = 0; i < sc_.networks.size(); ++i) {
            const auto& net = sc_.networks[i];
            if (net.wired)
                continue;
            Channel ch;
            ch.name = net.name;
            ch.listenable = net.listenable;
            ch.listening = net.listening;
            channel_index_by_name_[net.name] = static_cast<int>(channels_.size());
            channels_.push_back(ch);
        }

        for (const auto& n : sc_.nodes) {
            NodeRt rt;
            rt.id = n.id;
            rt.path = sc_.path_for(n.id);
            rt.mac = mac::DcfState::initial(sc_.mac_params);
            for (const auto& net_name : n.networks) {
                const NetworkSpec* net = sc_.find_network(net_name);
                if (net->wired) {
                    rt.on_backbone = true;
                    continue;
                }
                const int ch = channel_index_by_name_.at(net_name);
                if (rt.channel >= 0)
                    throw ConfigError("node " + std::to_string(n.id) +
                                      " joins more than one wireless network; one radio "
                                      "per node is supported");
                rt.channel = ch;
                channels_[static_cast<std::size_t>(ch)].members.push_back(n.id);
            }
            node_index_[n.id] = static_cast<int>(nodes_.size());
            nodes_.push_back(std::move(rt));
        }

        build_routes();

        if (sc_.pcf.enabled) {
            pcf_sched_.superframe_period = sc_.pcf.superframe;
            pcf_sched_.cfp_duration = sc_.pcf.cfp;
            pcf_sched_.polling_list = sc_.pcf.polled;
        }
    }

    void build_routes() {
        // adjacency: radio nodes sharing a network; backbone hub <-> gateways
        std::map<int, std::vector<int>> adj;
        for (const auto& ch : channels_)
            for (int a : ch.members)
                for (int b : ch.members)
                    if (a != b)
                        adj[a].push_back(b);
        for (int g : sc_.backbone.gateways) {
            adj[sc_.backbone.hub].push_back(g);
            adj[g].push_back(sc_.backbone.hub);
        }
        for (const auto& src : sc_.nodes) {
            // BFS rooted at src
            std::map<int, int> parent;
            std::queue<int> q;
            q.push(src.id);
            parent[src.id] = src.id;
            while (!q.empty()) {
                const int u = q.front();
                q.pop();
                for (int v : adj[u])
                    if (!parent.count(v)) {
                        parent[v] = u;
                        q.push(v);
                    }
            }
            for (const auto& dst : sc_.nodes) {
                if (dst.id == src.id || !parent.count(dst.id))
                    continue;
                int hop = dst.id;
                while (parent[hop] != src.id)
                    hop = parent[hop];
                next_hop_[{src.id, dst.id}] = hop;
            }
        }
    }

    // ------------------------------------------------------------- positions

    Position pos_of(int node_id, SimTime t) const {
        return position_at(nodes_[static_cast<std::size_t>(node_index_.at(node_id))].path, t);
    }

    double rx_power_dbm(int from, int to, SimTime t) const {
        const double d = std::max(0.1, distance_m(pos_of(from, t), pos_of(to, t)));
        return phy::two_ray_rx_power_dbm(sc_.radio, sc_.radio, d);
    }

    // ------------------------------------------------------------- trace

    void trace(TraceEvent ev) {
        ev.t = kernel_.now();
        if (sink_)
            sink_->record(ev);
        if (trace_sample_.size() < kTraceSampleRows) {
            const bool control_frame = (ev.type == TraceEvent::Type::TxStart ||
                                        ev.type == TraceEvent::Type::RxOutcome) &&
                                       ev.frame_kind != mac::Mpdu::Kind::Data;
            std::string row = std::to_string(ev.t.ticks) + "," + std::to_string(ev.node) +
                              "," + trace_type_name(ev.type) + "," + std::to_string(ev.peer) +
                              "," + mac::mpdu_kind_name(ev.frame_kind) + "/" +
                              (control_frame ? "-" : net::packet_kind_name(ev.pkt_kind)) +
                              "/" + std::to_string(ev.a) + "/" + std::to_string(ev.b);
            trace_sample_.push_back(std::move(row));
        }
    }

    // ------------------------------------------------------------- sensing

    NodeRt& rt(int node_id) { return nodes_[static_cast<std::size_t>(node_index_.at(node_id))]; }

    bool busy_for(const NodeRt& n) const {
        return n.others_active > 0 || n.own_tx > 0 || kernel_.now() < n.nav_until;
    }

    void update_busy(int node_id) {
        NodeRt& n = rt(node_id);
        const bool busy = busy_for(n);
        if (busy == n.last_busy)
            return;
        n.last_busy = busy;
        feed_mac(node_id, busy ? mac::DcfInput::medium_busy() : mac::DcfInput::medium_idle());
    }

    void set_nav(int node_id, SimTime until) {
        NodeRt& n = rt(node_id);
        if (until <= n.nav_until)
            return;
        n.nav_until = until;
        update_busy(node_id);
        kernel_.cancel(n.nav_timer);
        n.nav_timer = kernel_.schedule(until, [this, node_id] { update_busy(node_id); },
                                       "nav_expiry");
    }

    // ------------------------------------------------------------- MAC layer

    void feed_mac(int node_id, const mac::DcfInput& input) {
        NodeRt& n = rt(node_id);
        auto [next, actions] = mac::dcf_step(std::move(n.mac), input, kernel_.now(),
                                             sc_.mac_params, rng_);
        n.mac = std::move(next);
        for (const auto& act : actions)
            apply_mac_action(node_id, act);
    }

    void apply_mac_action(int node_id, const mac::DcfAction& act) {
        NodeRt& n = rt(node_id);
        using K = mac::DcfAction::Kind;
        using T = mac::DcfAction::Timer;
        switch (act.kind) {
        case K::StartTimer:
            if (act.timer == T::Difs) {
                n.difs_timer = kernel_.schedule_in(
                    act.duration, [this, node_id] { feed_mac(node_id, mac::DcfInput::difs_expired()); },
                    "difs");
            } else if (act.timer == T::Backoff) {
                n.backoff_timer = kernel_.schedule_in(
                    act.duration,
                    [this, node_id] { feed_mac(node_id, mac::DcfInput::backoff_expired()); },
                    "backoff");
            } else if (act.timer == T::AckTimeout) {
                if (suppress_ack_timer_) {
                    suppress_ack_timer_ = false;
                } else {
                    n.ack_timer = kernel_.schedule_in(
                        act.duration,
                        [this, node_id] { feed_mac(node_id, mac::DcfInput::ack_timeout()); },
                        "ack_timeout");
                }
            }
            break;
        case K::CancelTimer:
            if (act.timer == T::Difs)
                kernel_.cancel(n.difs_timer);
            else if (act.timer == T::Backoff)
                kernel_.cancel(n.backoff_timer);
            else if (act.timer == T::AckTimeout)
                kernel_.cancel(n.ack_timer);
            break;
        case K::FreezeBackoff:
            kernel_.cancel(n.backoff_timer);
            break;
        case K::TransmitPpdu:
            if (sc_.mac_params.rts_cts && act.frame.kind == mac::Mpdu::Kind::Data)
                begin_rts_exchange(node_id, act.frame);
            else
                start_tx(node_id, act.frame, /*dcf_managed=*/true);
            break;
        case K::DropFrame: {
            const SimTime enq = pop_enqueue_time(n);
            trace({{}, TraceEvent::Type::MacDrop, node_id, act.frame.dst, act.frame.kind,
                   packet_kind_of(act.frame), phy::Reception::Delivered, n.channel,
                   enq.ticks, kernel_.now().ticks});
            ++mac_drops_;
            if (act.frame.packet_ref >= 0)
                on_first_hop_resolved(act.frame.packet_ref, node_id, false);
            if (act.frame.packet_ref >= 0)
                resolve_lost(act.frame.packet_ref, net::LossReason::MacRetryExhausted);
            break;
        }
        case K::DeliverSuccess: {
            const SimTime enq = pop_enqueue_time(n);
            trace({{}, TraceEvent::Type::MacServiceDone, node_id, act.frame.dst,
                   act.frame.kind, packet_kind_of(act.frame), phy::Reception::Delivered,
                   n.channel, enq.ticks, kernel_.now().ticks});
            if (act.frame.packet_ref >= 0)
                on_first_hop_resolved(act.frame.packet_ref, node_id, true);
            break;
        }
        }
    }

    SimTime pop_enqueue_time(NodeRt& n) {
        if (n.enqueue_times.empty())
            return kernel_.now();
        const SimTime t = n.enqueue_times.front();
        n.enqueue_times.pop_front();
        return t;
    }

    net::PacketKind packet_kind_of(const mac::Mpdu& f) const {
        if (f.packet_ref >= 0)
            return inflight_[static_cast<std::size_t>(f.packet_ref)].pkt.kind;
        return net::PacketKind::Cbr;
    }

    void mac_enqueue(int node_id, int hop, std::int64_t pkt_id) {
        mac::Mpdu f;
        f.kind = mac::Mpdu::Kind::Data;
        f.src = node_id;
        f.dst = hop;
        f.body_bytes = inflight_[static_cast<std::size_t>(pkt_id)].pkt.wire_bytes();
        f.packet_ref = pkt_id;
        rt(node_id).enqueue_times.push_back(kernel_.now());
        feed_mac(node_id, mac::DcfInput::enqueue(f));
    }

    // --------------------------------------------------------- transmissions

    void start_tx(int node_id, const mac::Mpdu& frame, bool dcf_managed,
                  SimTime nav_duration = {}) {
        NodeRt& n = rt(node_id);
        if (n.channel < 0)
            throw MisuseError("start_tx: node " + std::to_string(node_id) + " has no radio");
        Channel& ch = channels_[static_cast<std::size_t>(n.channel)];

        ActiveTx tx;
        tx.id = next_tx_id_++;
        tx.tx_node = node_id;
        tx.mpdu = frame;
        tx.mode = frame.kind == mac::Mpdu::Kind::Data ? data_mode_ : ctrl_mode_;
        tx.start = kernel_.now();
        tx.end = tx.start + frame.airtime(sc_.mac_params, tx.mode);
        tx.dcf_managed = dcf_managed;
        tx.nav_duration = nav_duration;
        tx.channel = n.channel;

        // no capture: temporal overlap on a compatible channel kills both
        for (auto& other : ch.active) {
            other.overlapped = true;
            tx.overlapped = true;
        }
        if (tx.overlapped)
            ++collisions_;

        trace({{}, TraceEvent::Type::TxStart, node_id, frame.dst, frame.kind,
               packet_kind_of(frame), phy::Reception::Delivered, n.channel,
               frame.total_bytes(sc_.mac_params), tx.end.ticks});

        ch.active.push_back(tx);
        n.own_tx++;
        update_busy(node_id);

        // carrier-sense wavefront reaches the others one microsecond later
        for (int member : ch.members) {
            if (member == node_id)
                continue;
            kernel_.schedule_in(kCarrierSenseDelay,
                                [this, member] {
                                    rt(member).others_active++;
                                    update_busy(member);
                                },
                                "cs_busy");
        }

        kernel_.schedule(tx.end, [this, chan = n.channel, id = tx.id] { on_tx_end(chan, id); },
                         "tx_end");
    }

    void on_tx_end(int chan, std::int64_t tx_id) {
        Channel& ch = channels_[static_cast<std::size_t>(chan)];
        auto it = std::find_if(ch.active.begin(), ch.active.end(),
                               [&](const ActiveTx& t) { return t.id == tx_id; });
        if (it == ch.active.end())
            throw MisuseError("on_tx_end: unknown transmission");
        const ActiveTx tx = *it;
        ch.active.erase(it);

        NodeRt& sender = rt(tx.tx_node);
        sender.own_tx--;

        // receptions happen at the instant the frame ends
        deliver_frame(ch, tx);

        // the DCF machine owns acknowledged data frames
        if (tx.dcf_managed)
            feed_mac(tx.tx_node, mac::DcfInput::tx_done());

        update_busy(tx.tx_node);
        for (int member : ch.members) {
            if (member == tx.tx_node)
                continue;
            kernel_.schedule_in(kCarrierSenseDelay,
                                [this, member] {
                                    rt(member).others_active--;
                                    update_busy(member);
                                },
                                "cs_idle");
        }
    }

    void deliver_frame(Channel& ch, const ActiveTx& tx) {
        if (tx.mpdu.dst < 0 || tx.mpdu.kind == mac::Mpdu::Kind::Beacon) {
            // broadcast: every compatible listener sees it; nothing to ack
            for (int member : ch.members) {
                if (member == tx.tx_node)
                    continue;
                const auto outcome = outcome_for(tx, member);
                trace({{}, TraceEvent::Type::RxOutcome, member, tx.tx_node, tx.mpdu.kind,
                       packet_kind_of(tx.mpdu), outcome, tx.channel, 0, 0});
            }
            return;
        }

        const int dst = tx.mpdu.dst;
        const NodeRt& dst_rt = rt(dst);
        const bool compatible =
            dst_rt.channel == tx.channel &&
            phy::channels_compatible(ch.listenable, ch.listening);
        if (!compatible)
            return; // addressed off-channel; nobody hears it

        phy::Reception outcome = outcome_for(tx, dst);
        if (dst_rt.own_tx > 0)
            outcome = phy::Reception::LostCollision; // half-duplex radio
        trace({{}, TraceEvent::Type::RxOutcome, dst, tx.tx_node, tx.mpdu.kind,
               packet_kind_of(tx.mpdu), outcome, tx.channel, tx.mpdu.packet_ref, 0});

        // NAV distribution for the virtual carrier sense option
        if (sc_.mac_params.rts_cts &&
            (tx.mpdu.kind == mac::Mpdu::Kind::Rts || tx.mpdu.kind == mac::Mpdu::Kind::Cts)) {
            for (int member : ch.members) {
                if (member == tx.tx_node || member == dst)
                    continue;
                if (outcome_for(tx, member) == phy::Reception::Delivered)
                    set_nav(member, kernel_.now() + tx.nav_duration);
            }
        }

        if (outcome != phy::Reception::Delivered) {
            // Acknowledged data will be retried by the sender's MAC. Anything
            // unacknowledged is gone for good.
            if (!tx.dcf_managed && tx.mpdu.packet_ref >= 0)
                resolve_lost(tx.mpdu.packet_ref,
                             outcome == phy::Reception::LostCollision
                                 ? net::LossReason::Collision
                                 : net::LossReason::SnrBelowThreshold);
            return;
        }

        switch (tx.mpdu.kind) {
        case mac::Mpdu::Kind::Data:
            if (tx.dcf_managed) {
                // SIFS-spaced acknowledgment, outside the receiver's DCF queue
                mac::Mpdu ack;
                ack.kind = mac::Mpdu::Kind::Ack;
                ack.src = dst;
                ack.dst = tx.tx_node;
                kernel_.schedule_in(sc_.mac_params.sifs,
                                    [this, dst, ack] { start_tx(dst, ack, false); }, "ack_tx");
            }
            if (tx.mpdu.packet_ref >= 0)
                on_packet_at_node(dst, tx.mpdu.packet_ref);
            break;
        case mac::Mpdu::Kind::Ack:
            kernel_.cancel(rt(dst).ack_timer);
            feed_mac(dst, mac::DcfInput::ack_received());
            break;
        case mac::Mpdu::Kind::Poll:
            pcf_station_polled(dst);
            break;
        case mac::Mpdu::Kind::Null:
            break; // poll response with nothing to say
        case mac::Mpdu::Kind::Rts: {
            mac::Mpdu cts;
            cts.kind = mac::Mpdu::Kind::Cts;
            cts.src = dst;
            cts.dst = tx.tx_node;
            const SimTime remaining =
                tx.nav_duration - sc_.mac_params.sifs -
                phy::ppdu_duration(sc_.mac_params.cts_bytes, ctrl_mode_);
            kernel_.schedule_in(sc_.mac_params.sifs,
                                [this, dst, cts, remaining] {
                                    start_tx(dst, cts, false, remaining);
                                },
                                "cts_tx");
            break;
        }
        case mac::Mpdu::Kind::Cts: {
            NodeRt& n = rt(dst);
            kernel_.cancel(n.cts_timer);
            if (n.awaiting_cts) {
                const mac::Mpdu data = *n.awaiting_cts;
                n.awaiting_cts.reset();
                kernel_.schedule_in(sc_.mac_params.sifs,
                                    [this, dst, data] { start_tx(dst, data, true); },
                                    "data_after_cts");
            }
            break;
        }
        case mac::Mpdu::Kind::Beacon:
            break;
        }
    }

    phy::Reception outcome_for(const ActiveTx& tx, int receiver) const {
        const double rx = rx_power_dbm(tx.tx_node, receiver, kernel_.now());
        return phy::reception_outcome(rx, tx.mode, tx.overlapped, sc_.radio.noise_floor_dbm);
    }

    // RTS/CTS virtual carrier sense around a data frame (optional mode).
    void begin_rts_exchange(int node_id, const mac::Mpdu& data) {
        NodeRt& n = rt(node_id);
        n.awaiting_cts = data;
        const SimTime t_cts = phy::ppdu_duration(sc_.mac_params.cts_bytes, ctrl_mode_);
        const SimTime t_data = data.airtime(sc_.mac_params, data_mode_);
        const SimTime t_ack = phy::ppdu_duration(sc_.mac_params.ack_bytes, ctrl_mode_);
        const SimTime s = sc_.mac_params.sifs;
        // NAV covers CTS + DATA + ACK and the SIFS gaps between them
        const SimTime nav = s + t_cts + s + t_data + s + t_ack;

        mac::Mpdu rts;
        rts.kind = mac::Mpdu::Kind::Rts;
        rts.src = node_id;
        rts.dst = data.dst;
        start_tx(node_id, rts, false, nav);

        const SimTime t_rts = phy::ppdu_duration(sc_.mac_params.rts_bytes, ctrl_mode_);
        n.cts_timer = kernel_.schedule_in(
            t_rts + s + t_cts + sc_.mac_params.slot_time,
            [this, node_id] {
                NodeRt& me = rt(node_id);
                me.awaiting_cts.reset();
                // let the machine run its ordinary retry path
                suppress_ack_timer_ = true;
                feed_mac(node_id, mac::DcfInput::tx_done());
                kernel_.cancel(me.ack_timer);
                feed_mac(node_id, mac::DcfInput::ack_timeout());
            },
            "cts_timeout");
    }

    // ------------------------------------------------------------- wired hops

    void wire_send(int from, int to, std::int64_t pkt_id) {
        const std::int64_t bytes = inflight_[static_cast<std::size_t>(pkt_id)].pkt.wire_bytes();
        const SimTime serialization =
            SimTime{(bytes * 8 * 1000000 + sc_.backbone.capacity_bps - 1) /
                    sc_.backbone.capacity_bps};
        SimTime& busy_until = wire_busy_[{from, to}];
        const SimTime depart = std::max(kernel_.now(), busy_until);
        busy_until = depart + serialization;
        const SimTime arrive = depart + serialization + sc_.backbone.latency;
        kernel_.schedule(arrive, [this, to, pkt_id] { on_packet_at_node(to, pkt_id); },
                         "wire_delivery");
    }

    // ------------------------------------------------------------ forwarding

    bool wireless_neighbors(int a, int b) const {
        const NodeRt& na = nodes_[static_cast<std::size_t>(node_index_.at(a))];
        const NodeRt& nb = nodes_[static_cast<std::size_t>(node_index_.at(b))];
        return na.channel >= 0 && na.channel == nb.channel;
    }

    void on_packet_at_node(int node_id, std::int64_t pkt_id) {
        InFlight& f = inflight_[static_cast<std::size_t>(pkt_id)];
        if (node_id == f.pkt.dst_node) {
            deliver_to_endpoint(node_id, pkt_id);
            return;
        }
        auto it = next_hop_.find({node_id, f.pkt.dst_node});
        if (it == next_hop_.end())
            throw ConfigError("no route from node " + std::to_string(node_id) + " to " +
                              std::to_string(f.pkt.dst_node));
        const int hop = it->second;
        if (wireless_neighbors(node_id, hop)) {
            NodeRt& n = rt(node_id);
            if (sc_.pcf.enabled && is_polled_station(node_id)) {
                n.pcf_uplink.push_back(pkt_id); // served on the next poll
                return;
            }
            mac_enqueue(node_id, hop, pkt_id);
        } else {
            wire_send(node_id, hop, pkt_id);
        }
    }

    // FTP paces on the first hop: the segment either cleared the source MAC
    // or it did not. Field copies up front: emitting the next segment grows
    // inflight_ and would invalidate a reference into it.
    void on_first_hop_resolved(std::int64_t pkt_id, int at_node, bool delivered) {
        const net::PacketKind kind = inflight_[static_cast<std::size_t>(pkt_id)].pkt.kind;
        const int src_node = inflight_[static_cast<std::size_t>(pkt_id)].pkt.src_node;
        const int flow_id = inflight_[static_cast<std::size_t>(pkt_id)].pkt.flow_id;
        if (kind != net::PacketKind::Ftp || at_node != src_node)
            return;
        for (auto& bg : bg_flows_) {
            if (bg.flow_id != flow_id)
                continue;
            bg.ftp.on_first_hop_resolved(delivered);
            if (!bg.stopped && !bg.ftp.done())
                emit_ftp_segment(bg);
        }
    }

    // ------------------------------------------------------------- packets

    std::int64_t make_inflight(const net::Packet& pkt) {
        InFlight f;
        f.pkt = pkt;
        f.rec.flow_id = pkt.flow_id;
        f.rec.reverse = pkt.reverse;
        f.rec.seq_no = pkt.seq_no;
        f.rec.sent_at = pkt.created_at;
        f.rec.wire_bytes = pkt.wire_bytes();
        f.rec.payload_bytes = pkt.payload_bytes;
        f.rec.kind = pkt.kind;
        inflight_.push_back(std::move(f));
        return static_cast<std::int64_t>(inflight_.size()) - 1;
    }

    void resolve_lost(std::int64_t pkt_id, net::LossReason reason) {
        InFlight& f = inflight_[static_cast<std::size_t>(pkt_id)];
        if (f.rec.resolved())
            return;
        net::udp_delivery_contract(f.rec, {}, false, reason);
        trace({{}, TraceEvent::Type::PacketLost, f.pkt.dst_node, f.pkt.src_node,
               mac::Mpdu::Kind::Data, f.pkt.kind, phy::Reception::LostSnr, -1,
               f.pkt.flow_id, static_cast<std::int64_t>(f.pkt.seq_no)});
        account_loss(f);
        if (f.has_sig)
            on_sig_resolved(pkt_id, false);
    }

    void resolve_delivered(std::int64_t pkt_id) {
        InFlight& f = inflight_[static_cast<std::size_t>(pkt_id)];
        if (f.rec.resolved())
            return;
        net::udp_delivery_contract(f.rec, kernel_.now(), true, net::LossReason::None);
    }

    void account_loss(const InFlight& f) {
        switch (f.pkt.kind) {
        case net::PacketKind::RtpMedia:
            for (auto& vf : voip_flows_)
                if (vf.flow_id == f.pkt.flow_id)
                    (f.pkt.reverse ? vf.media_rev : vf.media_fwd).on_lost(f.rec.wire_bytes);
            break;
        case net::PacketKind::Signaling:
            for (auto& vf : voip_flows_)
                if (vf.flow_id == f.pkt.flow_id)
                    vf.sig.on_lost(f.rec.wire_bytes);
            break;
        default:
            for (auto& bg : bg_flows_)
                if (bg.flow_id == f.pkt.flow_id)
                    bg.metrics.on_lost(f.rec.wire_bytes);
            break;
        }
    }

    void note_delivered_bits(std::int64_t payload_bits) {
        const std::size_t bin =
            static_cast<std::size_t>(kernel_.now().ticks / 1000000);
        if (bin >= throughput_bins_.size())
            throughput_bins_.resize(bin + 1, 0);
        throughput_bins_[bin] += payload_bits;
    }

    void deliver_to_endpoint(int node_id, std::int64_t pkt_id) {
        InFlight& f = inflight_[static_cast<std::size_t>(pkt_id)];
        const SimTime delay = kernel_.now() - f.pkt.created_at;
        // A data frame whose ACK got lost is retried by the MAC and arrives
        // here twice; only the first copy counts.
        if (f.rec.resolved() && f.pkt.kind != net::PacketKind::Signaling)
            return;
        switch (f.pkt.kind) {
        case net::PacketKind::RtpMedia: {
            resolve_delivered(pkt_id);
            for (auto& vf : voip_flows_) {
                if (vf.flow_id != f.pkt.flow_id)
                    continue;
                auto& m = f.pkt.reverse ? vf.media_rev : vf.media_fwd;
                m.on_delivered(f.rec.wire_bytes, f.rec.payload_bytes, delay);
                auto& jb = f.pkt.reverse ? vf.jb_rev : vf.jb_fwd;
                jb.offer(f.pkt.seq_no, kernel_.now());
                if (!vf.media_epoch_set) {
                    vf.media_epoch = f.pkt.created_at;
                    vf.media_epoch_set = true;
                }
                vf.media_deliveries.emplace_back((f.pkt.created_at - vf.media_epoch).ticks,
                                                 f.rec.payload_bytes * 8);
            }
            note_delivered_bits(f.rec.payload_bytes * 8);
            trace({{}, TraceEvent::Type::PacketDelivered, node_id, f.pkt.src_node,
                   mac::Mpdu::Kind::Data, f.pkt.kind, phy::Reception::Delivered, -1,
                   f.pkt.flow_id, static_cast<std::int64_t>(f.pkt.seq_no)});
            break;
        }
        case net::PacketKind::Signaling:
            handle_signaling_delivery(node_id, pkt_id);
            break;
        case net::PacketKind::Ftp:
        case net::PacketKind::Cbr: {
            resolve_delivered(pkt_id);
            for (auto& bg : bg_flows_)
                if (bg.flow_id == f.pkt.flow_id)
                    bg.metrics.on_delivered(f.rec.wire_bytes, f.rec.payload_bytes, delay);
            note_delivered_bits(f.rec.payload_bytes * 8);
            trace({{}, TraceEvent::Type::PacketDelivered, node_id, f.pkt.src_node,
                   mac::Mpdu::Kind::Data, f.pkt.kind, phy::Reception::Delivered, -1,
                   f.pkt.flow_id, static_cast<std::int64_t>(f.pkt.seq_no)});
            break;
        }
        }
    }

    // ------------------------------------------------------------- signaling

    VoipFlow& flow(int idx) { return voip_flows_[static_cast<std::size_t>(idx)]; }

    int endpoint_node(const VoipFlow& vf, voip::Role role) const {
        return role == voip::Role::Initiator ? vf.spec.src : vf.spec.dst;
    }

    voip::CallState& endpoint_state(VoipFlow& vf, voip::Role role) {
        return role == voip::Role::Initiator ? vf.init : vf.recv;
    }

    RetxState& endpoint_retx(VoipFlow& vf, voip::Role role) {
        return role == voip::Role::Initiator ? vf.retx_init : vf.retx_recv;
    }

    void send_sip(int flow_idx, voip::Role from, const voip::SipMessage& m, bool is_retx) {
        VoipFlow& vf = flow(flow_idx);
        voip::note_sent(endpoint_state(vf, from), m.size_bytes);
        SigMeta meta;
        meta.proto = voip::Protocol::Sip;
        meta.flow = flow_idx;
        meta.from_role = from;
        meta.sip_method = m.method;
        meta.size_bytes = m.size_bytes;
        meta.absorb_at_proxy = m.method == voip::SipMethod::Register;
        meta.final_dst = meta.absorb_at_proxy
                             ? sc_.signaling.proxy_node
                             : endpoint_node(vf, from == voip::Role::Initiator
                                                     ? voip::Role::Receiver
                                                     : voip::Role::Initiator);
        dispatch_signaling(endpoint_node(vf, from), sc_.signaling.proxy_node, meta);
        if (!is_retx)
            arm_retx_if_needed(flow_idx, from, m);
        trace({{}, TraceEvent::Type::SigSent, endpoint_node(vf, from), meta.final_dst,
               mac::Mpdu::Kind::Data, net::PacketKind::Signaling, phy::Reception::Delivered,
               -1, static_cast<int>(m.method), m.size_bytes});
    }

    void send_h323(int flow_idx, voip::Role from, const voip::H323Message& m, bool is_retx) {
        VoipFlow& vf = flow(flow_idx);
        voip::note_sent(endpoint_state(vf, from), m.size_bytes);
        SigMeta meta;
        meta.proto = voip::Protocol::H323;
        meta.flow = flow_idx;
        meta.from_role = from;
        meta.h323_kind = m.kind;
        meta.size_bytes = m.size_bytes;
        meta.absorb_at_proxy = m.to_gatekeeper;
        meta.final_dst = meta.absorb_at_proxy
                             ? sc_.signaling.proxy_node
                             : endpoint_node(vf, from == voip::Role::Initiator
                                                     ? voip::Role::Receiver
                                                     : voip::Role::Initiator);
        dispatch_signaling(endpoint_node(vf, from), sc_.signaling.proxy_node, meta);
        if (!is_retx)
            arm_retx_if_needed(flow_idx, from, m);
        trace({{}, TraceEvent::Type::SigSent, endpoint_node(vf, from), meta.final_dst,
               mac::Mpdu::Kind::Data, net::PacketKind::Signaling, phy::Reception::Delivered,
               -1, static_cast<int>(m.kind), m.size_bytes});
    }

    // All signaling transits the proxy/gatekeeper node (its two roles in one).
    void dispatch_signaling(int src_node, int via_node, const SigMeta& meta) {
        net::Packet pkt;
        pkt.kind = net::PacketKind::Signaling;
        pkt.payload_bytes = meta.size_bytes;
        pkt.seq_no = sig_seq_++;
        pkt.created_at = kernel_.now();
        pkt.flow_id = flow(meta.flow).flow_id;
        pkt.reverse = meta.from_role == voip::Role::Receiver;
        pkt.src_node = src_node;
        pkt.dst_node = src_node == via_node ? meta.final_dst : via_node;
        const std::int64_t id = make_inflight(pkt);
        inflight_[static_cast<std::size_t>(id)].has_sig = true;
        inflight_[static_cast<std::size_t>(id)].sig = meta;
        flow(meta.flow).sig.on_sent(pkt.wire_bytes());
        on_packet_at_node(src_node, id);
    }

    void handle_signaling_delivery(int node_id, std::int64_t pkt_id) {
        InFlight& f = inflight_[static_cast<std::size_t>(pkt_id)];
        const SigMeta meta = f.sig;

        if (node_id == sc_.signaling.proxy_node && meta.final_dst != node_id &&
            f.pkt.dst_node == node_id) {
            // An INVITE only goes forward when the callee's contact is on
            // file; anything else the registrar cannot route is dropped (the
            // caller's retransmit timer covers the retry).
            if (meta.proto == voip::Protocol::Sip &&
                meta.sip_method == voip::SipMethod::Invite &&
                !flow(meta.flow).recv_registered) {
                resolve_lost(pkt_id, net::LossReason::DroppedAtProxy);
                return;
            }
            // transit leg: forward toward the destination after the
            // processing delay; same logical message, same delivery record
            kernel_.schedule_in(sc_.signaling.policy.proxy_forward_delay,
                                [this, pkt_id] {
                                    InFlight& g = inflight_[static_cast<std::size_t>(pkt_id)];
                                    g.pkt.src_node = sc_.signaling.proxy_node;
                                    g.pkt.dst_node = g.sig.final_dst;
                                    on_packet_at_node(sc_.signaling.proxy_node, pkt_id);
                                },
                                "proxy_forward");
            return;
        }

        VoipFlow& vf = flow(meta.flow);
        if (!f.rec.resolved()) { // duplicates still reach the machine below
            resolve_delivered(pkt_id);
            vf.sig.on_delivered(f.rec.wire_bytes, f.rec.payload_bytes,
                                kernel_.now() - f.rec.sent_at);
        }
        trace({{}, TraceEvent::Type::SigDelivered, node_id, f.pkt.src_node,
               mac::Mpdu::Kind::Data, net::PacketKind::Signaling, phy::Reception::Delivered,
               -1,
               meta.proto == voip::Protocol::Sip ? static_cast<int>(meta.sip_method)
                                                 : static_cast<int>(meta.h323_kind),
               meta.size_bytes});

        if (meta.absorb_at_proxy) {
            // registrar / gatekeeper functions of node 10
            if (meta.proto == voip::Protocol::Sip) {
                if (meta.from_role == voip::Role::Initiator)
                    vf.init_registered = true;
                else
                    vf.recv_registered = true;
            } else if (meta.h323_kind == voip::H323MsgKind::RasArq) {
                if (auto acf = voip::gatekeeper_step(
                        voip::H323Message{meta.h323_kind, meta.size_bytes, meta.from_role, true},
                        sc_.signaling.sizes)) {
                    kernel_.schedule_in(
                        sc_.signaling.policy.proxy_forward_delay,
                        [this, fi = meta.flow, role = meta.from_role, acf = *acf] {
                            SigMeta reply;
                            reply.proto = voip::Protocol::H323;
                            reply.flow = fi;
                            reply.from_role = role; // same side's stream
                            reply.from_gk = true;
                            reply.h323_kind = acf.kind;
                            reply.size_bytes = acf.size_bytes;
                            reply.absorb_at_proxy = false;
                            reply.final_dst = endpoint_node(flow(fi), role);
                            dispatch_signaling(sc_.signaling.proxy_node,
                                               sc_.signaling.proxy_node, reply);
                        },
                        "gk_acf");
                }
            }
            on_sig_resolved(pkt_id, true);
            return;
        }

        // deliver into the endpoint's call machine
        const voip::Role to_role =
            meta.from_gk ? meta.from_role
                         : (meta.from_role == voip::Role::Initiator ? voip::Role::Receiver
                                                                    : voip::Role::Initiator);
        voip::CallState& st = endpoint_state(vf, to_role);
        voip::note_received(st, meta.size_bytes);
        const std::uint64_t strays_before = st.stray_dropped;
        if (meta.proto == voip::Protocol::Sip) {
            feed_sip(meta.flow, to_role,
                     voip::SipInput::message(
                         voip::SipMessage{meta.sip_method, meta.size_bytes, meta.from_role, true}));
        } else {
            feed_h323(meta.flow, to_role,
                      voip::H323Input::message(voip::H323Message{
                          meta.h323_kind, meta.size_bytes, meta.from_role, false}));
        }
        if (endpoint_state(vf, to_role).stray_dropped == strays_before)
            cancel_retx(meta.flow, to_role); // the flow advanced
        on_sig_resolved(pkt_id, true);
    }

    // Transport-level fate of a sent signaling message: paces the H.323
    // same-direction sequences.
    void on_sig_resolved(std::int64_t pkt_id, bool /*delivered*/) {
        InFlight& f = inflight_[static_cast<std::size_t>(pkt_id)];
        if (!f.has_sig || f.sig.proto != voip::Protocol::H323 || f.sig.from_gk)
            return;
        feed_h323(f.sig.flow, f.sig.from_role, voip::H323Input::send_resolved(f.sig.h323_kind));
    }

    void feed_sip(int flow_idx, voip::Role role, const voip::SipInput& in) {
        VoipFlow& vf = flow(flow_idx);
        voip::CallState& st = endpoint_state(vf, role);
        auto [next, out] = voip::sip_step(st, in, kernel_.now(), sc_.signaling.sizes);
        st = std::move(next);
        for (const auto& m : out)
            send_sip(flow_idx, role, m, false);
        maybe_start_media(flow_idx);
    }

    void feed_h323(int flow_idx, voip::Role role, const voip::H323Input& in) {
        VoipFlow& vf = flow(flow_idx);
        voip::CallState& st = endpoint_state(vf, role);
        auto [next, out] = voip::h323_step(st, in, kernel_.now(), sc_.signaling.sizes,
                                           sc_.signaling.h323_flow);
        st = std::move(next);
        for (const auto& m : out)
            send_h323(flow_idx, role, m, false);
        maybe_start_media(flow_idx);
    }

    static bool sip_needs_reply(voip::SipMethod m) {
        return m == voip::SipMethod::Invite || m == voip::SipMethod::Ok200;
    }

    static bool h323_needs_reply(voip::H323MsgKind k) {
        switch (k) {
        case voip::H323MsgKind::RasArq:
        case voip::H323MsgKind::Setup:
        case voip::H323MsgKind::Connect:
        case voip::H323MsgKind::CapsExchange:
        case voip::H323MsgKind::OpenLogicalChannel:
            return true;
        default:
            return false;
        }
    }

    void arm_retx_if_needed(int flow_idx, voip::Role role, const voip::SipMessage& m) {
        if (!sip_needs_reply(m.method))
            return;
        RetxState& rx = endpoint_retx(flow(flow_idx), role);
        kernel_.cancel(rx.timer);
        rx.armed = true;
        rx.is_sip = true;
        rx.sip = m;
        rx.tries = 0;
        rx.delay = sc_.signaling.policy.retransmit_initial;
        schedule_retx(flow_idx, role);
    }

    void arm_retx_if_needed(int flow_idx, voip::Role role, const voip::H323Message& m) {
        if (!h323_needs_reply(m.kind))
            return;
        RetxState& rx = endpoint_retx(flow(flow_idx), role);
        kernel_.cancel(rx.timer);
        rx.armed = true;
        rx.is_sip = false;
        rx.h323 = m;
        rx.tries = 0;
        rx.delay = sc_.signaling.policy.retransmit_initial;
        schedule_retx(flow_idx, role);
    }

    void schedule_retx(int flow_idx, voip::Role role) {
        RetxState& rx = endpoint_retx(flow(flow_idx), role);
        rx.timer = kernel_.schedule_in(
            rx.delay, [this, flow_idx, role] { fire_retx(flow_idx, role); }, "sig_retx");
    }

    void fire_retx(int flow_idx, voip::Role role) {
        VoipFlow& vf = flow(flow_idx);
        RetxState& rx = endpoint_retx(vf, role);
        if (!rx.armed)
            return;
        if (rx.tries >= sc_.signaling.policy.retransmit_max) {
            rx.armed = false;
            endpoint_state(vf, role).setup_failed =
                !endpoint_state(vf, role).established();
            return;
        }
        ++rx.tries;
        ++sig_retransmits_;
        rx.delay = SimTime{rx.delay.ticks * sc_.signaling.policy.retransmit_backoff};
        if (rx.is_sip)
            send_sip(flow_idx, role, rx.sip, true);
        else
            send_h323(flow_idx, role, rx.h323, true);
        schedule_retx(flow_idx, role);
    }

    void cancel_retx(int flow_idx, voip::Role role) {
        RetxState& rx = endpoint_retx(flow(flow_idx), role);
        rx.armed = false;
        kernel_.cancel(rx.timer);
    }

    // ------------------------------------------------------------- media

    void maybe_start_media(int flow_idx) {
        VoipFlow& vf = flow(flow_idx);
        if (!vf.spec.two_way && !vf.fwd_started && vf.init.established()) {
            vf.fwd_started = true;
            schedule_media_tick(flow_idx, false, kernel_.now());
        }
        if (vf.spec.two_way) {
            if (!vf.fwd_started && vf.init.established()) {
                vf.fwd_started = true;
                schedule_media_tick(flow_idx, false, kernel_.now());
            }
            if (!vf.rev_started && vf.recv.established()) {
                vf.rev_started = true;
                schedule_media_tick(flow_idx, true, kernel_.now());
            }
        }
    }

    void schedule_media_tick(int flow_idx, bool reverse, SimTime at) {
        kernel_.schedule(at, [this, flow_idx, reverse] { media_tick(flow_idx, reverse); },
                         "rtp_tick");
    }

    void media_tick(int flow_idx, bool reverse) {
        VoipFlow& vf = flow(flow_idx);
        const SimTime stop = std::min(vf.spec.stop, sc_.duration);
        if (kernel_.now() >= stop)
            return;
        auto& src = reverse ? vf.src_rev : vf.src_fwd;
        auto [pkt, next_at] = src.tick(kernel_.now());
        auto& m = reverse ? vf.media_rev : vf.media_fwd;
        m.on_sent(pkt.wire_bytes());
        const std::int64_t id = make_inflight(pkt);
        on_packet_at_node(pkt.src_node, id);
        if (next_at < stop)
            schedule_media_tick(flow_idx, reverse, next_at);
    }

    // ------------------------------------------------------------- PCF

    bool is_polled_station(int node_id) const {
        return std::find(sc_.pcf.polled.begin(), sc_.pcf.polled.end(), node_id) !=
               sc_.pcf.polled.end();
    }

    void schedule_superframes() {
        for (SimTime t{}; t <= sc_.duration; t += sc_.pcf.superframe)
            kernel_.schedule(t, [this] { begin_cfp(); }, "superframe");
    }

    void begin_cfp() {
        cfp_end_ = kernel_.now() + sc_.pcf.cfp;
        mac::Mpdu beacon;
        beacon.kind = mac::Mpdu::Kind::Beacon;
        beacon.src = sc_.pcf.ap;
        beacon.dst = -1;
        beacon.body_bytes = std::max(0, sc_.pcf.beacon_bytes - 28);
        const SimTime beacon_air = beacon.airtime(sc_.mac_params, ctrl_mode_);
        kernel_.schedule_in(mac::pifs(sc_.mac_params),
                            [this, beacon] { start_tx(sc_.pcf.ap, beacon, false); },
                            "beacon_tx");
        kernel_.schedule_in(mac::pifs(sc_.mac_params) + beacon_air,
                            [this] { pcf_continue(); }, "cfp_polling");
    }

    void pcf_continue() {
        // peek the next station; poll only if the whole exchange fits in the
        // remaining CFP, otherwise stop (the cursor stays for the next CFP)
        const int station = pcf_sched_.polling_list[pcf_sched_.cursor];
        const SimTime s = sc_.mac_params.sifs;
        mac::Mpdu poll;
        poll.kind = mac::Mpdu::Kind::Poll;
        poll.src = sc_.pcf.ap;
        poll.dst = station;
        const SimTime t_poll = poll.airtime(sc_.mac_params, ctrl_mode_);
        const SimTime t_resp = poll_response_airtime(station);
        const SimTime exchange_end = kernel_.now() + s + t_poll + s + t_resp;
        if (exchange_end > cfp_end_)
            return;

        auto [polled, next_sched] = mac::pcf_poll_next(pcf_sched_);
        pcf_sched_ = std::move(next_sched);
        kernel_.schedule_in(s,
                            [this, poll, polled] {
                                trace({{}, TraceEvent::Type::PcfPoll, sc_.pcf.ap, polled,
                                       mac::Mpdu::Kind::Poll, net::PacketKind::Cbr,
                                       phy::Reception::Delivered,
                                       rt(sc_.pcf.ap).channel, 0, 0});
                                start_tx(sc_.pcf.ap, poll, false);
                            },
                            "poll_tx");
        kernel_.schedule(exchange_end, [this] { pcf_continue(); }, "cfp_polling");
    }

    SimTime poll_response_airtime(int station) {
        NodeRt& n = rt(station);
        mac::Mpdu resp;
        if (n.pcf_uplink.empty()) {
            resp.kind = mac::Mpdu::Kind::Null;
            resp.body_bytes = 0;
        } else {
            resp.kind = mac::Mpdu::Kind::Data;
            resp.body_bytes =
                inflight_[static_cast<std::size_t>(n.pcf_uplink.front())].pkt.wire_bytes();
        }
        return resp.airtime(sc_.mac_params,
                            resp.kind == mac::Mpdu::Kind::Data ? data_mode_ : ctrl_mode_);
    }

    void pcf_station_polled(int station) {
        NodeRt& n = rt(station);
        mac::Mpdu resp;
        resp.src = station;
        if (n.pcf_uplink.empty()) {
            resp.kind = mac::Mpdu::Kind::Null;
            resp.dst = sc_.pcf.ap;
        } else {
            const std::int64_t pkt_id = n.pcf_uplink.front();
            n.pcf_uplink.pop_front();
            const InFlight& f = inflight_[static_cast<std::size_t>(pkt_id)];
            resp.kind = mac::Mpdu::Kind::Data;
            resp.dst = next_hop_.at({station, f.pkt.dst_node});
            resp.body_bytes = f.pkt.wire_bytes();
            resp.packet_ref = pkt_id;
        }
        kernel_.schedule_in(sc_.mac_params.sifs,
                            [this, station, resp] { start_tx(station, resp, false); },
                            "poll_response");
    }

    // ------------------------------------------------------------- workload

    void schedule_workload() {
        if (sc_.pcf.enabled)
            schedule_superframes();

        int flow_id = 0;
        for (const auto& app : sc_.apps) {
            if (app.kind == AppSpec::Kind::Voip) {
                VoipFlow vf;
                vf.flow_id = flow_id;
                vf.spec = app;
                vf.init.protocol = sc_.signaling_mode;
                vf.init.role = voip::Role::Initiator;
                vf.recv.protocol = sc_.signaling_mode;
                vf.recv.role = voip::Role::Receiver;
                const auto codec =
                    media::Codec::make(app.codec, app.frame_period, app.frames_per_packet);
                const auto pack = media::codec_packetize(codec);
                vf.src_fwd = media::RtpSource(codec, flow_id, false, app.src, app.dst);
                vf.src_rev = media::RtpSource(codec, flow_id, true, app.dst, app.src);
                vf.jb_fwd = media::JitterBuffer(app.jitter_depth, pack.period);
                vf.jb_rev = media::JitterBuffer(app.jitter_depth, pack.period);
                const int idx = static_cast<int>(voip_flows_.size());
                voip_flows_.push_back(std::move(vf));

                if (sc_.signaling_mode == voip::Protocol::Sip) {
                    SimTime reg_at = app.start - sc_.signaling.registration_lead;
                    if (reg_at.ticks < 0)
                        reg_at = SimTime{};
                    kernel_.schedule(reg_at,
                                     [this, idx] {
                                         feed_sip(idx, voip::Role::Initiator,
                                                  voip::SipInput::agent_start());
                                         feed_sip(idx, voip::Role::Receiver,
                                                  voip::SipInput::agent_start());
                                     },
                                     "sip_register");
                    kernel_.schedule(app.start,
                                     [this, idx] {
                                         feed_sip(idx, voip::Role::Initiator,
                                                  voip::SipInput::start_call());
                                     },
                                     "start_call");
                    kernel_.schedule(std::min(app.stop, sc_.duration),
                                     [this, idx] {
                                         feed_sip(idx, voip::Role::Initiator,
                                                  voip::SipInput::hang_up());
                                     },
                                     "hang_up");
                } else {
                    kernel_.schedule(app.start,
                                     [this, idx] {
                                         feed_h323(idx, voip::Role::Initiator,
                                                   voip::H323Input::start_call());
                                     },
                                     "start_call");
                    kernel_.schedule(std::min(app.stop, sc_.duration),
                                     [this, idx] {
                                         feed_h323(idx, voip::Role::Initiator,
                                                   voip::H323Input::hang_up());
                                     },
                                     "hang_up");
                }
            } else {
                BgFlow bg;
                bg.flow_id = flow_id;
                bg.spec = app;
                if (app.kind == AppSpec::Kind::Ftp) {
                    bg.ftp.file_bytes = app.file_bytes;
                    bg.ftp.segment_bytes = app.segment_bytes;
                } else {
                    bg.cbr.emplace(app.rate_bps, app.packet_bytes, flow_id, app.src, app.dst);
                }
                const int idx = static_cast<int>(bg_flows_.size());
                bg_flows_.push_back(std::move(bg));
                kernel_.schedule(app.start, [this, idx] { start_bg(idx); }, "bg_start");
                kernel_.schedule(std::min(app.stop, sc_.duration),
                                 [this, idx] { bg_flows_[static_cast<std::size_t>(idx)].stopped = true; },
                                 "bg_stop");
            }
            ++flow_id;
        }
    }

    void start_bg(int idx) {
        BgFlow& bg = bg_flows_[static_cast<std::size_t>(idx)];
        if (bg.spec.kind == AppSpec::Kind::Ftp) {
            if (!bg.ftp.done())
                emit_ftp_segment(bg);
        } else {
            cbr_tick(idx);
        }
    }

    void emit_ftp_segment(BgFlow& bg) {
        if (bg.stopped || kernel_.now() >= std::min(bg.spec.stop, sc_.duration))
            return;
        net::Packet pkt = bg.ftp.make_segment(kernel_.now(), bg.flow_id, bg.spec.src,
                                              bg.spec.dst);
        bg.metrics.on_sent(pkt.wire_bytes());
        const std::int64_t id = make_inflight(pkt);
        on_packet_at_node(pkt.src_node, id);
    }

    void cbr_tick(int idx) {
        BgFlow& bg = bg_flows_[static_cast<std::size_t>(idx)];
        const SimTime stop = std::min(bg.spec.stop, sc_.duration);
        if (bg.stopped || kernel_.now() >= stop)
            return;
        auto [pkt, next_at] = bg.cbr->tick(kernel_.now());
        bg.metrics.on_sent(pkt.wire_bytes());
        const std::int64_t id = make_inflight(pkt);
        on_packet_at_node(pkt.src_node, id);
        if (next_at < stop)
            kernel_.schedule(next_at, [this, idx] { cbr_tick(idx); }, "cbr_tick");
    }

    // ------------------------------------------------------------- finalize

    MetricsReport finalize() {
        // packets still in queues or on the air when the horizon hit
        for (std::size_t i = 0; i < inflight_.size(); ++i)
            if (!inflight_[i].rec.resolved()) {
                inflight_[i].rec.lost = net::LossReason::EndOfRun;
                account_loss(inflight_[i]); // no pacing after the horizon
            }

        MetricsReport r;
        r.scenario_name = sc_.name;
        r.scenario_hash = sc_.hash();
        r.seed = seed_;
        r.mode = sc_.signaling_mode;
        r.duration_s = sc_.duration.seconds();
        r.scenario_echo = sc_.serialize();
        r.mac_drops = mac_drops_;
        r.collisions = collisions_;
        r.sig_retransmits = sig_retransmits_;
        r.trace_sample = trace_sample_;

        for (auto& vf : voip_flows_) {
            VoipFlowReport fr;
            fr.flow_id = vf.flow_id;
            fr.src = vf.spec.src;
            fr.dst = vf.spec.dst;
            const auto ti = voip::establishment_time(vf.init);
            const auto tr = voip::establishment_time(vf.recv);
            if (ti.established_at)
                fr.init_established_s = ti.established_at->seconds();
            if (ti.setup_latency)
                fr.init_setup_latency_s = ti.setup_latency->seconds();
            if (tr.established_at)
                fr.recv_established_s = tr.established_at->seconds();
            if (tr.setup_latency)
                fr.recv_setup_latency_s = tr.setup_latency->seconds();
            fr.setup_failed = vf.init.setup_failed || vf.recv.setup_failed ||
                              (!vf.init.established() && vf.spec.start < sc_.duration);
            fr.init_bytes_sent = vf.init.bytes_sent + vf.media_fwd.bytes_sent;
            fr.init_bytes_received = vf.init.bytes_received + vf.media_rev.bytes_received;
            fr.recv_bytes_sent = vf.recv.bytes_sent + vf.media_rev.bytes_sent;
            fr.recv_bytes_received = vf.recv.bytes_received + vf.media_fwd.bytes_received;
            fr.media_sent_fwd = vf.media_fwd.bytes_sent;
            fr.media_received_fwd = vf.media_fwd.bytes_received;
            fr.media_lost_fwd = vf.media_fwd.bytes_lost;
            fr.media_sent_rev = vf.media_rev.bytes_sent;
            fr.media_received_rev = vf.media_rev.bytes_received;
            fr.media_lost_rev = vf.media_rev.bytes_lost;
            fr.rtp_delivered = vf.media_fwd.rtp_delivered + vf.media_rev.rtp_delivered;
            if (fr.rtp_delivered > 0) {
                fr.rtp_avg_delay_s =
                    (vf.media_fwd.rtp_delay_sum + vf.media_rev.rtp_delay_sum).seconds() /
                    static_cast<double>(fr.rtp_delivered);
            }
            fr.jb_drops_fwd = vf.jb_fwd.dropped_late();
            fr.jb_drops_rev = vf.jb_rev.dropped_late();
            fr.sig_stray_dropped = vf.init.stray_dropped + vf.recv.stray_dropped;
            fr.conserved =
                vf.media_fwd.conserved() && vf.media_rev.conserved() && vf.sig.conserved();
            r.voip_flows.push_back(fr);
        }

        for (auto& bg : bg_flows_) {
            BackgroundFlowReport fr;
            fr.flow_id = bg.flow_id;
            fr.kind = app_kind_name(bg.spec.kind);
            fr.src = bg.spec.src;
            fr.dst = bg.spec.dst;
            fr.bytes_sent = bg.metrics.bytes_sent;
            fr.bytes_received = bg.metrics.bytes_received;
            fr.bytes_lost = bg.metrics.bytes_lost;
            fr.packets_delivered = bg.metrics.rtp_delivered;
            fr.avg_delay_s = media::rtp_avg_e2e_delay_s(bg.metrics);
            fr.conserved = bg.metrics.conserved();
            r.background_flows.push_back(fr);
        }

        // global conservation identity over every delivery record; throughput
        // counts transported application payload only (signaling is control
        // traffic, not data)
        std::int64_t sent = 0, received = 0, lost = 0;
        std::int64_t delivered_payload_bits = 0;
        for (const auto& f : inflight_) {
            sent += f.rec.wire_bytes;
            if (f.rec.delivered()) {
                received += f.rec.wire_bytes;
                if (f.rec.kind != net::PacketKind::Signaling)
                    delivered_payload_bits += f.rec.payload_bytes * 8;
            } else {
                lost += f.rec.wire_bytes;
            }
        }
        r.total_bytes_sent = sent;
        r.total_bytes_received = received;
        r.total_bytes_lost = lost;
        r.conservation_ok = sent == received + lost;

        const std::size_t bins =
            static_cast<std::size_t>((sc_.duration.ticks + 999999) / 1000000);
        throughput_bins_.resize(std::max(bins, throughput_bins_.size()), 0);
        r.throughput_bins_bits = throughput_bins_;
        r.overall_throughput_bps = sc_.duration.ticks > 0
                                       ? media::overall_throughput_bps(
                                             delivered_payload_bits, sc_.duration)
                                       : 0.0;

        // throughput versus cumulative window length (1 s grid)
        std::int64_t cum = 0;
        for (std::size_t i = 0; i < r.throughput_bins_bits.size(); ++i) {
            cum += r.throughput_bins_bits[i];
            const double w_s = static_cast<double>(i + 1);
            r.window_curve.push_back(
                {static_cast<std::int64_t>((i + 1) * 1000), static_cast<double>(cum) / w_s});
        }

        // media throughput versus audio length (20 ms grid, averaged per flow)
        for (int L_ms = 20; L_ms <= 2000; L_ms += 20) {
            double sum_bps = 0;
            int nflows = 0;
            for (const auto& vf : voip_flows_) {
                if (!vf.media_epoch_set)
                    continue;
                std::int64_t bits = 0;
                for (const auto& [offset_us, b] : vf.media_deliveries)
                    if (offset_us < static_cast<std::int64_t>(L_ms) * 1000)
                        bits += b;
                sum_bps += static_cast<double>(bits) / (static_cast<double>(L_ms) / 1000.0);
                ++nflows;
            }
            r.talkspurt_curve.push_back(
                {L_ms, nflows ? sum_bps / static_cast<double>(nflows) : 0.0});
        }
        return r;
    }

    // ------------------------------------------------------------- members

    Scenario sc_;
    Kernel kernel_;
    Rng rng_;
    std::uint64_t seed_ = 0;
    phy::PhyMode data_mode_, ctrl_mode_;

    std::vector<Channel> channels_;
    std::map<std::string, int> channel_index_by_name_;
    std::vector<NodeRt> nodes_;
    std::map<int, int> node_index_;
    std::map<std::pair<int, int>, int> next_hop_;
    std::map<std::pair<int, int>, SimTime> wire_busy_;

    std::vector<InFlight> inflight_;
    std::vector<VoipFlow> voip_flows_;
    std::vector<BgFlow> bg_flows_;

    mac::PcfSchedule pcf_sched_;
    SimTime cfp_end_{};

    std::int64_t next_tx_id_ = 0;
    std::uint64_t sig_seq_ = 0;
    std::uint64_t mac_drops_ = 0;
    std::uint64_t collisions_ = 0;
    std::uint64_t sig_retransmits_ = 0;
    bool suppress_ack_timer_ = false;

    std::vector<std::int64_t> throughput_bins_;
    TraceSink* sink_ = nullptr;
    std::vector<std::string> trace_sample_;
    static constexpr std::size_t kTraceSampleRows = 1000;
};

} // namespace vowlan::run

#endif
