#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "netbed/labeling.hpp"

namespace netbed {

// A tuple quiet for this long is considered finished; the next packet on it
// starts a new flow. Longer than any attack window we schedule, so a slow
// attack's connection stays one flow even at one packet per second.
constexpr u64 FLOW_IDLE_TIMEOUT_US = 120'000'000;

// One bidirectional flow. src/dst follow the first packet seen; fwd counts
// packets in that direction, bwd the replies. Label fields carry the
// majority packet label, with unanimous recording whether anyone disagreed.
struct FlowRecord {
    Ipv4Addr src;
    Ipv4Addr dst;
    u16 sport = 0;
    u16 dport = 0;
    u8 proto = 6;
    u64 first_ts = 0;
    u64 last_ts = 0;
    u64 fwd_packets = 0;
    u64 bwd_packets = 0;
    u64 fwd_bytes = 0;
    u64 bwd_bytes = 0;
    u64 syn = 0;
    u64 fin = 0;
    u64 rst = 0;
    LabelKind kind = LabelKind::Infrastructure;
    AttackType type = AttackType::Benign;
    i64 window = -1;
    bool unanimous = true;

    u64 packets() const { return fwd_packets + bwd_packets; }
    u64 duration_us() const { return last_ts - first_ts; }
    double mean_iat_us() const {
        u64 n = packets();
        return n > 1 ? double(duration_us()) / double(n - 1) : 0.0;
    }
};

// Folds timestamp-ordered packets into flows keyed by the unordered
// (address, port) pair plus protocol. Feed packets in nondecreasing ts
// order; finish() flushes what is still live.
class FlowTable {
public:
    void add(const Packet& p, u64 sim_ts, u32 wire_len, const LabelRecord& lab) {
        if (!p.ip) return;
        Key k = key_of(p);
        auto it = live_.find(k);
        if (it != live_.end() && sim_ts - it->second.rec.last_ts > FLOW_IDLE_TIMEOUT_US) {
            done_.push_back(seal(it->second));
            live_.erase(it);
            it = live_.end();
        }
        if (it == live_.end()) {
            Live fresh;
            fresh.rec.src = p.ip->src;
            fresh.rec.dst = p.ip->dst;
            fresh.rec.sport = src_port_of(p);
            fresh.rec.dport = dst_port_of(p);
            fresh.rec.proto = p.ip->proto;
            fresh.rec.first_ts = sim_ts;
            fresh.rec.last_ts = sim_ts;
            it = live_.emplace(k, std::move(fresh)).first;
        }
        Live& fl = it->second;
        fl.rec.last_ts = sim_ts;
        bool fwd = p.ip->src == fl.rec.src && src_port_of(p) == fl.rec.sport;
        (fwd ? fl.rec.fwd_packets : fl.rec.bwd_packets)++;
        (fwd ? fl.rec.fwd_bytes : fl.rec.bwd_bytes) += wire_len;
        if (const TcpInfo* t = tcp_of(p)) {
            if (t->flags & tcpflag::SYN) fl.rec.syn++;
            if (t->flags & tcpflag::FIN) fl.rec.fin++;
            if (t->flags & tcpflag::RST) fl.rec.rst++;
        }
        Vote v{lab.kind, lab.type, lab.window};
        fl.votes[v]++;
    }

    std::vector<FlowRecord> finish() {
        for (auto& [k, fl] : live_) done_.push_back(seal(fl));
        live_.clear();
        std::stable_sort(done_.begin(), done_.end(), [](const FlowRecord& a, const FlowRecord& b) {
            if (a.first_ts != b.first_ts) return a.first_ts < b.first_ts;
            if (a.src.value != b.src.value) return a.src.value < b.src.value;
            if (a.sport != b.sport) return a.sport < b.sport;
            if (a.dst.value != b.dst.value) return a.dst.value < b.dst.value;
            return a.dport < b.dport;
        });
        return std::move(done_);
    }

private:
    using Key = std::tuple<u32, u16, u32, u16, u8>;
    using Vote = std::tuple<LabelKind, AttackType, i64>;

    struct Live {
        FlowRecord rec;
        std::map<Vote, u64> votes;
    };

    static Key key_of(const Packet& p) {
        u32 sip = p.ip->src.value, dip = p.ip->dst.value;
        u16 sp = src_port_of(p), dp = dst_port_of(p);
        if (std::tie(sip, sp) <= std::tie(dip, dp)) return {sip, sp, dip, dp, p.ip->proto};
        return {dip, dp, sip, sp, p.ip->proto};
    }

    FlowRecord seal(Live& fl) {
        u64 best = 0, total = 0;
        for (const auto& [v, n] : fl.votes) {
            total += n;
            if (n > best) {
                best = n;
                fl.rec.kind = std::get<0>(v);
                fl.rec.type = std::get<1>(v);
                fl.rec.window = std::get<2>(v);
            }
        }
        fl.rec.unanimous = best == total;
        return fl.rec;
    }

    std::map<Key, Live> live_;
    std::vector<FlowRecord> done_;
};

struct FlowDataset {
    std::vector<FlowRecord> flows;
    u64 records = 0; // capture records fed in, for conservation checks
};

// Reads the capture files back, labels each record and folds everything
// into flows. Records are merged across files in timestamp order so the
// idle-timeout logic sees one global timeline.
inline std::variant<FlowDataset, LabelError> extract_flows(
    const Scenario& sc, const std::vector<CaptureFileInfo>& files) {
    struct Item {
        u64 ts;
        u64 order; // tie-break: dataset position, keeps the fold deterministic
        Packet pkt;
        u32 wire_len;
        LabelRecord lab;
    };
    Labeler labeler(sc);
    std::vector<Item> items;
    u64 order = 0;
    for (const CaptureFileInfo& info : files) {
        auto read = read_pcap(info.path);
        if (auto* err = std::get_if<PcapReadError>(&read))
            return LabelError{info.file + ": " + err->str()};
        PcapFile& pf = std::get<PcapFile>(read);
        for (std::size_t i = 0; i < pf.records.size(); i++) {
            PcapRecord& rec = pf.records[i];
            u64 sim_ts = rec.ts_epoch_us >= SIM_EPOCH_US ? rec.ts_epoch_us - SIM_EPOCH_US : 0;
            auto parsed = parse_frame(rec.data, sim_ts);
            if (!std::holds_alternative<Packet>(parsed)) continue;
            Item it;
            it.ts = sim_ts;
            it.order = order++;
            it.pkt = std::get<Packet>(std::move(parsed));
            it.wire_len = rec.orig_len;
            it.lab = labeler.label(it.pkt, sim_ts);
            it.lab.file = info.file;
            it.lab.record = i;
            items.push_back(std::move(it));
        }
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        return a.ts != b.ts ? a.ts < b.ts : a.order < b.order;
    });
    FlowTable table;
    for (const Item& it : items) table.add(it.pkt, it.ts, it.wire_len, it.lab);
    FlowDataset out;
    out.records = items.size();
    out.flows = table.finish();
    return out;
}

// Tab-separated flow table, one line per flow, stable across reruns.
inline std::string flows_header() {
    return "src\tsport\tdst\tdport\tproto\tfirst_us\tduration_us\tpackets\tfwd_packets\t"
           "bwd_packets\tfwd_bytes\tbwd_bytes\tsyn\tfin\trst\tmean_iat_us\tlabel\ttype\t"
           "window\tunanimous";
}

inline std::string flow_line(const FlowRecord& f) {
    char iat[32];
    std::snprintf(iat, sizeof iat, "%.3f", f.mean_iat_us());
    std::string type = f.kind == LabelKind::Attack ? attack_type_name(f.type) : "-";
    std::string window = f.window >= 0 ? std::to_string(f.window) : "-";
    return f.src.str() + "\t" + std::to_string(f.sport) + "\t" + f.dst.str() + "\t" +
           std::to_string(f.dport) + "\t" + std::to_string(f.proto) + "\t" +
           std::to_string(f.first_ts) + "\t" + std::to_string(f.duration_us()) + "\t" +
           std::to_string(f.packets()) + "\t" + std::to_string(f.fwd_packets) + "\t" +
           std::to_string(f.bwd_packets) + "\t" + std::to_string(f.fwd_bytes) + "\t" +
           std::to_string(f.bwd_bytes) + "\t" + std::to_string(f.syn) + "\t" +
           std::to_string(f.fin) + "\t" + std::to_string(f.rst) + "\t" + iat + "\t" +
           label_kind_name(f.kind) + "\t" + type + "\t" + window + "\t" +
           (f.unanimous ? "1" : "0");
}

inline std::string serialize_flows(const std::vector<FlowRecord>& flows) {
    std::string out = flows_header();
    out += '\n';
    for (const FlowRecord& f : flows) {
        out += flow_line(f);
        out += '\n';
    }
    return out;
}

} // namespace netbed
