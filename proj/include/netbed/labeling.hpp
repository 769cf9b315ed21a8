#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "netbed/capture.hpp"
#include "netbed/generators.hpp"
#include "netbed/packet.hpp"
#include "netbed/pcap.hpp"
#include "netbed/scenario.hpp"

namespace netbed {

enum class LabelKind : u8 { Attack, Benign, Infrastructure };

inline const char* label_kind_name(LabelKind k) {
    switch (k) {
        case LabelKind::Attack: return "attack";
        case LabelKind::Benign: return "benign";
        case LabelKind::Infrastructure: return "infrastructure";
    }
    return "?";
}

inline std::optional<LabelKind> label_kind_from_name(std::string_view s) {
    if (s == "attack") return LabelKind::Attack;
    if (s == "benign") return LabelKind::Benign;
    if (s == "infrastructure") return LabelKind::Infrastructure;
    return std::nullopt;
}

// One labeled capture record. file + record locate the packet inside the
// dataset; window is the schedule row it was attributed to (-1 for
// infrastructure). party_a/party_b are the attacker/victim pod names for
// attack labels and client/server for benign ones.
struct LabelRecord {
    std::string file;
    u64 record = 0;
    LabelKind kind = LabelKind::Infrastructure;
    AttackType type = AttackType::Benign;
    i64 window = -1;
    std::string party_a;
    std::string party_b;

    bool operator==(const LabelRecord&) const = default;
};

// Assigns ground-truth labels from packet headers and the scenario schedule
// alone. It never sees the fabric's hidden cause tags; the audit checks the
// two agree afterwards. A packet matches a schedule row when its timestamp
// falls inside the row's window, its address pair is the row's pod pair and
// (for TCP rows) one of its ports is the attacked service port.
//
// Sequence prediction needs its own rule because the injected segments spoof
// the hijacked client's address: headers alone cannot tell a forged segment
// from the client's own session. The scenario can, though. The client's only
// scripted action is the provisioning exchange at the window start, so on
// that connection's 4-tuple everything before the probe lead time is the
// client and everything after is the attacker (or the victim reacting to
// the attacker).
class Labeler {
public:
    explicit Labeler(const Scenario& sc) {
        auto addrs = assign_addresses(sc);
        auto find = [&](const std::string& name) {
            for (std::size_t i = 0; i < sc.pods.size(); i++)
                if (sc.pods[i].name == name) return int(i);
            return -1;
        };
        for (const AttackWindow& w : effective_schedule(sc)) {
            const AttackSpec& a = sc.attacks[w.attack_index];
            GeneratorConfig cfg = GeneratorConfig::from_params(a.params);
            Row r;
            r.window = i64(w.attack_index);
            r.type = a.type;
            r.start = w.start_us;
            r.end = w.end_us;
            r.attacker = a.attacker;
            r.victim = a.victim;
            int ap = find(a.attacker);
            int vp = find(a.victim);
            if (auto it = addrs.find(std::size_t(ap)); ap >= 0 && it != addrs.end())
                r.a_ip = it->second.value;
            if (auto it = addrs.find(std::size_t(vp)); vp >= 0 && it != addrs.end())
                r.v_ip = it->second.value;
            if (vp >= 0)
                r.port = attack_target_port(a, sc.pods[std::size_t(vp)]).value_or(0);
            r.proto = a.type == AttackType::IcmpFlood ? 1 : 6;
            if (a.type == AttackType::TcpSeqPrediction) {
                r.seqpred = true;
                r.split = w.start_us + seconds_to_us(cfg.provision_lead_s);
                if (auto client = param_str(a.params, "hijack_client")) {
                    r.client = *client;
                    int cp = find(*client);
                    if (auto it = addrs.find(std::size_t(cp)); cp >= 0 && it != addrs.end())
                        r.c_ip = it->second.value;
                }
            }
            rows_.push_back(std::move(r));
        }
    }

    // Labels one parsed packet. First matching schedule row wins; a packet
    // matching nothing is infrastructure and counts as a warning, since a
    // well-formed scenario accounts for every captured byte.
    LabelRecord label(const Packet& p, u64 sim_ts) {
        LabelRecord out;
        if (!p.ip) {
            warnings_++;
            return out;
        }
        u32 src = p.ip->src.value;
        u32 dst = p.ip->dst.value;
        u16 sport = src_port_of(p);
        u16 dport = dst_port_of(p);
        for (const Row& r : rows_) {
            if (sim_ts < r.start || sim_ts >= r.end) continue;
            if (r.seqpred) {
                bool fwd = src == r.c_ip && dst == r.v_ip && sport == FIRST_EPHEMERAL_PORT &&
                           dport == r.port;
                bool bwd = src == r.v_ip && dst == r.c_ip && sport == r.port &&
                           dport == FIRST_EPHEMERAL_PORT;
                if (!fwd && !bwd) continue; // nothing else belongs to this row
                if (sim_ts < r.split) {
                    out.kind = LabelKind::Benign;
                    out.type = AttackType::Benign;
                    out.window = r.window;
                    out.party_a = r.client;
                    out.party_b = r.victim;
                } else {
                    out.kind = LabelKind::Attack;
                    out.type = r.type;
                    out.window = r.window;
                    out.party_a = r.attacker;
                    out.party_b = r.victim;
                }
                return out;
            }
            bool pair = (src == r.a_ip && dst == r.v_ip) || (src == r.v_ip && dst == r.a_ip);
            if (!pair) continue;
            if (p.ip->proto != r.proto) continue;
            if (r.proto == 6 && sport != r.port && dport != r.port) continue;
            out.kind = r.type == AttackType::Benign ? LabelKind::Benign : LabelKind::Attack;
            out.type = r.type;
            out.window = r.window;
            out.party_a = r.attacker;
            out.party_b = r.victim;
            return out;
        }
        warnings_++;
        return out;
    }

    // Same, from raw frame bytes as a capture file stores them.
    LabelRecord label_frame(const Bytes& frame, u64 sim_ts) {
        auto parsed = parse_frame(frame, sim_ts);
        if (auto* p = std::get_if<Packet>(&parsed)) return label(*p, sim_ts);
        warnings_++;
        return LabelRecord{};
    }

    u64 warnings() const { return warnings_; }
    void reset_warnings() { warnings_ = 0; }

private:
    struct Row {
        i64 window = -1;
        AttackType type = AttackType::Benign;
        u64 start = 0;
        u64 end = 0;
        u32 a_ip = 0;
        u32 v_ip = 0;
        u16 port = 0;
        u8 proto = 6;
        std::string attacker;
        std::string victim;
        // sequence-prediction extras
        bool seqpred = false;
        u32 c_ip = 0;
        u64 split = 0;
        std::string client;
    };

    std::vector<Row> rows_;
    u64 warnings_ = 0;
};

struct LabeledDataset {
    std::vector<LabelRecord> records; // file order, then record order
    u64 warnings = 0;
};

struct LabelError {
    std::string message;
};

// Labels every record of every capture file, reading the frames back from
// disk so the labeler works from exactly what a consumer of the dataset
// would see.
inline std::variant<LabeledDataset, LabelError> label_dataset(
    const Scenario& sc, const std::vector<CaptureFileInfo>& files) {
    Labeler labeler(sc);
    LabeledDataset out;
    for (const CaptureFileInfo& info : files) {
        auto read = read_pcap(info.path);
        if (auto* err = std::get_if<PcapReadError>(&read))
            return LabelError{info.file + ": " + err->str()};
        const PcapFile& pf = std::get<PcapFile>(read);
        for (std::size_t i = 0; i < pf.records.size(); i++) {
            const PcapRecord& rec = pf.records[i];
            u64 sim_ts = rec.ts_epoch_us >= SIM_EPOCH_US ? rec.ts_epoch_us - SIM_EPOCH_US : 0;
            LabelRecord lab = labeler.label_frame(rec.data, sim_ts);
            lab.file = info.file;
            lab.record = i;
            out.records.push_back(std::move(lab));
        }
    }
    out.warnings = labeler.warnings();
    return out;
}

// Tab-separated label table. One header line, then one line per record in
// dataset order. Empty window and party fields are written as "-".
inline std::string labels_header() {
    return "file\trecord\tlabel\ttype\twindow\tparty_a\tparty_b";
}

inline std::string label_line(const LabelRecord& r) {
    std::string type = r.kind == LabelKind::Attack ? attack_type_name(r.type) : "-";
    std::string window = r.window >= 0 ? std::to_string(r.window) : "-";
    std::string a = r.party_a.empty() ? "-" : r.party_a;
    std::string b = r.party_b.empty() ? "-" : r.party_b;
    return r.file + "\t" + std::to_string(r.record) + "\t" + label_kind_name(r.kind) + "\t" +
           type + "\t" + window + "\t" + a + "\t" + b;
}

inline std::optional<LabelRecord> parse_label_line(const std::string& line) {
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (true) {
        std::size_t tab = line.find('\t', pos);
        cols.push_back(line.substr(pos, tab == std::string::npos ? tab : tab - pos));
        if (tab == std::string::npos) break;
        pos = tab + 1;
    }
    if (cols.size() != 7) return std::nullopt;
    LabelRecord r;
    r.file = cols[0];
    try {
        r.record = std::stoull(cols[1]);
    } catch (...) {
        return std::nullopt;
    }
    auto kind = label_kind_from_name(cols[2]);
    if (!kind) return std::nullopt;
    r.kind = *kind;
    if (cols[3] != "-") {
        auto type = attack_type_from_name(cols[3]);
        if (!type) return std::nullopt;
        r.type = *type;
    }
    if (cols[4] != "-") {
        try {
            r.window = std::stoll(cols[4]);
        } catch (...) {
            return std::nullopt;
        }
    }
    if (cols[5] != "-") r.party_a = cols[5];
    if (cols[6] != "-") r.party_b = cols[6];
    return r;
}

inline std::string serialize_labels(const std::vector<LabelRecord>& records) {
    std::string out = labels_header();
    out += '\n';
    for (const LabelRecord& r : records) {
        out += label_line(r);
        out += '\n';
    }
    return out;
}

inline std::variant<std::vector<LabelRecord>, LabelError> parse_labels_text(
    const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != labels_header())
        return LabelError{"bad or missing label table header"};
    std::vector<LabelRecord> out;
    u64 lineno = 1;
    while (std::getline(in, line)) {
        lineno++;
        if (line.empty()) continue;
        auto rec = parse_label_line(line);
        if (!rec) return LabelError{"bad label line " + std::to_string(lineno)};
        out.push_back(std::move(*rec));
    }
    return out;
}

// Audit result: how much of the capture the labels explain and how often
// they disagree with the fabric's hidden per-packet cause.
struct AuditReport {
    u64 records = 0;
    u64 attack = 0;
    u64 benign = 0;
    u64 infrastructure = 0;
    u64 warnings = 0;   // records no schedule row explains
    u64 mismatches = 0; // records whose label contradicts the hidden cause
    std::string first_mismatch;

    double coverage_percent() const {
        if (records == 0) return 100.0;
        return 100.0 * double(records - warnings) / double(records);
    }
    bool pass() const { return warnings == 0 && mismatches == 0; }
};

// A label agrees with the hidden cause when it lands in the same class and
// (for attack and benign traffic) attributes the packet to the same schedule
// row. Storage-plane transfers never cross overlay taps, so a Transfer cause
// showing up here is itself a violation.
inline bool label_matches_cause(const Scenario& sc, const LabelRecord& lab, const Cause& cause) {
    switch (cause.kind) {
        case CauseKind::Attack:
            return lab.kind == LabelKind::Attack && lab.window == cause.window &&
                   cause.window >= 0 && std::size_t(cause.window) < sc.attacks.size() &&
                   lab.type == sc.attacks[std::size_t(cause.window)].type;
        case CauseKind::Benign:
            return lab.kind == LabelKind::Benign && lab.window == cause.window;
        case CauseKind::Transfer: return false;
        case CauseKind::Infra: return lab.kind == LabelKind::Infrastructure;
    }
    return false;
}

// Replays the hidden causes the taps kept against the labels derived from
// headers alone. records must be in dataset order (the order label_dataset
// emits); any misalignment is reported as a mismatch rather than ignored.
inline AuditReport audit_ground_truth(const Scenario& sc,
                                      const std::vector<TapSink::FinalizedFile>& files,
                                      const std::vector<LabelRecord>& records) {
    AuditReport rep;
    std::size_t cursor = 0;
    auto note = [&](const std::string& where) {
        rep.mismatches++;
        if (rep.first_mismatch.empty()) rep.first_mismatch = where;
    };
    for (const TapSink::FinalizedFile& f : files) {
        for (std::size_t i = 0; i < f.causes.size(); i++) {
            rep.records++;
            if (cursor >= records.size()) {
                note(f.info.file + "#" + std::to_string(i) + ": label missing");
                continue;
            }
            const LabelRecord& lab = records[cursor++];
            switch (lab.kind) {
                case LabelKind::Attack: rep.attack++; break;
                case LabelKind::Benign: rep.benign++; break;
                case LabelKind::Infrastructure: rep.infrastructure++; break;
            }
            if (lab.file != f.info.file || lab.record != i) {
                note(f.info.file + "#" + std::to_string(i) + ": label out of order");
                continue;
            }
            if (!label_matches_cause(sc, lab, f.causes[i]))
                note(f.info.file + "#" + std::to_string(i) + ": label " +
                     label_kind_name(lab.kind) + "/" + std::to_string(lab.window) +
                     " contradicts recorded cause");
        }
    }
    if (cursor != records.size()) note("label table has extra records");
    // Infrastructure labels only arise as fall-throughs, so they double as
    // the warning count when auditing a freshly labeled dataset.
    rep.warnings = rep.infrastructure;
    return rep;
}

} // namespace netbed
