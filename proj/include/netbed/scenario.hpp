#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "netbed/net.hpp"

namespace netbed {

// Container roles. Attacker roles mirror the tools they emulate; victim
// roles mirror the service the pod answers with.
enum class PodRole {
    Hping3,
    Hulk,
    Slowhttptest,
    Hydra,
    Metasploit,
    BenignClient,
    Nginx,
    Apache,
    Mysql,
    TlsServer,
};

enum class AttackType {
    TcpSynFlood,
    IcmpFlood,
    TcpSeqPrediction,
    HulkGetFlood,
    Slowloris,
    SlowBody,
    SlowRead,
    SlowRange,
    BruteForce,
    Heartbleed,
    Benign,
};

enum class ScheduleMode { Sequential, AsSpecified };

constexpr double DEFAULT_ATTACK_DURATION_S = 60.0;
constexpr double DEFAULT_SEQUENTIAL_GAP_S = 5.0;
constexpr u32 DEFAULT_ROTATION_S = 60;

inline const char* role_name(PodRole r) {
    switch (r) {
        case PodRole::Hping3: return "hping3";
        case PodRole::Hulk: return "hulk";
        case PodRole::Slowhttptest: return "slowhttptest";
        case PodRole::Hydra: return "hydra";
        case PodRole::Metasploit: return "metasploit";
        case PodRole::BenignClient: return "benign-client";
        case PodRole::Nginx: return "nginx";
        case PodRole::Apache: return "apache";
        case PodRole::Mysql: return "mysql";
        case PodRole::TlsServer: return "tls-server";
    }
    return "?";
}

inline std::optional<PodRole> role_from_name(std::string_view s) {
    for (PodRole r : {PodRole::Hping3, PodRole::Hulk, PodRole::Slowhttptest, PodRole::Hydra,
                      PodRole::Metasploit, PodRole::BenignClient, PodRole::Nginx, PodRole::Apache,
                      PodRole::Mysql, PodRole::TlsServer}) {
        if (s == role_name(r)) return r;
    }
    return std::nullopt;
}

inline const char* attack_type_name(AttackType t) {
    switch (t) {
        case AttackType::TcpSynFlood: return "tcp-syn-flood";
        case AttackType::IcmpFlood: return "icmp-flood";
        case AttackType::TcpSeqPrediction: return "tcp-seq-prediction";
        case AttackType::HulkGetFlood: return "hulk-get-flood";
        case AttackType::Slowloris: return "slowloris";
        case AttackType::SlowBody: return "slow-body";
        case AttackType::SlowRead: return "slow-read";
        case AttackType::SlowRange: return "slow-range";
        case AttackType::BruteForce: return "brute-force";
        case AttackType::Heartbleed: return "heartbleed";
        case AttackType::Benign: return "benign";
    }
    return "?";
}

inline std::optional<AttackType> attack_type_from_name(std::string_view s) {
    for (AttackType t : {AttackType::TcpSynFlood, AttackType::IcmpFlood, AttackType::TcpSeqPrediction,
                         AttackType::HulkGetFlood, AttackType::Slowloris, AttackType::SlowBody,
                         AttackType::SlowRead, AttackType::SlowRange, AttackType::BruteForce,
                         AttackType::Heartbleed, AttackType::Benign}) {
        if (s == attack_type_name(t)) return t;
    }
    return std::nullopt;
}

inline bool is_attacker_role(PodRole r) {
    switch (r) {
        case PodRole::Hping3:
        case PodRole::Hulk:
        case PodRole::Slowhttptest:
        case PodRole::Hydra:
        case PodRole::Metasploit:
        case PodRole::BenignClient:
            return true;
        default:
            return false;
    }
}

inline bool is_victim_role(PodRole r) { return !is_attacker_role(r); }

// Which attacker role carries out which attack type.
inline PodRole tool_for_attack(AttackType t) {
    switch (t) {
        case AttackType::TcpSynFlood:
        case AttackType::IcmpFlood:
        case AttackType::TcpSeqPrediction:
            return PodRole::Hping3;
        case AttackType::HulkGetFlood:
            return PodRole::Hulk;
        case AttackType::Slowloris:
        case AttackType::SlowBody:
        case AttackType::SlowRead:
        case AttackType::SlowRange:
            return PodRole::Slowhttptest;
        case AttackType::BruteForce:
            return PodRole::Hydra;
        case AttackType::Heartbleed:
            return PodRole::Metasploit;
        case AttackType::Benign:
            return PodRole::BenignClient;
    }
    return PodRole::Hping3;
}

// Which victim services an attack type makes sense against. Floods and the
// slow loris family work against any listener (holding a socket open does
// not require the victim to speak HTTP); the rest are service specific.
inline bool service_accepts_attack(AttackType t, PodRole victim) {
    switch (t) {
        case AttackType::TcpSynFlood:
        case AttackType::IcmpFlood:
        case AttackType::Slowloris:
        case AttackType::SlowBody:
            return is_victim_role(victim);
        case AttackType::SlowRead:
        case AttackType::SlowRange:
        case AttackType::HulkGetFlood:
        case AttackType::Benign:
        case AttackType::TcpSeqPrediction:
            return victim == PodRole::Nginx || victim == PodRole::Apache;
        case AttackType::BruteForce:
            return victim == PodRole::Mysql;
        case AttackType::Heartbleed:
            return victim == PodRole::TlsServer;
    }
    return false;
}

struct NodeSpec {
    std::string name;
    std::optional<Cidr> subnet;                 // overlay subnet, absent on the storage node
    std::optional<Ipv4Addr> storage_addr;       // storage-plane address, if attached
    bool storage = false;                       // the dataset sink node
};

struct PodSpec {
    std::string name;
    std::string node;
    PodRole role = PodRole::Hping3;
    std::optional<Ipv4Addr> address;            // auto-assigned when absent
    std::vector<u16> ports;                     // listening ports (victims only)
    bool vulnerable = true;                     // tls-server: heartbeat over-read enabled
};

struct AttackSpec {
    AttackType type = AttackType::TcpSynFlood;
    std::string attacker;
    std::string victim;
    double start_s = 0.0;
    std::optional<double> duration_s;
    std::map<std::string, std::string> params;
};

inline const char* IFACE_DATAPATH = "vethwe-datapath";
inline const char* IFACE_BRIDGE = "vethwe-bridge";

struct TapSpec {
    std::string node;
    std::string iface; // vethwe-datapath or vethwe-bridge
};

struct CaptureSpec {
    std::vector<TapSpec> taps;
    u32 rotation_s = DEFAULT_ROTATION_S;
    u32 snaplen = 65535;
};

struct Scenario {
    std::string name;
    u64 seed = 0;
    ScheduleMode schedule = ScheduleMode::AsSpecified;
    double gap_s = DEFAULT_SEQUENTIAL_GAP_S;
    std::vector<NodeSpec> nodes;
    std::vector<PodSpec> pods;
    std::vector<AttackSpec> attacks;
    CaptureSpec capture;
};

// ---- parameter helpers -----------------------------------------------------

inline std::optional<u64> param_u64(const std::map<std::string, std::string>& params,
                                    const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    const std::string& s = it->second;
    if (s.empty()) return std::nullopt;
    u64 v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + u64(c - '0');
    }
    return v;
}

inline std::optional<double> param_f64(const std::map<std::string, std::string>& params,
                                       const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    try {
        std::size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

inline std::optional<std::string> param_str(const std::map<std::string, std::string>& params,
                                            const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
}

// ---- validation ------------------------------------------------------------

enum class ViolationCode {
    DuplicateNodeName,
    MissingSubnet,
    SubnetOverlap,
    StorageNodeCount,
    StorageAddrMissing,
    StorageAddrInOverlay,
    PodOnStorageNode,
    DuplicatePodName,
    UnknownNode,
    AddressOutsideSubnet,
    ReservedAddress,
    DuplicateAddress,
    PortsOnAttacker,
    NoVictimPort,
    UnknownPod,
    ToolMismatch,
    ServiceMismatch,
    PortNotExposed,
    SelfAttack,
    BadSchedule,
    UnknownInterface,
    UnknownTapNode,
    TapOnStorageNode,
    DuplicateTap,
    BadRotation,
    BadSnaplen,
    BadParam,
    EmptyScenario,
};

inline const char* violation_code_name(ViolationCode c) {
    switch (c) {
        case ViolationCode::DuplicateNodeName: return "DuplicateNodeName";
        case ViolationCode::MissingSubnet: return "MissingSubnet";
        case ViolationCode::SubnetOverlap: return "SubnetOverlap";
        case ViolationCode::StorageNodeCount: return "StorageNodeCount";
        case ViolationCode::StorageAddrMissing: return "StorageAddrMissing";
        case ViolationCode::StorageAddrInOverlay: return "StorageAddrInOverlay";
        case ViolationCode::PodOnStorageNode: return "PodOnStorageNode";
        case ViolationCode::DuplicatePodName: return "DuplicatePodName";
        case ViolationCode::UnknownNode: return "UnknownNode";
        case ViolationCode::AddressOutsideSubnet: return "AddressOutsideSubnet";
        case ViolationCode::ReservedAddress: return "ReservedAddress";
        case ViolationCode::DuplicateAddress: return "DuplicateAddress";
        case ViolationCode::PortsOnAttacker: return "PortsOnAttacker";
        case ViolationCode::NoVictimPort: return "NoVictimPort";
        case ViolationCode::UnknownPod: return "UnknownPod";
        case ViolationCode::ToolMismatch: return "ToolMismatch";
        case ViolationCode::ServiceMismatch: return "ServiceMismatch";
        case ViolationCode::PortNotExposed: return "PortNotExposed";
        case ViolationCode::SelfAttack: return "SelfAttack";
        case ViolationCode::BadSchedule: return "BadSchedule";
        case ViolationCode::UnknownInterface: return "UnknownInterface";
        case ViolationCode::UnknownTapNode: return "UnknownTapNode";
        case ViolationCode::TapOnStorageNode: return "TapOnStorageNode";
        case ViolationCode::DuplicateTap: return "DuplicateTap";
        case ViolationCode::BadRotation: return "BadRotation";
        case ViolationCode::BadSnaplen: return "BadSnaplen";
        case ViolationCode::BadParam: return "BadParam";
        case ViolationCode::EmptyScenario: return "EmptyScenario";
    }
    return "?";
}

struct Violation {
    ViolationCode code;
    std::string where;   // e.g. "attacks[3]" or "nodes[1]"
    std::string message;

    std::string str() const {
        return "[" + std::string(violation_code_name(code)) + "] " + where + ": " + message;
    }
};

namespace detail {

inline u32 last_octet(Ipv4Addr a) { return a.value & 0xff; }

} // namespace detail

// Assigns overlay addresses: .1 of each subnet is the node itself, pods take
// explicit addresses where given, otherwise the lowest free host address in
// declaration order starting at .2. Returns pod-index -> address; pods whose
// placement is broken (unknown node, bad explicit address) are skipped here
// and reported by validate().
inline std::map<std::size_t, Ipv4Addr> assign_addresses(const Scenario& s) {
    std::map<std::size_t, Ipv4Addr> out;
    std::map<std::string, const NodeSpec*> nodes;
    for (const auto& n : s.nodes) nodes.emplace(n.name, &n);

    std::map<std::string, std::vector<bool>> used; // node -> host-bit usage
    auto reserve = [&](const NodeSpec& n, Ipv4Addr a) {
        auto& v = used[n.name];
        u64 hosts = 1ull << (32 - n.subnet->prefix);
        if (v.empty()) v.assign(std::size_t(std::min<u64>(hosts, 1 << 16)), false);
        std::size_t idx = a.value - n.subnet->network.value;
        if (idx < v.size()) v[idx] = true;
    };

    // Explicit addresses claim their slot first regardless of declaration order.
    for (std::size_t i = 0; i < s.pods.size(); i++) {
        const PodSpec& p = s.pods[i];
        auto it = nodes.find(p.node);
        if (it == nodes.end() || !it->second->subnet || !p.address) continue;
        if (!it->second->subnet->contains(*p.address)) continue;
        out[i] = *p.address;
        reserve(*it->second, *p.address);
    }
    for (std::size_t i = 0; i < s.pods.size(); i++) {
        const PodSpec& p = s.pods[i];
        if (out.count(i)) continue;
        auto it = nodes.find(p.node);
        if (it == nodes.end() || !it->second->subnet || p.address) continue;
        const NodeSpec& n = *it->second;
        auto& v = used[n.name];
        if (v.empty()) reserve(n, n.subnet->network); // just sizes the vector
        u64 hosts = 1ull << (32 - n.subnet->prefix);
        for (std::size_t h = 2; h < v.size() && h + 1 < hosts; h++) {
            if (!v[h]) {
                v[h] = true;
                out[i] = Ipv4Addr{n.subnet->network.value + u32(h)};
                break;
            }
        }
    }
    return out;
}

inline bool attack_needs_port(AttackType t) { return t != AttackType::IcmpFlood; }

// Target port of an attack: explicit dport parameter, else the victim's
// first declared port.
inline std::optional<u16> attack_target_port(const AttackSpec& a, const PodSpec& victim) {
    if (auto v = param_u64(a.params, "dport")) {
        return v <= 65535 ? std::optional<u16>(u16(*v)) : std::nullopt;
    }
    if (victim.ports.empty()) return std::nullopt;
    return victim.ports.front();
}

inline std::vector<Violation> validate(const Scenario& s) {
    std::vector<Violation> out;
    auto add = [&](ViolationCode c, std::string where, std::string msg) {
        out.push_back(Violation{c, std::move(where), std::move(msg)});
    };

    if (s.nodes.empty() && s.pods.empty() && s.attacks.empty())
        add(ViolationCode::EmptyScenario, "scenario", "nothing to run");

    // Nodes.
    std::map<std::string, const NodeSpec*> nodes;
    int storage_nodes = 0;
    for (std::size_t i = 0; i < s.nodes.size(); i++) {
        const NodeSpec& n = s.nodes[i];
        std::string where = "nodes[" + std::to_string(i) + "]";
        if (!nodes.emplace(n.name, &n).second)
            add(ViolationCode::DuplicateNodeName, where, "node name '" + n.name + "' reused");
        if (n.storage) {
            storage_nodes++;
            if (!n.storage_addr)
                add(ViolationCode::StorageAddrMissing, where,
                    "storage node '" + n.name + "' has no storage-plane address");
        } else if (!n.subnet) {
            add(ViolationCode::MissingSubnet, where, "node '" + n.name + "' has no overlay subnet");
        }
        for (std::size_t j = i + 1; j < s.nodes.size(); j++) {
            if (n.subnet && s.nodes[j].subnet && n.subnet->overlaps(*s.nodes[j].subnet))
                add(ViolationCode::SubnetOverlap, where,
                    "subnet " + n.subnet->str() + " overlaps " + s.nodes[j].subnet->str() +
                        " of node '" + s.nodes[j].name + "'");
        }
        if (n.storage_addr) {
            for (const auto& m : s.nodes) {
                if (m.subnet && m.subnet->contains(*n.storage_addr)) {
                    add(ViolationCode::StorageAddrInOverlay, where,
                        "storage-plane address " + n.storage_addr->str() +
                            " lies inside overlay subnet " + m.subnet->str());
                    break;
                }
            }
        }
    }
    if (!s.nodes.empty() && storage_nodes != 1)
        add(ViolationCode::StorageNodeCount, "nodes",
            "expected exactly one storage node, found " + std::to_string(storage_nodes));

    // Pods.
    std::map<std::string, std::size_t> pods;
    for (std::size_t i = 0; i < s.pods.size(); i++) {
        const PodSpec& p = s.pods[i];
        std::string where = "pods[" + std::to_string(i) + "]";
        if (!pods.emplace(p.name, i).second)
            add(ViolationCode::DuplicatePodName, where, "pod name '" + p.name + "' reused");
        auto it = nodes.find(p.node);
        if (it == nodes.end()) {
            add(ViolationCode::UnknownNode, where,
                "pod '" + p.name + "' placed on unknown node '" + p.node + "'");
            continue;
        }
        if (it->second->storage) {
            add(ViolationCode::PodOnStorageNode, where,
                "pod '" + p.name + "' placed on storage node '" + p.node + "'");
            continue;
        }
        const Cidr& subnet = *it->second->subnet;
        if (p.address) {
            if (!subnet.contains(*p.address)) {
                add(ViolationCode::AddressOutsideSubnet, where,
                    p.address->str() + " is outside " + subnet.str());
            } else {
                u32 host = p.address->value - subnet.network.value;
                u32 bcast = (1u << (32 - subnet.prefix)) - 1;
                if (host == 0 || host == 1 || host == bcast)
                    add(ViolationCode::ReservedAddress, where,
                        p.address->str() + " is reserved in " + subnet.str());
            }
        }
        if (is_attacker_role(p.role) && !p.ports.empty())
            add(ViolationCode::PortsOnAttacker, where,
                "attacker pod '" + p.name + "' declares listening ports");
        if (is_victim_role(p.role) && p.ports.empty())
            add(ViolationCode::NoVictimPort, where,
                "victim pod '" + p.name + "' declares no listening port");
    }

    // Duplicate explicit/assigned addresses.
    {
        auto assigned = assign_addresses(s);
        std::map<u32, std::string> seen;
        for (const auto& [idx, addr] : assigned) {
            auto [it, fresh] = seen.emplace(addr.value, s.pods[idx].name);
            if (!fresh)
                add(ViolationCode::DuplicateAddress, "pods[" + std::to_string(idx) + "]",
                    addr.str() + " already used by pod '" + it->second + "'");
        }
    }

    // Attacks.
    for (std::size_t i = 0; i < s.attacks.size(); i++) {
        const AttackSpec& a = s.attacks[i];
        std::string where = "attacks[" + std::to_string(i) + "]";
        auto ai = pods.find(a.attacker);
        auto vi = pods.find(a.victim);
        if (ai == pods.end())
            add(ViolationCode::UnknownPod, where, "attacker pod '" + a.attacker + "' not declared");
        if (vi == pods.end())
            add(ViolationCode::UnknownPod, where, "victim pod '" + a.victim + "' not declared");
        if (ai == pods.end() || vi == pods.end()) continue;
        const PodSpec& attacker = s.pods[ai->second];
        const PodSpec& victim = s.pods[vi->second];
        if (a.attacker == a.victim) {
            add(ViolationCode::SelfAttack, where, "pod '" + a.attacker + "' attacks itself");
            continue;
        }
        if (attacker.role != tool_for_attack(a.type))
            add(ViolationCode::ToolMismatch, where,
                std::string(attack_type_name(a.type)) + " requires role " +
                    role_name(tool_for_attack(a.type)) + ", pod '" + attacker.name + "' is " +
                    role_name(attacker.role));
        if (!service_accepts_attack(a.type, victim.role))
            add(ViolationCode::ServiceMismatch, where,
                std::string(attack_type_name(a.type)) + " cannot target a " +
                    role_name(victim.role) + " service");
        if (attack_needs_port(a.type)) {
            auto port = attack_target_port(a, victim);
            if (!port) {
                add(ViolationCode::NoVictimPort, where,
                    "no usable target port on victim '" + victim.name + "'");
            } else if (!victim.ports.empty() &&
                       std::find(victim.ports.begin(), victim.ports.end(), *port) ==
                           victim.ports.end()) {
                add(ViolationCode::PortNotExposed, where,
                    "port " + std::to_string(*port) + " not exposed by victim '" + victim.name +
                        "'");
            }
        }
        if (a.start_s < 0)
            add(ViolationCode::BadSchedule, where, "negative start time");
        if (a.duration_s && *a.duration_s <= 0)
            add(ViolationCode::BadSchedule, where, "non-positive duration");

        // Per-type parameter sanity.
        auto bad = [&](const std::string& msg) { add(ViolationCode::BadParam, where, msg); };
        switch (a.type) {
            case AttackType::TcpSynFlood:
            case AttackType::IcmpFlood: {
                auto r = param_u64(a.params, "rate_pps");
                if (a.params.count("rate_pps") && (!r || *r == 0)) bad("rate_pps must be a positive integer");
                break;
            }
            case AttackType::Heartbleed: {
                u64 claimed = param_u64(a.params, "heartbeat_claimed_len").value_or(16384);
                u64 actual = param_u64(a.params, "heartbeat_actual_len").value_or(16);
                if (claimed < actual) bad("heartbeat_claimed_len smaller than actual payload");
                if (claimed > 65535 - 3 - 16) bad("heartbeat_claimed_len exceeds record capacity");
                break;
            }
            case AttackType::BruteForce: {
                u64 n = param_u64(a.params, "wordlist_size").value_or(100);
                if (n == 0) bad("wordlist_size must be positive");
                break;
            }
            case AttackType::TcpSeqPrediction: {
                auto client = param_str(a.params, "hijack_client");
                if (!client) {
                    bad("tcp-seq-prediction requires a hijack_client parameter");
                } else {
                    auto ci = pods.find(*client);
                    if (ci == pods.end())
                        bad("hijack_client '" + *client + "' not declared");
                    else if (s.pods[ci->second].role != PodRole::BenignClient)
                        bad("hijack_client '" + *client + "' is not a benign-client pod");
                    // The attacker predicts the client's ephemeral port, which
                    // only works if the hijacked pod opens no other
                    // connections. Reject scenarios that reuse it elsewhere.
                    for (std::size_t j = 0; j < s.attacks.size(); j++) {
                        if (j == i) continue;
                        const AttackSpec& other = s.attacks[j];
                        bool reused = other.attacker == *client ||
                                      (other.type == AttackType::TcpSeqPrediction &&
                                       param_str(other.params, "hijack_client") == client);
                        if (reused) {
                            bad("hijack_client '" + *client + "' also drives attacks[" +
                                std::to_string(j) + "]; its port sequence would be unpredictable");
                            break;
                        }
                    }
                }
                break;
            }
            default:
                break;
        }
    }

    // Capture.
    std::set<std::pair<std::string, std::string>> tapped;
    for (std::size_t i = 0; i < s.capture.taps.size(); i++) {
        const TapSpec& t = s.capture.taps[i];
        std::string where = "capture.taps[" + std::to_string(i) + "]";
        auto it = nodes.find(t.node);
        if (it == nodes.end()) {
            add(ViolationCode::UnknownTapNode, where, "tap on unknown node '" + t.node + "'");
        } else if (it->second->storage) {
            add(ViolationCode::TapOnStorageNode, where,
                "node '" + t.node + "' has no overlay interfaces to tap");
        }
        if (t.iface != IFACE_DATAPATH && t.iface != IFACE_BRIDGE)
            add(ViolationCode::UnknownInterface, where, "unknown interface '" + t.iface + "'");
        if (!tapped.insert({t.node, t.iface}).second)
            add(ViolationCode::DuplicateTap, where,
                "interface '" + t.iface + "' on '" + t.node + "' is tapped twice");
    }
    if (s.capture.rotation_s == 0)
        add(ViolationCode::BadRotation, "capture", "rotation interval must be positive");
    if (s.capture.snaplen < 64)
        add(ViolationCode::BadSnaplen, "capture", "snaplen below 64 loses headers");

    if (s.schedule == ScheduleMode::Sequential && s.gap_s < 0)
        add(ViolationCode::BadSchedule, "scenario", "negative sequential gap");

    return out;
}

// ---- schedule and flow matrix ----------------------------------------------

struct AttackWindow {
    std::size_t attack_index;
    u64 start_us;
    u64 end_us;
};

inline u64 seconds_to_us(double s) { return u64(s * 1e6 + 0.5); }

// Resolves when each attack actually runs. Sequential mode serializes the
// attack list in declaration order with a fixed gap, ignoring start_s.
inline std::vector<AttackWindow> effective_schedule(const Scenario& s) {
    std::vector<AttackWindow> out;
    u64 cursor = 0;
    for (std::size_t i = 0; i < s.attacks.size(); i++) {
        const AttackSpec& a = s.attacks[i];
        u64 dur = seconds_to_us(a.duration_s.value_or(DEFAULT_ATTACK_DURATION_S));
        u64 start = s.schedule == ScheduleMode::Sequential ? cursor : seconds_to_us(a.start_s);
        out.push_back(AttackWindow{i, start, start + dur});
        cursor = start + dur + seconds_to_us(s.gap_s);
    }
    return out;
}

struct FlowMatrixEntry {
    std::size_t attack_index;
    std::string attacker;
    std::string victim;
    AttackType type;
};

// One row per attack: who talks to whom with what. Scale tests count rows
// and distinct victims here before paying for a full emulation.
inline std::vector<FlowMatrixEntry> flow_matrix(const Scenario& s) {
    std::vector<FlowMatrixEntry> out;
    for (std::size_t i = 0; i < s.attacks.size(); i++) {
        const AttackSpec& a = s.attacks[i];
        out.push_back(FlowMatrixEntry{i, a.attacker, a.victim, a.type});
    }
    return out;
}

} // namespace netbed
