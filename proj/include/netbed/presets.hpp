#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netbed/scenario.hpp"

namespace netbed {

// Shipped scenario catalog. Topologies follow the reference testbed: one
// master and four worker nodes on a Weave-style overlay, attacks staged from
// master/wn1/wn2 toward victims on wn3/wn4, captures on the victim nodes'
// veth interfaces, plus a storage host reachable only over a separate plane.

namespace preset_detail {

inline void add_cluster_nodes(Scenario& s) {
    auto node = [&](const char* name, const char* subnet, const char* storage_addr) {
        NodeSpec n;
        n.name = name;
        n.subnet = Cidr::parse(subnet);
        if (storage_addr) n.storage_addr = Ipv4Addr::parse(storage_addr);
        s.nodes.push_back(std::move(n));
    };
    node("master", "10.32.0.0/24", nullptr);
    node("wn1", "10.33.0.0/24", nullptr);
    node("wn2", "10.35.0.0/24", nullptr);
    node("wn3", "10.34.0.0/24", "192.168.100.3");
    node("wn4", "10.36.0.0/24", "192.168.100.4");
    NodeSpec nas;
    nas.name = "nas";
    nas.storage = true;
    nas.storage_addr = Ipv4Addr::parse("192.168.100.10");
    s.nodes.push_back(std::move(nas));
}

inline void add_victim_taps(Scenario& s) {
    for (const char* node : {"wn3", "wn4"}) {
        s.capture.taps.push_back(TapSpec{node, IFACE_DATAPATH});
        s.capture.taps.push_back(TapSpec{node, IFACE_BRIDGE});
    }
}

inline PodSpec pod(std::string name, std::string node, PodRole role, std::vector<u16> ports = {}) {
    PodSpec p;
    p.name = std::move(name);
    p.node = std::move(node);
    p.role = role;
    p.ports = std::move(ports);
    return p;
}

inline AttackSpec attack(AttackType t, std::string attacker, std::string victim) {
    AttackSpec a;
    a.type = t;
    a.attacker = std::move(attacker);
    a.victim = std::move(victim);
    return a;
}

inline Scenario base(std::string name, ScheduleMode mode) {
    Scenario s;
    s.name = std::move(name);
    s.seed = 42;
    s.schedule = mode;
    add_cluster_nodes(s);
    add_victim_taps(s);
    return s;
}

inline const char* tool_pod_prefix(AttackType t) {
    switch (tool_for_attack(t)) {
        case PodRole::Hping3: return "hping3";
        case PodRole::Slowhttptest: return "slowhttp";
        default: return "attacker";
    }
}

// The two-containers-per-attacker-node layout shared by every fig2b variant:
// master/wn1/wn2 each host one attacker aimed at the wn3 victim and one at
// the wn4 victim.
inline Scenario make_fig2b(const std::string& name, AttackType type) {
    Scenario s = base(name, ScheduleMode::AsSpecified);
    bool apache_only = type == AttackType::SlowRange;
    std::string v1 = apache_only ? "apache-1" : "nginx-1";
    std::string v2 = apache_only ? "apache-2" : "apache-1";
    s.pods.push_back(pod(v1, "wn3", apache_only ? PodRole::Apache : PodRole::Nginx, {80}));
    s.pods.push_back(pod(v2, "wn4", PodRole::Apache, {80}));

    const char* prefix = tool_pod_prefix(type);
    bool seqpred = type == AttackType::TcpSeqPrediction;
    for (const char* node : {"master", "wn1", "wn2"}) {
        for (int i = 1; i <= 2; i++) {
            std::string attacker = std::string(prefix) + "-" + node + "-" + std::to_string(i);
            s.pods.push_back(pod(attacker, node, tool_for_attack(type)));
            AttackSpec a = attack(type, attacker, i == 1 ? v1 : v2);
            if (seqpred) {
                std::string client = std::string("client-") + node + "-" + std::to_string(i);
                s.pods.push_back(pod(client, node, PodRole::BenignClient));
                a.params["hijack_client"] = client;
            }
            s.attacks.push_back(std::move(a));
        }
    }
    return s;
}

inline Scenario make_fig3() {
    Scenario s = base("fig3-large-ddos", ScheduleMode::AsSpecified);
    const char* kinds[3] = {"nginx", "apache", "mysql"};
    PodRole roles[3] = {PodRole::Nginx, PodRole::Apache, PodRole::Mysql};
    std::vector<std::string> victims[2]; // per victim node wn3, wn4
    for (int vn = 0; vn < 2; vn++) {
        for (int k = 0; k < 3; k++) {
            std::string name = std::string(kinds[k]) + "-" + std::to_string(vn + 1);
            u16 port = roles[k] == PodRole::Mysql ? u16(3306) : u16(80);
            s.pods.push_back(pod(name, vn == 0 ? "wn3" : "wn4", roles[k], {port}));
            victims[vn].push_back(name);
        }
    }
    for (const char* node : {"wn1", "wn2"}) {
        for (int i = 0; i < 6; i++) {
            std::string attacker =
                std::string("hping3-") + node + "-" + std::to_string(i + 1);
            s.pods.push_back(pod(attacker, node, PodRole::Hping3));
            s.attacks.push_back(
                attack(AttackType::TcpSynFlood, attacker, victims[i / 3][i % 3]));
        }
    }
    for (int i = 0; i < 2; i++) {
        std::string attacker = "hping3-master-" + std::to_string(i + 1);
        s.pods.push_back(pod(attacker, "master", PodRole::Hping3));
        s.attacks.push_back(attack(AttackType::TcpSynFlood, attacker, victims[i][0]));
    }
    return s;
}

inline Scenario make_fig4() {
    Scenario s = base("fig4-large-ddos", ScheduleMode::AsSpecified);
    const char* kinds[3] = {"nginx", "apache", "mysql"};
    PodRole roles[3] = {PodRole::Nginx, PodRole::Apache, PodRole::Mysql};
    std::vector<std::string> victims[2];
    // Victim layout per node: nginx, apache, mysql, nginx-2, apache-2, mysql-2.
    for (int vn = 0; vn < 2; vn++) {
        for (int rep = 0; rep < 2; rep++) {
            for (int k = 0; k < 3; k++) {
                int serial = vn * 2 + rep + 1; // 1,2 on wn3; 3,4 on wn4
                std::string name = std::string(kinds[k]) + "-" + std::to_string(serial);
                u16 port = roles[k] == PodRole::Mysql ? u16(3306) : u16(80);
                s.pods.push_back(pod(name, vn == 0 ? "wn3" : "wn4", roles[k], {port}));
                victims[vn].push_back(name);
            }
        }
    }
    for (const char* node : {"wn1", "wn2"}) {
        for (int i = 0; i < 12; i++) {
            std::string attacker =
                std::string("slowhttp-") + node + "-" + std::to_string(i + 1);
            s.pods.push_back(pod(attacker, node, PodRole::Slowhttptest));
            s.attacks.push_back(attack(AttackType::Slowloris, attacker, victims[i / 6][i % 6]));
        }
    }
    for (int i = 0; i < 2; i++) {
        std::string attacker = "slowhttp-master-" + std::to_string(i + 1);
        s.pods.push_back(pod(attacker, "master", PodRole::Slowhttptest));
        s.attacks.push_back(attack(AttackType::Slowloris, attacker, victims[i][0]));
    }
    return s;
}

} // namespace preset_detail

inline std::vector<std::string> preset_names() {
    return {
        "fig2a-dos",
        "fig2b-ddos-synflood",
        "fig2b-ddos-icmpflood",
        "fig2b-ddos-seqprediction",
        "fig2b-ddos-slowloris",
        "fig2b-ddos-slowbody",
        "fig2b-ddos-slowread",
        "fig2b-ddos-slowrange",
        "fig2c-bruteforce",
        "fig2d-heartbleed",
        "fig3-large-ddos",
        "fig4-large-ddos",
        "benign-baseline",
    };
}

inline std::optional<Scenario> preset(const std::string& name) {
    using namespace preset_detail;
    if (name == "fig2a-dos") {
        // Two single-source DoS attacks staged back to back.
        Scenario s = base(name, ScheduleMode::Sequential);
        s.pods.push_back(pod("hping3-1", "wn1", PodRole::Hping3));
        s.pods.push_back(pod("hulk-1", "wn2", PodRole::Hulk));
        s.pods.push_back(pod("nginx-1", "wn3", PodRole::Nginx, {80}));
        s.pods.push_back(pod("apache-1", "wn4", PodRole::Apache, {80}));
        s.attacks.push_back(attack(AttackType::TcpSynFlood, "hping3-1", "nginx-1"));
        s.attacks.push_back(attack(AttackType::HulkGetFlood, "hulk-1", "apache-1"));
        return s;
    }
    if (name == "fig2b-ddos-synflood") return make_fig2b(name, AttackType::TcpSynFlood);
    if (name == "fig2b-ddos-icmpflood") return make_fig2b(name, AttackType::IcmpFlood);
    if (name == "fig2b-ddos-seqprediction") return make_fig2b(name, AttackType::TcpSeqPrediction);
    if (name == "fig2b-ddos-slowloris") return make_fig2b(name, AttackType::Slowloris);
    if (name == "fig2b-ddos-slowbody") return make_fig2b(name, AttackType::SlowBody);
    if (name == "fig2b-ddos-slowread") return make_fig2b(name, AttackType::SlowRead);
    if (name == "fig2b-ddos-slowrange") return make_fig2b(name, AttackType::SlowRange);
    if (name == "fig2c-bruteforce") {
        Scenario s = base(name, ScheduleMode::AsSpecified);
        s.pods.push_back(pod("hydra-1", "wn1", PodRole::Hydra));
        s.pods.push_back(pod("mysql-1", "wn3", PodRole::Mysql, {3306}));
        s.attacks.push_back(attack(AttackType::BruteForce, "hydra-1", "mysql-1"));
        return s;
    }
    if (name == "fig2d-heartbleed") {
        // First wn1 against wn3, then wn2 against wn4.
        Scenario s = base(name, ScheduleMode::Sequential);
        s.pods.push_back(pod("metasploit-1", "wn1", PodRole::Metasploit));
        s.pods.push_back(pod("metasploit-2", "wn2", PodRole::Metasploit));
        s.pods.push_back(pod("apache-tls-1", "wn3", PodRole::TlsServer, {443}));
        s.pods.push_back(pod("apache-tls-2", "wn4", PodRole::TlsServer, {443}));
        s.attacks.push_back(attack(AttackType::Heartbleed, "metasploit-1", "apache-tls-1"));
        s.attacks.push_back(attack(AttackType::Heartbleed, "metasploit-2", "apache-tls-2"));
        return s;
    }
    if (name == "fig3-large-ddos") return make_fig3();
    if (name == "fig4-large-ddos") return make_fig4();
    if (name == "benign-baseline") {
        Scenario s = base(name, ScheduleMode::AsSpecified);
        s.pods.push_back(pod("client-1", "wn1", PodRole::BenignClient));
        s.pods.push_back(pod("client-2", "wn2", PodRole::BenignClient));
        s.pods.push_back(pod("nginx-1", "wn3", PodRole::Nginx, {80}));
        s.pods.push_back(pod("apache-1", "wn4", PodRole::Apache, {80}));
        s.attacks.push_back(attack(AttackType::Benign, "client-1", "nginx-1"));
        s.attacks.push_back(attack(AttackType::Benign, "client-2", "apache-1"));
        return s;
    }
    return std::nullopt;
}

inline std::string preset_description(const std::string& name) {
    auto s = preset(name);
    if (!s) return "";
    std::map<std::string, int> attackers, victims;
    std::map<AttackType, int> types;
    for (const auto& a : s->attacks) {
        attackers[a.attacker]++;
        victims[a.victim]++;
        types[a.type]++;
    }
    std::string type_list;
    for (const auto& [t, n] : types) {
        if (!type_list.empty()) type_list += "+";
        type_list += attack_type_name(t);
        (void)n;
    }
    return type_list + ", " + std::to_string(attackers.size()) + " attacker(s) -> " +
           std::to_string(victims.size()) + " victim(s), " + std::to_string(s->attacks.size()) +
           " attack window(s)";
}

} // namespace netbed
