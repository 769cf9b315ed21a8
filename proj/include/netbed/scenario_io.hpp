#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "netbed/scenario.hpp"

namespace netbed {

struct IoError {
    std::string message;
};

namespace scenario_io_detail {

using nlohmann::json;

struct Ctx {
    std::string error;

    bool fail(const std::string& path, const std::string& msg) {
        if (error.empty()) error = path + ": " + msg;
        return false;
    }
};

inline bool check_keys(Ctx& c, const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) return c.fail(path, "unknown key '" + it.key() + "'");
    }
    return true;
}

inline bool get_string(Ctx& c, const json& obj, const std::string& path, const char* key,
                       std::string& out, bool required) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (required) return c.fail(path, std::string("missing key '") + key + "'");
        return true;
    }
    if (!it->is_string()) return c.fail(path + "." + key, "expected a string");
    out = it->get<std::string>();
    return true;
}

inline bool get_u64(Ctx& c, const json& obj, const std::string& path, const char* key, u64& out,
                    bool required) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (required) return c.fail(path, std::string("missing key '") + key + "'");
        return true;
    }
    if (!it->is_number_unsigned()) return c.fail(path + "." + key, "expected a non-negative integer");
    out = it->get<u64>();
    return true;
}

inline bool get_f64(Ctx& c, const json& obj, const std::string& path, const char* key, double& out,
                    bool& present) {
    present = false;
    auto it = obj.find(key);
    if (it == obj.end()) return true;
    if (!it->is_number()) return c.fail(path + "." + key, "expected a number");
    out = it->get<double>();
    present = true;
    return true;
}

inline bool get_bool(Ctx& c, const json& obj, const std::string& path, const char* key, bool& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return true;
    if (!it->is_boolean()) return c.fail(path + "." + key, "expected a boolean");
    out = it->get<bool>();
    return true;
}

inline bool parse_node(Ctx& c, const json& j, const std::string& path, NodeSpec& n) {
    if (!j.is_object()) return c.fail(path, "expected an object");
    if (!check_keys(c, j, path, {"name", "subnet", "storage_addr", "storage"})) return false;
    if (!get_string(c, j, path, "name", n.name, true)) return false;
    std::string subnet;
    if (!get_string(c, j, path, "subnet", subnet, false)) return false;
    if (!subnet.empty()) {
        auto cidr = Cidr::parse(subnet);
        if (!cidr) return c.fail(path + ".subnet", "'" + subnet + "' is not a CIDR block");
        n.subnet = *cidr;
    }
    std::string sa;
    if (!get_string(c, j, path, "storage_addr", sa, false)) return false;
    if (!sa.empty()) {
        auto a = Ipv4Addr::parse(sa);
        if (!a) return c.fail(path + ".storage_addr", "'" + sa + "' is not an IPv4 address");
        n.storage_addr = *a;
    }
    if (!get_bool(c, j, path, "storage", n.storage)) return false;
    return true;
}

inline bool parse_pod(Ctx& c, const json& j, const std::string& path, PodSpec& p) {
    if (!j.is_object()) return c.fail(path, "expected an object");
    if (!check_keys(c, j, path, {"name", "node", "role", "address", "ports", "vulnerable"}))
        return false;
    if (!get_string(c, j, path, "name", p.name, true)) return false;
    if (!get_string(c, j, path, "node", p.node, true)) return false;
    std::string role;
    if (!get_string(c, j, path, "role", role, true)) return false;
    auto r = role_from_name(role);
    if (!r) return c.fail(path + ".role", "unknown role '" + role + "'");
    p.role = *r;
    std::string addr;
    if (!get_string(c, j, path, "address", addr, false)) return false;
    if (!addr.empty()) {
        auto a = Ipv4Addr::parse(addr);
        if (!a) return c.fail(path + ".address", "'" + addr + "' is not an IPv4 address");
        p.address = *a;
    }
    if (auto it = j.find("ports"); it != j.end()) {
        if (!it->is_array()) return c.fail(path + ".ports", "expected an array");
        for (std::size_t i = 0; i < it->size(); i++) {
            const json& e = (*it)[i];
            if (!e.is_number_unsigned() || e.get<u64>() == 0 || e.get<u64>() > 65535)
                return c.fail(path + ".ports[" + std::to_string(i) + "]",
                              "expected a port number in 1..65535");
            p.ports.push_back(u16(e.get<u64>()));
        }
    }
    if (!get_bool(c, j, path, "vulnerable", p.vulnerable)) return false;
    return true;
}

inline bool parse_attack(Ctx& c, const json& j, const std::string& path, AttackSpec& a) {
    if (!j.is_object()) return c.fail(path, "expected an object");
    if (!check_keys(c, j, path,
                    {"type", "attacker", "victim", "start_s", "duration_s", "params"}))
        return false;
    std::string type;
    if (!get_string(c, j, path, "type", type, true)) return false;
    auto t = attack_type_from_name(type);
    if (!t) return c.fail(path + ".type", "unknown attack type '" + type + "'");
    a.type = *t;
    if (!get_string(c, j, path, "attacker", a.attacker, true)) return false;
    if (!get_string(c, j, path, "victim", a.victim, true)) return false;
    bool present = false;
    double v = 0;
    if (!get_f64(c, j, path, "start_s", v, present)) return false;
    if (present) a.start_s = v;
    if (!get_f64(c, j, path, "duration_s", v, present)) return false;
    if (present) a.duration_s = v;
    if (auto it = j.find("params"); it != j.end()) {
        if (!it->is_object()) return c.fail(path + ".params", "expected an object");
        for (auto p = it->begin(); p != it->end(); ++p) {
            const json& val = p.value();
            if (val.is_string())
                a.params[p.key()] = val.get<std::string>();
            else if (val.is_boolean())
                a.params[p.key()] = val.get<bool>() ? "true" : "false";
            else if (val.is_number())
                a.params[p.key()] = val.dump();
            else
                return c.fail(path + ".params." + p.key(), "expected a scalar");
        }
    }
    return true;
}

inline bool parse_capture(Ctx& c, const json& j, const std::string& path, CaptureSpec& cap) {
    if (!j.is_object()) return c.fail(path, "expected an object");
    if (!check_keys(c, j, path, {"taps", "rotation_s", "snaplen"})) return false;
    if (auto it = j.find("taps"); it != j.end()) {
        if (!it->is_array()) return c.fail(path + ".taps", "expected an array");
        for (std::size_t i = 0; i < it->size(); i++) {
            std::string tpath = path + ".taps[" + std::to_string(i) + "]";
            const json& e = (*it)[i];
            if (!e.is_object()) return c.fail(tpath, "expected an object");
            if (!check_keys(c, e, tpath, {"node", "iface"})) return false;
            TapSpec t;
            if (!get_string(c, e, tpath, "node", t.node, true)) return false;
            if (!get_string(c, e, tpath, "iface", t.iface, true)) return false;
            cap.taps.push_back(std::move(t));
        }
    }
    u64 v = cap.rotation_s;
    if (!get_u64(c, j, path, "rotation_s", v, false)) return false;
    if (v > 0xffffffffull) return c.fail(path + ".rotation_s", "value too large");
    cap.rotation_s = u32(v);
    v = cap.snaplen;
    if (!get_u64(c, j, path, "snaplen", v, false)) return false;
    if (v > 0xffffffffull) return c.fail(path + ".snaplen", "value too large");
    cap.snaplen = u32(v);
    return true;
}

} // namespace scenario_io_detail

inline std::variant<Scenario, IoError> parse_scenario_text(const std::string& text) {
    using namespace scenario_io_detail;
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded()) return IoError{"scenario: not valid JSON"};
    if (!root.is_object()) return IoError{"scenario: top level must be an object"};

    Ctx c;
    Scenario s;
    if (!check_keys(c, root, "scenario",
                    {"name", "seed", "schedule", "gap_s", "nodes", "pods", "attacks", "capture"}))
        return IoError{c.error};
    if (!get_string(c, root, "scenario", "name", s.name, true)) return IoError{c.error};
    if (!get_u64(c, root, "scenario", "seed", s.seed, false)) return IoError{c.error};
    std::string sched;
    if (!get_string(c, root, "scenario", "schedule", sched, false)) return IoError{c.error};
    if (!sched.empty()) {
        if (sched == "sequential")
            s.schedule = ScheduleMode::Sequential;
        else if (sched == "as-specified")
            s.schedule = ScheduleMode::AsSpecified;
        else
            return IoError{"scenario.schedule: expected 'sequential' or 'as-specified'"};
    }
    bool present = false;
    double gap = 0;
    if (!get_f64(c, root, "scenario", "gap_s", gap, present)) return IoError{c.error};
    if (present) s.gap_s = gap;

    if (auto it = root.find("nodes"); it != root.end()) {
        if (!it->is_array()) return IoError{"scenario.nodes: expected an array"};
        for (std::size_t i = 0; i < it->size(); i++) {
            NodeSpec n;
            if (!parse_node(c, (*it)[i], "nodes[" + std::to_string(i) + "]", n))
                return IoError{c.error};
            s.nodes.push_back(std::move(n));
        }
    }
    if (auto it = root.find("pods"); it != root.end()) {
        if (!it->is_array()) return IoError{"scenario.pods: expected an array"};
        for (std::size_t i = 0; i < it->size(); i++) {
            PodSpec p;
            if (!parse_pod(c, (*it)[i], "pods[" + std::to_string(i) + "]", p))
                return IoError{c.error};
            s.pods.push_back(std::move(p));
        }
    }
    if (auto it = root.find("attacks"); it != root.end()) {
        if (!it->is_array()) return IoError{"scenario.attacks: expected an array"};
        for (std::size_t i = 0; i < it->size(); i++) {
            AttackSpec a;
            if (!parse_attack(c, (*it)[i], "attacks[" + std::to_string(i) + "]", a))
                return IoError{c.error};
            s.attacks.push_back(std::move(a));
        }
    }
    if (auto it = root.find("capture"); it != root.end()) {
        if (!parse_capture(c, *it, "capture", s.capture)) return IoError{c.error};
    }
    return s;
}

inline std::variant<Scenario, IoError> load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return IoError{"cannot open " + path.string()};
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_scenario_text(text);
}

// Canonical serialization: keys sorted (nlohmann's default object ordering),
// two-space indent, params rendered as strings. Reparsing the output yields
// an identical scenario, which is what manifest hashing relies on.
inline std::string serialize_scenario(const Scenario& s) {
    using nlohmann::json;
    json root;
    root["name"] = s.name;
    root["seed"] = s.seed;
    root["schedule"] = s.schedule == ScheduleMode::Sequential ? "sequential" : "as-specified";
    root["gap_s"] = s.gap_s;
    root["nodes"] = json::array();
    for (const auto& n : s.nodes) {
        json j;
        j["name"] = n.name;
        if (n.subnet) j["subnet"] = n.subnet->str();
        if (n.storage_addr) j["storage_addr"] = n.storage_addr->str();
        if (n.storage) j["storage"] = true;
        root["nodes"].push_back(std::move(j));
    }
    root["pods"] = json::array();
    for (const auto& p : s.pods) {
        json j;
        j["name"] = p.name;
        j["node"] = p.node;
        j["role"] = role_name(p.role);
        if (p.address) j["address"] = p.address->str();
        if (!p.ports.empty()) j["ports"] = p.ports;
        if (!p.vulnerable) j["vulnerable"] = false;
        root["pods"].push_back(std::move(j));
    }
    root["attacks"] = json::array();
    for (const auto& a : s.attacks) {
        json j;
        j["type"] = attack_type_name(a.type);
        j["attacker"] = a.attacker;
        j["victim"] = a.victim;
        j["start_s"] = a.start_s;
        if (a.duration_s) j["duration_s"] = *a.duration_s;
        if (!a.params.empty()) {
            json params = json::object();
            for (const auto& [k, v] : a.params) params[k] = v;
            j["params"] = std::move(params);
        }
        root["attacks"].push_back(std::move(j));
    }
    json cap;
    cap["taps"] = json::array();
    for (const auto& t : s.capture.taps) cap["taps"].push_back({{"iface", t.iface}, {"node", t.node}});
    cap["rotation_s"] = s.capture.rotation_s;
    cap["snaplen"] = s.capture.snaplen;
    root["capture"] = std::move(cap);
    return root.dump(2) + "\n";
}

} // namespace netbed
