// End-to-end acceptance suite. Each criterion prints exactly one PASS or
// FAIL line; the exit code is the number of failed criteria. Library paths
// run in-process, and criterion 2 drives the installed CLI so the shipped
// binary itself is exercised at least once per attack preset.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <variant>
#include <vector>

#include "netbed/presets.hpp"
#include "netbed/runner.hpp"

using namespace netbed;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failed = 0;

void report(int id, const std::string& what, const std::vector<std::string>& problems) {
    if (problems.empty()) {
        std::printf("PASS %d: %s\n", id, what.c_str());
    } else {
        std::printf("FAIL %d: %s [%s]\n", id, what.c_str(), problems.front().c_str());
        for (std::size_t i = 1; i < problems.size() && i < 4; i++)
            std::printf("        also: %s\n", problems[i].c_str());
        g_failed++;
    }
    std::fflush(stdout);
}

double secs_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CliResult {
    int exit_code = -1;
    std::string out;
};

// Runs the CLI with stderr discarded and captures stdout.
CliResult run_cli(const std::string& cli, const std::string& args) {
    CliResult r;
    std::string cmd = cli + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int status = pclose(p);
    r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    return r;
}

std::map<std::string, std::string> porcelain(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

std::optional<PcapFile> load_pcap(const fs::path& path, std::vector<std::string>& problems) {
    auto parsed = read_pcap(path);
    if (auto* err = std::get_if<PcapReadError>(&parsed)) {
        problems.push_back(path.filename().string() + ": " + err->str());
        return std::nullopt;
    }
    return std::get<PcapFile>(std::move(parsed));
}

// Capture files for one (node, iface, direction), every rotation slot.
std::vector<fs::path> capture_files(const fs::path& run_dir, const std::string& node,
                                    const std::string& iface, const std::string& dir) {
    std::vector<fs::path> out;
    std::string prefix = node + "_" + iface + "_" + dir + "_";
    fs::path captures = run_dir / "captures";
    if (!fs::exists(captures)) return out;
    for (const auto& e : fs::directory_iterator(captures)) {
        std::string name = e.path().filename().string();
        if (name.rfind(prefix, 0) == 0) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<RunResult> run_preset(const std::string& name, u64 seed, const fs::path& out,
                                    std::vector<std::string>& problems) {
    auto sc = preset(name);
    if (!sc) {
        problems.push_back("unknown preset " + name);
        return std::nullopt;
    }
    RunOptions opts;
    opts.out = out;
    opts.seed = seed;
    auto res = run_scenario(*sc, opts);
    if (auto* err = std::get_if<RunError>(&res)) {
        problems.push_back(name + " seed " + std::to_string(seed) + ": " + err->message);
        return std::nullopt;
    }
    return std::get<RunResult>(std::move(res));
}

std::vector<std::string> attack_presets() {
    std::vector<std::string> out;
    for (const std::string& name : preset_names())
        if (name != "benign-baseline") out.push_back(name);
    return out;
}

// ---- criterion 1: preset topology counts ---------------------------------

void criterion_1() {
    std::vector<std::string> problems;
    auto t0 = Clock::now();

    auto check_matrix = [&](const std::string& name, std::size_t pairs, std::size_t victims,
                            const std::map<std::pair<std::string, std::string>, int>* dist) {
        auto sc = preset(name);
        if (!sc) {
            problems.push_back("unknown preset " + name);
            return;
        }
        std::map<std::string, std::string> node_of;
        for (const PodSpec& p : sc->pods) node_of[p.name] = p.node;
        auto matrix = flow_matrix(*sc);
        if (matrix.size() != pairs)
            problems.push_back(name + ": " + std::to_string(matrix.size()) + " pairs, want " +
                               std::to_string(pairs));
        std::set<std::string> victim_pods;
        std::map<std::pair<std::string, std::string>, int> by_nodes;
        for (const auto& e : matrix) {
            victim_pods.insert(e.victim);
            by_nodes[{node_of[e.attacker], node_of[e.victim]}]++;
        }
        if (victim_pods.size() != victims)
            problems.push_back(name + ": " + std::to_string(victim_pods.size()) +
                               " victim pods, want " + std::to_string(victims));
        if (dist && by_nodes != *dist)
            problems.push_back(name + ": node distribution off");
    };

    std::map<std::pair<std::string, std::string>, int> fig3_dist = {
        {{"wn1", "wn3"}, 3}, {{"wn1", "wn4"}, 3}, {{"wn2", "wn3"}, 3},
        {{"wn2", "wn4"}, 3}, {{"master", "wn3"}, 1}, {{"master", "wn4"}, 1},
    };
    check_matrix("fig3-large-ddos", 14, 6, &fig3_dist);
    check_matrix("fig4-large-ddos", 26, 12, nullptr);

    double el = secs_since(t0);
    if (el >= 1.0) problems.push_back("took " + std::to_string(el) + "s, limit 1s");
    report(1, "topology matrices match the large-scenario layouts", problems);
}

// ---- criterion 2: every attack preset runs end to end --------------------

void criterion_2(const std::string& cli, const fs::path& scratch) {
    std::vector<std::string> problems;
    std::set<AttackType> types_seen;

    for (const std::string& name : attack_presets()) {
        auto sc = preset(name);
        for (const AttackSpec& a : sc->attacks) types_seen.insert(a.type);
        fs::path out = scratch / "cli" / name;
        auto t0 = Clock::now();
        CliResult r = run_cli(cli, "run --preset " + name + " --out " + out.string() +
                                       " --porcelain");
        double el = secs_since(t0);
        if (r.exit_code != 0) {
            problems.push_back(name + ": exit " + std::to_string(r.exit_code));
            continue;
        }
        if (el >= 60.0)
            problems.push_back(name + ": " + std::to_string(el) + "s, limit 60s");
        auto kv = porcelain(r.out);
        u64 records = std::strtoull(kv["records"].c_str(), nullptr, 10);
        if (records == 0) problems.push_back(name + ": no labeled records");
        std::ifstream labels(out / "labels.tsv");
        std::string line;
        u64 label_lines = 0;
        while (std::getline(labels, line)) label_lines++;
        if (label_lines != records + 1)
            problems.push_back(name + ": labels.tsv has " + std::to_string(label_lines) +
                               " lines for " + std::to_string(records) + " records");
        bool any_packets = false;
        for (const auto& e : fs::directory_iterator(out / "captures"))
            if (fs::file_size(e.path()) > PCAP_GLOBAL_HEADER_LEN) any_packets = true;
        if (!any_packets) problems.push_back(name + ": all pcaps empty");
    }

    // Table rows: SYN flood serves both the DoS and DDoS entries, so ten
    // distinct types across twelve presets cover the eleven-entry catalog.
    if (types_seen.size() != 10 || types_seen.count(AttackType::Benign))
        problems.push_back("attack presets cover " + std::to_string(types_seen.size()) +
                           " types, want all 10");
    report(2, "all attack presets produce nonempty labeled datasets in under 60s", problems);
}

// ---- criterion 3: perfect labels across seeds ------------------------------

constexpr u64 SWEEP_SEEDS[3] = {101, 202, 303};

void criterion_3(const fs::path& scratch,
                 std::map<std::pair<std::string, u64>, std::string>& manifest_hash) {
    std::vector<std::string> problems;
    for (const std::string& name : preset_names()) {
        for (u64 seed : SWEEP_SEEDS) {
            fs::path out = scratch / "seeded" / (name + "-" + std::to_string(seed));
            auto res = run_preset(name, seed, out, problems);
            if (!res) continue;
            if (res->audit.coverage_percent() != 100.0)
                problems.push_back(name + " seed " + std::to_string(seed) + ": coverage " +
                                   std::to_string(res->audit.coverage_percent()));
            if (res->audit.mismatches != 0)
                problems.push_back(name + " seed " + std::to_string(seed) + ": " +
                                   std::to_string(res->audit.mismatches) + " mismatches (" +
                                   res->audit.first_mismatch + ")");
            manifest_hash[{name, seed}] = res->manifest_sha256;
        }
    }
    report(3, "every preset at 3 seeds labels with 100% coverage and 0 mismatches", problems);
}

// ---- criterion 8: deterministic manifests ----------------------------------

void criterion_8(const fs::path& scratch,
                 const std::map<std::pair<std::string, u64>, std::string>& manifest_hash) {
    std::vector<std::string> problems;
    auto hash = [&](const std::string& name, u64 seed) {
        auto it = manifest_hash.find({name, seed});
        return it == manifest_hash.end() ? std::string() : it->second;
    };
    for (const std::string& name : preset_names()) {
        fs::path out = scratch / "repeat" / name;
        auto res = run_preset(name, SWEEP_SEEDS[0], out, problems);
        if (!res) continue;
        if (res->manifest_sha256 != hash(name, SWEEP_SEEDS[0]))
            problems.push_back(name + ": same seed, different manifest");
        if (hash(name, SWEEP_SEEDS[0]) == hash(name, SWEEP_SEEDS[1]) ||
            hash(name, SWEEP_SEEDS[1]) == hash(name, SWEEP_SEEDS[2]))
            problems.push_back(name + ": different seeds, identical manifest");
    }
    report(8, "manifests are byte-stable per seed and distinct across seeds", problems);
}

// ---- criterion 4: taps record exactly what the hooks see -----------------

void criterion_4(const fs::path& scratch) {
    std::vector<std::string> problems;
    Scenario sc = *preset("fig2a-dos");
    Fabric f = build_fabric(sc);

    fs::path dir = scratch / "hooks";
    fs::create_directories(dir);
    std::vector<std::unique_ptr<TapSink>> sinks;
    for (const TapSpec& t : sc.capture.taps) {
        sinks.push_back(std::make_unique<TapSink>(dir, t.node, t.iface, sc.capture.rotation_s,
                                                  sc.capture.snaplen));
        f.attach_tap(t.node, t.iface, sinks.back().get());
        f.attach_hook(t.node, t.iface, [](const Packet&) { return Verdict::pass(); });
    }

    u64 horizon = 0;
    for (const AttackWindow& w : effective_schedule(sc)) horizon = std::max(horizon, w.end_us);
    for (std::size_t i = 0; i < sc.attacks.size(); i++) arm_attack(f, build_attack(sc, i));
    f.run_until(horizon + 2'000'000);
    f.run_all();

    for (auto& sink : sinks) {
        u64 in_records = sink->records(Direction::Ingress);
        u64 out_records = sink->records(Direction::Egress);
        std::string id = sink->node() + "/" + sink->iface();

        // Re-read the finalized pcaps so the disk contents are what is
        // compared, not the sink's own counters alone.
        std::set<std::pair<u64, std::string>> seen_in, seen_eg;
        u64 disk_in = 0, disk_eg = 0;
        for (auto& file : sink->finalize()) {
            auto pf = load_pcap(file.info.path, problems);
            if (!pf) continue;
            bool ingress = file.info.direction == Direction::Ingress;
            for (const PcapRecord& r : pf->records)
                (ingress ? seen_in : seen_eg).insert({r.ts_epoch_us, sha256_hex(r.data)});
            (ingress ? disk_in : disk_eg) += pf->records.size();
        }
        if (disk_in != in_records || disk_eg != out_records)
            problems.push_back(id + ": disk records disagree with the sink counters");

        u64 invocations = f.iface(f.iface_index(sink->node(), sink->iface())).hook_invocations;
        if (in_records + out_records != invocations)
            problems.push_back(id + ": " + std::to_string(in_records) + "+" +
                               std::to_string(out_records) + " records vs " +
                               std::to_string(invocations) + " hook invocations");
        std::vector<std::pair<u64, std::string>> overlap;
        std::set_intersection(seen_in.begin(), seen_in.end(), seen_eg.begin(), seen_eg.end(),
                              std::back_inserter(overlap));
        if (!overlap.empty())
            problems.push_back(id + ": " + std::to_string(overlap.size()) +
                               " frames in both directions");
        if (in_records + out_records == 0) problems.push_back(id + ": interface saw nothing");
    }
    report(4, "per interface, ingress and egress records partition the hook invocations",
           problems);
}

// ---- criterion 5: one-minute rotation over a 150s benign run -------------

void criterion_5(const fs::path& scratch) {
    std::vector<std::string> problems;
    Scenario sc = *preset("benign-baseline");
    sc.name = "rotation-check";
    sc.attacks.clear();
    AttackSpec benign;
    benign.type = AttackType::Benign;
    benign.attacker = "client-1";
    benign.victim = "nginx-1";
    benign.duration_s = 150.0;
    benign.params["benign_rate"] = "4";
    sc.attacks.push_back(benign);
    sc.capture.taps = {{"wn3", IFACE_DATAPATH}, {"wn3", IFACE_BRIDGE}};

    RunOptions opts;
    opts.out = scratch / "rotation";
    opts.rotation_s = 60;
    auto res = run_scenario(sc, opts);
    if (auto* err = std::get_if<RunError>(&res)) {
        problems.push_back(err->message);
        report(5, "60s rotation splits a 150s run into 3 bounded slot files", problems);
        return;
    }

    for (const std::string& iface : {std::string(IFACE_DATAPATH), std::string(IFACE_BRIDGE)}) {
        for (const std::string& dir : {std::string("in"), std::string("out")}) {
            auto files = capture_files(opts.out, "wn3", iface, dir);
            if (files.size() != 3) {
                problems.push_back(iface + " " + dir + ": " + std::to_string(files.size()) +
                                   " slot files, want 3");
                continue;
            }
            for (std::size_t slot = 0; slot < files.size(); slot++) {
                auto pf = load_pcap(files[slot], problems);
                if (!pf) continue;
                u64 lo = SIM_EPOCH_US + slot * 60'000'000ull;
                u64 hi = lo + 60'000'000ull;
                u64 out_of_slot = 0;
                for (const PcapRecord& r : pf->records)
                    if (r.ts_epoch_us < lo || r.ts_epoch_us >= hi) out_of_slot++;
                if (pf->records.empty())
                    problems.push_back(files[slot].filename().string() + ": empty slot");
                if (out_of_slot)
                    problems.push_back(files[slot].filename().string() + ": " +
                                       std::to_string(out_of_slot) + " records out of slot");
            }
        }
    }
    report(5, "60s rotation splits a 150s run into 3 bounded slot files", problems);
}

// ---- criterion 6: pcap round-trip and third-party readability ------------

void criterion_6(const fs::path& scratch) {
    std::vector<std::string> problems;

    std::vector<fs::path> corpus;
    auto pick = [&](const std::string& preset_name, const std::string& node,
                    const std::string& dir) {
        auto files = capture_files(scratch / "cli" / preset_name, node, IFACE_DATAPATH, dir);
        if (files.empty())
            problems.push_back(preset_name + ": no " + node + " " + dir + " capture");
        else
            corpus.push_back(files.front());
    };
    pick("fig2a-dos", "wn3", "in");           // raw SYN flood
    pick("fig2b-ddos-icmpflood", "wn3", "in"); // ICMP echo stream
    pick("fig2b-ddos-slowloris", "wn4", "in"); // drip-fed HTTP headers
    pick("fig2c-bruteforce", "wn3", "in");    // MySQL auth attempts
    pick("fig2d-heartbleed", "wn3", "out");   // oversized TLS heartbeats

    std::vector<u64> counts;
    for (const fs::path& path : corpus) {
        auto pf = load_pcap(path, problems);
        if (!pf) {
            counts.push_back(0);
            continue;
        }
        counts.push_back(pf->records.size());
        PcapWriter w;
        fs::path copy = scratch / "roundtrip" / path.filename();
        fs::create_directories(copy.parent_path());
        w.open(copy, pf->snaplen);
        for (const PcapRecord& r : pf->records) w.write_record(r.ts_epoch_us, r.data);
        w.close();
        std::ifstream a(path, std::ios::binary), b(copy, std::ios::binary);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        if (sa.str() != sb.str())
            problems.push_back(path.filename().string() + ": round-trip differs");
        if (pf->records.empty())
            problems.push_back(path.filename().string() + ": empty corpus file");
    }

    // Independent reader: dpkt walks every record and re-counts.
    fs::path script = scratch / "read_with_dpkt.py";
    {
        std::ofstream py(script);
        py << "import sys\nimport dpkt\n"
              "for path in sys.argv[1:]:\n"
              "    with open(path, 'rb') as f:\n"
              "        n = 0\n"
              "        for ts, buf in dpkt.pcap.Reader(f):\n"
              "            dpkt.ethernet.Ethernet(buf)\n"
              "            n += 1\n"
              "    print(n)\n";
    }
    std::string args = script.string();
    for (const fs::path& p : corpus) args += " " + p.string();
    CliResult r = run_cli("python3", args);
    if (r.exit_code != 0) {
        problems.push_back("dpkt reader exited " + std::to_string(r.exit_code));
    } else {
        std::istringstream in(r.out);
        std::string line;
        std::size_t i = 0;
        for (; std::getline(in, line); i++) {
            if (i < counts.size() && std::strtoull(line.c_str(), nullptr, 10) != counts[i])
                problems.push_back(corpus[i].filename().string() + ": dpkt counted " + line +
                                   ", we wrote " + std::to_string(counts[i]));
        }
        if (i != corpus.size()) problems.push_back("dpkt read " + std::to_string(i) + " files");
    }
    report(6, "pcaps round-trip byte-identically and parse under an independent reader",
           problems);
}

// ---- criterion 7: overlay captures and the storage plane never mix -------

void criterion_7(const fs::path& scratch) {
    std::vector<std::string> problems;

    // A fresh small run keeps the receipt and stats in hand.
    auto res = run_preset("fig2c-bruteforce", 404, scratch / "isolation", problems);
    if (res) {
        if (!res->transfer.overlay_clean())
            problems.push_back("transfer moved overlay counters");
        if (res->storage.injected != res->transfer.chunks_sent)
            problems.push_back("storage plane carried " + std::to_string(res->storage.injected) +
                               " packets for " + std::to_string(res->transfer.chunks_sent) +
                               " chunks");
        if (!res->transfer.all_ok()) problems.push_back("storage copies diverge");

        std::map<std::string, Ipv4Addr> storage_ips;
        Scenario sc = *preset("fig2c-bruteforce");
        for (const NodeSpec& n : sc.nodes)
            if (n.storage_addr) storage_ips[n.name] = *n.storage_addr;

        u64 overlay_records = 0, storage_packets = 0;
        for (const CaptureFileInfo& info : res->files) {
            auto pf = load_pcap(info.path, problems);
            if (!pf) continue;
            for (const PcapRecord& r : pf->records) {
                overlay_records++;
                auto parsed = parse_frame(r.data);
                auto* pkt = std::get_if<Packet>(&parsed);
                if (!pkt || !pkt->ip) continue;
                for (const auto& [node, ip] : storage_ips)
                    if (pkt->ip->src == ip || pkt->ip->dst == ip) storage_packets++;
                if (const TcpInfo* t = std::get_if<TcpInfo>(&pkt->l4))
                    if (t->dport == 22 || t->sport == 22) storage_packets++;
            }
        }
        if (overlay_records == 0) problems.push_back("no overlay records to scan");
        if (storage_packets != 0)
            problems.push_back(std::to_string(storage_packets) +
                               " storage-plane packets in overlay captures");
    }
    report(7, "overlay captures hold zero storage-plane packets and vice versa", problems);
}

// ---- criterion 9: per-attack spot checks ----------------------------------

struct PayloadScan {
    u64 toward_port = 0;   // TCP packets addressed to the victim port
    u64 syn_only = 0;      // of those, flag byte exactly SYN
    u64 http_responses = 0;
    std::vector<u64> heartbeat_req, heartbeat_resp;
    u64 auth_attempts = 0;
};

void scan_files(const std::vector<fs::path>& files, u16 port, PayloadScan& s,
                std::vector<std::string>& problems) {
    for (const fs::path& path : files) {
        auto pf = load_pcap(path, problems);
        if (!pf) continue;
        for (const PcapRecord& r : pf->records) {
            auto parsed = parse_frame(r.data);
            auto* pkt = std::get_if<Packet>(&parsed);
            if (!pkt) continue;
            const TcpInfo* t = std::get_if<TcpInfo>(&pkt->l4);
            if (!t) continue;
            const std::string& pay = pkt->payload;
            if (t->dport == port) {
                s.toward_port++;
                if (t->flags == tcpflag::SYN) s.syn_only++;
                if (pay.size() >= 8 && u8(pay[0]) == 24 && u8(pay[5]) == 1)
                    s.heartbeat_req.push_back(pay.size());
                if (pay.rfind("AUTH ", 0) == 0) s.auth_attempts++;
            }
            if (t->sport == port) {
                if (pay.rfind("HTTP/1.", 0) == 0) s.http_responses++;
                if (pay.size() >= 8 && u8(pay[0]) == 24 && u8(pay[5]) == 2)
                    s.heartbeat_resp.push_back(pay.size());
            }
        }
    }
}

void criterion_9(const fs::path& scratch) {
    std::vector<std::string> problems;
    auto t0 = Clock::now();

    // (a) SYN flood purity at the victims.
    {
        PayloadScan s;
        for (const char* node : {"wn3", "wn4"})
            scan_files(capture_files(scratch / "cli" / "fig2b-ddos-synflood", node,
                                     IFACE_DATAPATH, "in"),
                       80, s, problems);
        if (s.toward_port == 0) problems.push_back("synflood: no packets toward port 80");
        else if (double(s.syn_only) < 0.99 * double(s.toward_port))
            problems.push_back("synflood: " + std::to_string(s.syn_only) + "/" +
                               std::to_string(s.toward_port) + " SYN-only");
    }

    // (b) Heartbeat over-read is exactly claimed minus actual.
    {
        Scenario sc = *preset("fig2d-heartbleed");
        GeneratorConfig cfg = GeneratorConfig::from_params(sc.attacks[0].params);
        u64 over = cfg.heartbeat_claimed_len - cfg.heartbeat_actual_len;
        PayloadScan s;
        for (const char* node : {"wn3", "wn4"}) {
            scan_files(capture_files(scratch / "cli" / "fig2d-heartbleed", node, IFACE_DATAPATH,
                                     "in"),
                       443, s, problems);
            scan_files(capture_files(scratch / "cli" / "fig2d-heartbleed", node, IFACE_DATAPATH,
                                     "out"),
                       443, s, problems);
        }
        if (s.heartbeat_req.empty() || s.heartbeat_resp.empty()) {
            problems.push_back("heartbleed: heartbeat records missing");
        } else {
            u64 req = s.heartbeat_req.front(), resp = s.heartbeat_resp.front();
            for (u64 v : s.heartbeat_req)
                if (v != req) problems.push_back("heartbleed: request sizes vary");
            for (u64 v : s.heartbeat_resp)
                if (v != resp) problems.push_back("heartbleed: response sizes vary");
            if (resp - req != over)
                problems.push_back("heartbleed: response exceeds request by " +
                                   std::to_string(resp - req) + ", want " + std::to_string(over));
        }
    }

    // (c) Slowloris starves the server: nothing ever gets answered.
    {
        PayloadScan s;
        for (const char* node : {"wn3", "wn4"})
            scan_files(capture_files(scratch / "cli" / "fig2b-ddos-slowloris", node,
                                     IFACE_DATAPATH, "out"),
                       80, s, problems);
        if (s.http_responses != 0)
            problems.push_back("slowloris: " + std::to_string(s.http_responses) +
                               " HTTP responses served");
    }

    // (d) Brute force stops at the true pair: index 7 means 8 attempts.
    {
        Scenario sc = *preset("fig2c-bruteforce");
        sc.attacks[0].params["true_index"] = "7";
        RunOptions opts;
        opts.out = scratch / "brute8";
        auto res = run_scenario(sc, opts);
        if (auto* err = std::get_if<RunError>(&res)) {
            problems.push_back("bruteforce: " + err->message);
        } else {
            PayloadScan s;
            scan_files(capture_files(opts.out, "wn3", IFACE_DATAPATH, "in"), 3306, s, problems);
            if (s.auth_attempts != 8)
                problems.push_back("bruteforce: " + std::to_string(s.auth_attempts) +
                                   " attempts, want 8");
        }
    }

    double el = secs_since(t0);
    if (el >= 30.0) problems.push_back("took " + std::to_string(el) + "s, limit 30s");
    report(9, "flood purity, over-read size, starved server, and attempt count all match",
           problems);
}

} // namespace

int main(int argc, char** argv) {
    std::string cli;
    for (int i = 1; i + 1 < argc; i++)
        if (std::strcmp(argv[i], "--cli") == 0) cli = argv[i + 1];
    if (cli.empty()) {
        std::fprintf(stderr, "usage: %s --cli <path-to-netbed>\n", argv[0]);
        return 64;
    }

    fs::path scratch = fs::temp_directory_path() / "netbed-acceptance";
    std::error_code ec;
    fs::remove_all(scratch, ec);
    fs::create_directories(scratch);

    criterion_1();
    criterion_2(cli, scratch);
    std::map<std::pair<std::string, u64>, std::string> manifest_hash;
    criterion_3(scratch, manifest_hash);
    criterion_4(scratch);
    criterion_5(scratch);
    criterion_6(scratch);
    criterion_7(scratch);
    criterion_8(scratch, manifest_hash);
    criterion_9(scratch);

    if (g_failed) std::printf("%d of 9 criteria failed\n", g_failed);
    else std::printf("all 9 criteria passed\n");
    return g_failed;
}
