#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "helpers.hpp"
#include "netbed/fabric.hpp"
#include "netbed/presets.hpp"

using namespace netbed;

namespace {

Scenario fig2a() {
    auto s = preset("fig2a-dos");
    REQUIRE(s.has_value());
    return *s;
}

Packet make_syn(const Fabric& f, int from, Ipv4Addr dst, u16 sport, u16 dport, u64 ts) {
    Packet p;
    p.ts_us = ts;
    p.origin = from;
    Ipv4Info ip;
    ip.src = f.pod(from).ip;
    ip.dst = dst;
    p.ip = ip;
    TcpInfo t;
    t.sport = sport;
    t.dport = dport;
    t.seq = 1000;
    t.flags = tcpflag::SYN;
    p.l4 = t;
    return p;
}

Packet make_udp(const Fabric& f, int from, Ipv4Addr dst, u64 ts) {
    Packet p;
    p.ts_us = ts;
    p.origin = from;
    Ipv4Info ip;
    ip.src = f.pod(from).ip;
    ip.dst = dst;
    ip.proto = 17;
    p.ip = ip;
    p.l4 = UdpInfo{40000, 9};
    p.payload = "probe";
    return p;
}


TapSet taps_in(const std::string& name) {
    TapSet t;
    t.dir = test_scratch_dir() / name;
    std::filesystem::create_directories(t.dir);
    return t;
}

} // namespace

TEST_CASE("fabric construction gives every pod an address, a MAC, and an eth interface") {
    Fabric f(fig2a());
    REQUIRE(f.pod_count() == 4);

    int nginx = f.pod_index("nginx-1");
    REQUIRE(nginx >= 0);
    CHECK(f.pod(nginx).ip.str() == "10.34.0.2");
    CHECK(f.pod(f.pod_index("hping3-1")).ip.str() == "10.33.0.2");

    std::set<std::string> macs;
    for (size_t i = 0; i < f.pod_count(); i++) {
        const auto& pr = f.pod(int(i));
        CHECK(pr.mac.bytes[0] == 0x02);
        macs.insert(pr.mac.str());
        CHECK(f.iface(pr.eth_iface).kind == IfaceKind::PodEth);
    }
    CHECK(macs.size() == 4); // all distinct

    for (const char* node : {"master", "wn1", "wn2", "wn3", "wn4"}) {
        CHECK(f.iface_index(node, IFACE_DATAPATH) >= 0);
        CHECK(f.iface_index(node, IFACE_BRIDGE) >= 0);
    }
    CHECK(f.iface_index("nas", "storage0") >= 0);
    CHECK(f.iface_index("nas", IFACE_BRIDGE) < 0); // no overlay on the sink node
}

TEST_CASE("more pods than a /24 holds is a build error") {
    Scenario s = fig2a();
    for (int i = 0; i < 251; i++) { // wn1 already hosts one pod
        PodSpec p;
        p.name = "filler-" + std::to_string(i);
        p.node = "wn1";
        p.role = PodRole::BenignClient;
        s.pods.push_back(p);
    }
    CHECK_NOTHROW(Fabric(s)); // 252 pods: still fits
    PodSpec extra1{"filler-x", "wn1", PodRole::BenignClient, {}, {}, true};
    PodSpec extra2{"filler-y", "wn1", PodRole::BenignClient, {}, {}, true};
    s.pods.push_back(extra1);
    CHECK_NOTHROW(Fabric(s)); // 253: the last address in the block
    s.pods.push_back(extra2);
    CHECK_THROWS_AS(Fabric(s), std::runtime_error);
}

TEST_CASE("a SYN toward the victim is recorded at both victim-node taps and delivered") {
    Fabric f(fig2a());
    auto taps = taps_in("fabric-syn");
    TapSink* dp = taps.add(f, "wn3", IFACE_DATAPATH);
    TapSink* br = taps.add(f, "wn3", IFACE_BRIDGE);

    int attacker = f.pod_index("hping3-1");
    Ipv4Addr victim_ip = f.pod(f.pod_index("nginx-1")).ip;
    f.inject(attacker, make_syn(f, attacker, victim_ip, 40001, 80, 1000));
    EventStats st = f.run_all();

    // SYN in and SYN-ACK out. No RST follows: flood tools firewall the
    // kernel resets their raw SYNs would otherwise draw.
    CHECK(dp->records(Direction::Ingress) == 1);
    CHECK(dp->records(Direction::Egress) == 1);
    CHECK(br->records(Direction::Ingress) == 1);
    CHECK(br->records(Direction::Egress) == 1);
    CHECK(st.injected == 2);
    CHECK(st.delivered == 2);
    CHECK(st.dropped == 0);
    CHECK(st.injected == st.delivered + st.dropped);
    CHECK(f.pod(f.pod_index("nginx-1")).counters.syns_seen == 1);
}

TEST_CASE("each hop is 0.2 ms later than the last and the delivered TTL is 63") {
    Fabric f(fig2a());
    auto taps = taps_in("fabric-hops");
    TapSink* src_dp = taps.add(f, "wn1", IFACE_DATAPATH);
    TapSink* dst_eth = taps.add(f, "wn3", "nginx-1");

    int attacker = f.pod_index("hping3-1");
    int nginx = f.pod_index("nginx-1");
    // UDP to a port nobody serves: one packet, no reactions.
    f.inject(attacker, make_udp(f, attacker, f.pod(nginx).ip, 5000));
    f.run_all();

    auto files = src_dp->finalize();
    for (const auto& file : files) {
        if (file.info.records == 0) continue;
        auto pf = std::get<PcapFile>(read_pcap(file.info.path));
        CHECK(file.info.direction == Direction::Egress);
        CHECK(pf.records[0].ts_epoch_us == SIM_EPOCH_US + 5000 + HOP_US);
        auto parsed = std::get<Packet>(parse_frame(pf.records[0].data));
        CHECK(parsed.ip->ttl == 64); // source side: not yet decremented
    }
    for (const auto& file : dst_eth->finalize()) {
        if (file.info.records == 0) continue;
        auto pf = std::get<PcapFile>(read_pcap(file.info.path));
        CHECK(file.info.direction == Direction::Ingress);
        CHECK(pf.records[0].ts_epoch_us == SIM_EPOCH_US + 5000 + 5 * HOP_US);
        auto parsed = std::get<Packet>(parse_frame(pf.records[0].data));
        CHECK(parsed.ip->ttl == 63); // decremented once at the source bridge
        CHECK(verify_frame_checksums(pf.records[0].data));
    }
}

TEST_CASE("every hop with a hook fires exactly once per packet") {
    Fabric f(fig2a());
    int attacker = f.pod_index("hping3-1");
    int nginx = f.pod_index("nginx-1");
    const char* hooked[][2] = {
        {"wn1", "hping3-1"},      {"wn1", IFACE_DATAPATH}, {"wn1", IFACE_BRIDGE},
        {"wn3", IFACE_BRIDGE},    {"wn3", IFACE_DATAPATH}, {"wn3", "nginx-1"},
    };
    for (auto& [node, iface] : hooked)
        f.attach_hook(node, iface, [](const Packet&) { return Verdict::pass(); });

    f.inject(attacker, make_udp(f, attacker, f.pod(nginx).ip, 0));
    EventStats st = f.run_all();
    CHECK(st.hook_invocations == 6);
    for (auto& [node, iface] : hooked)
        CHECK(f.iface(f.iface_index(node, iface)).hook_invocations == 1);
    CHECK(st.delivered == 1);
}

TEST_CASE("attach rejects typos and occupied interfaces") {
    Fabric f(fig2a());
    auto pass = [](const Packet&) { return Verdict::pass(); };
    CHECK_THROWS_AS(f.attach_hook("wn1", "vethwe-datapth", pass), std::invalid_argument);
    f.attach_hook("wn1", IFACE_DATAPATH, pass);
    CHECK_THROWS_AS(f.attach_hook("wn1", IFACE_DATAPATH, pass), std::logic_error);

    auto taps = taps_in("fabric-attach");
    taps.add(f, "wn3", IFACE_BRIDGE);
    TapSink again(taps.dir / "again", "wn3", IFACE_BRIDGE, 60, 65535);
    CHECK_THROWS_AS(f.attach_tap("wn3", IFACE_BRIDGE, &again), std::logic_error);
}

TEST_CASE("a drop at the source bridge leaves the datapath capture intact") {
    Fabric f(fig2a());
    auto taps = taps_in("fabric-drop");
    TapSink* src_dp = taps.add(f, "wn1", IFACE_DATAPATH);
    TapSink* src_br = taps.add(f, "wn1", IFACE_BRIDGE);
    TapSink* dst_dp = taps.add(f, "wn3", IFACE_DATAPATH);

    f.attach_hook("wn1", IFACE_BRIDGE, [](const Packet&) { return Verdict::drop(); });

    int attacker = f.pod_index("hping3-1");
    int nginx = f.pod_index("nginx-1");
    f.inject(attacker, make_syn(f, attacker, f.pod(nginx).ip, 40002, 80, 0));
    EventStats st = f.run_all();

    CHECK(src_dp->records(Direction::Egress) == 1); // before the dropping hook
    CHECK(src_br->records(Direction::Egress) == 1); // capture precedes the verdict
    CHECK(dst_dp->records(Direction::Ingress) == 0); // nothing beyond the drop
    CHECK(st.injected == 1);
    CHECK(st.delivered == 0);
    CHECK(st.dropped == 1);
    CHECK(f.pod(nginx).counters.syns_seen == 0);
}

TEST_CASE("redirect hands the packet to another pod on the node") {
    Scenario s = fig2a();
    PodSpec decoy{"decoy-1", "wn3", PodRole::BenignClient, {}, {}, true};
    s.pods.push_back(decoy);
    Fabric f(s);

    f.attach_hook("wn3", IFACE_BRIDGE, [](const Packet&) { return Verdict::redirect("decoy-1"); });

    int attacker = f.pod_index("hping3-1");
    int nginx = f.pod_index("nginx-1");
    f.inject(attacker, make_udp(f, attacker, f.pod(nginx).ip, 0));
    EventStats st = f.run_all();

    CHECK(st.delivered == 1);
    CHECK(st.dropped == 0);
    CHECK(f.pod(nginx).counters.syns_seen == 0);
}

TEST_CASE("a packet for an unallocated address dies at the source bridge") {
    Fabric f(fig2a());
    auto taps = taps_in("fabric-unroutable");
    TapSink* src_br = taps.add(f, "wn1", IFACE_BRIDGE);
    TapSink* dst_dp = taps.add(f, "wn3", IFACE_DATAPATH);

    int attacker = f.pod_index("hping3-1");
    f.inject(attacker, make_udp(f, attacker, Ipv4Addr::from_octets(10, 99, 0, 9), 0));
    EventStats st = f.run_all();

    CHECK(st.injected == 1);
    CHECK(st.delivered == 0);
    CHECK(st.dropped == 1);
    CHECK(src_br->records(Direction::Egress) == 1); // it did leave the node
    CHECK(dst_dp->records(Direction::Ingress) == 0);
}

TEST_CASE("events at the same timestamp run in insertion order") {
    Fabric f(fig2a());
    std::vector<int> order;
    f.schedule(500, [&] { order.push_back(1); });
    f.schedule(500, [&] { order.push_back(2); });
    f.schedule(400, [&] { order.push_back(0); });
    f.run_until(501);
    CHECK(order == std::vector<int>{0, 1, 2});
    CHECK(f.clock() == 501);
}

TEST_CASE("run_until leaves events at or past the target untouched") {
    Fabric f(fig2a());
    int fired = 0;
    f.schedule(1000, [&] { fired++; });
    f.run_until(1000);
    CHECK(fired == 0); // strictly ts < t
    f.run_until(1001);
    CHECK(fired == 1);
}

TEST_CASE("two same-timestamp packets appear in the capture in injection order") {
    Fabric f(fig2a());
    auto taps = taps_in("fabric-order");
    TapSink* dp = taps.add(f, "wn3", IFACE_DATAPATH);

    int attacker = f.pod_index("hping3-1");
    int nginx = f.pod_index("nginx-1");
    Packet a = make_udp(f, attacker, f.pod(nginx).ip, 777);
    a.payload = "first";
    Packet b = make_udp(f, attacker, f.pod(nginx).ip, 777);
    b.payload = "second";
    f.inject(attacker, std::move(a));
    f.inject(attacker, std::move(b));
    f.run_all();

    for (const auto& file : dp->finalize()) {
        if (file.info.records == 0) continue;
        auto pf = std::get<PcapFile>(read_pcap(file.info.path));
        REQUIRE(pf.records.size() == 2);
        auto first = std::get<Packet>(parse_frame(pf.records[0].data));
        auto second = std::get<Packet>(parse_frame(pf.records[1].data));
        CHECK(first.payload == "first");
        CHECK(second.payload == "second");
        CHECK(pf.records[0].ts_epoch_us == pf.records[1].ts_epoch_us);
    }
}

TEST_CASE("opening a connection reaches Established after exactly three segments") {
    Fabric f(fig2a());
    int client = f.pod_index("hping3-1");
    int server = f.pod_index("nginx-1");
    auto h = f.open_connection(client, server, 80);
    f.run_all();

    CHECK(h->state == ConnectionHandle::State::Established);
    CHECK(h->handshake_packets == 3);
    CHECK(h->sport == FIRST_EPHEMERAL_PORT);
    // SYN leaves at 0, arrives at 1000; SYN-ACK leaves 1050, arrives 2050.
    CHECK(h->established_ts == 2050);

    EventStats st = f.stats();
    CHECK(st.injected == 3);
    CHECK(st.injected == st.delivered + st.dropped);
}

TEST_CASE("a connection to a closed port is refused with a RST") {
    Fabric f(fig2a());
    int client = f.pod_index("hping3-1");
    int server = f.pod_index("nginx-1");
    auto h = f.open_connection(client, server, 81);
    EventStats st = f.run_all();

    CHECK(h->state == ConnectionHandle::State::Refused);
    CHECK(st.injected == 2); // SYN out, RST back
    CHECK(f.pod(client).conns.empty());
}

TEST_CASE("100 sequential connections use 100 distinct ephemeral ports") {
    Fabric f(fig2a());
    int client = f.pod_index("hulk-1");
    int server = f.pod_index("apache-1");

    std::set<u16> ports;
    for (int i = 0; i < 100; i++) {
        auto h = f.open_connection(client, server, 80);
        f.run_all();
        REQUIRE(h->state == ConnectionHandle::State::Established);
        ports.insert(h->sport);
    }
    CHECK(ports.size() == 100);
    CHECK(*ports.begin() == FIRST_EPHEMERAL_PORT);
    CHECK(f.pod(server).conns.size() == 100);
}

// A flood from the attacker's real address clears its own half-opens: the
// SYN-ACK provokes a RST from the attacker's stack. Saturating the backlog
// takes spoofed, unroutable sources, which is what these floods look like.
Packet make_spoofed_syn(const Fabric& f, int from, Ipv4Addr dst, u32 i, u64 ts) {
    Packet p = make_syn(f, from, dst, u16(1024 + (i % 60000)), 80, ts);
    p.ip->src = Ipv4Addr::from_octets(10, 88, u8(i >> 8), u8(i & 0xff));
    return p;
}

TEST_CASE("the SYN backlog caps per-victim connection state, not the replies") {
    Fabric f(fig2a());
    auto taps = taps_in("fabric-backlog");
    TapSink* dp = taps.add(f, "wn3", IFACE_DATAPATH);

    int attacker = f.pod_index("hping3-1");
    int nginx = f.pod_index("nginx-1");
    Ipv4Addr victim_ip = f.pod(nginx).ip;
    const u32 n = SYN_BACKLOG + 200;
    for (u32 i = 0; i < n; i++)
        f.inject(attacker, make_spoofed_syn(f, attacker, victim_ip, i, u64(i) * 10));
    EventStats st = f.run_all();

    CHECK(f.pod(nginx).counters.syns_seen == n);
    CHECK(f.pod(nginx).conns.size() == SYN_BACKLOG);
    CHECK(f.pod(nginx).half_open == SYN_BACKLOG);
    CHECK(dp->records(Direction::Egress) == n); // every SYN still got its SYN-ACK
    CHECK(st.dropped == n); // the SYN-ACKs die at the bridge: nowhere to go
    CHECK(st.injected == st.delivered + st.dropped);
}

TEST_CASE("a benign handshake still completes while the backlog is saturated") {
    Fabric f(fig2a());
    int attacker = f.pod_index("hping3-1");
    int nginx = f.pod_index("nginx-1");
    Ipv4Addr victim_ip = f.pod(nginx).ip;
    for (u32 i = 0; i < SYN_BACKLOG + 50; i++)
        f.inject(attacker, make_spoofed_syn(f, attacker, victim_ip, i, 0));
    f.run_until(5'000'000);

    REQUIRE(f.pod(nginx).half_open == SYN_BACKLOG);
    auto h = f.open_connection(f.pod_index("hulk-1"), nginx, 80);
    f.run_all();
    CHECK(h->state == ConnectionHandle::State::Established);
}

TEST_CASE("pods answer echo requests with matching id, seq, and payload") {
    Fabric f(fig2a());
    auto taps = taps_in("fabric-echo");
    TapSink* dp = taps.add(f, "wn3", IFACE_DATAPATH);

    int attacker = f.pod_index("hping3-1");
    int nginx = f.pod_index("nginx-1");
    Packet p;
    p.ts_us = 100;
    p.origin = attacker;
    Ipv4Info ip;
    ip.src = f.pod(attacker).ip;
    ip.dst = f.pod(nginx).ip;
    ip.proto = 1;
    p.ip = ip;
    p.l4 = IcmpInfo{8, 0, 42, 7};
    p.payload = "ping-payload";
    f.inject(attacker, std::move(p));
    f.run_all();

    CHECK(f.pod(nginx).counters.echoes_answered == 1);
    bool saw_reply = false;
    for (const auto& file : dp->finalize()) {
        if (file.info.direction != Direction::Egress || file.info.records == 0) continue;
        auto pf = std::get<PcapFile>(read_pcap(file.info.path));
        auto parsed = std::get<Packet>(parse_frame(pf.records[0].data));
        auto& ic = std::get<IcmpInfo>(parsed.l4);
        CHECK(ic.type == 0);
        CHECK(ic.id == 42);
        CHECK(ic.seq == 7);
        CHECK(parsed.payload == "ping-payload");
        saw_reply = true;
    }
    CHECK(saw_reply);
}

TEST_CASE("injection conservation holds after every run_until boundary") {
    Fabric f(fig2a());
    int attacker = f.pod_index("hping3-1");
    int nginx = f.pod_index("nginx-1");
    Ipv4Addr victim_ip = f.pod(nginx).ip;
    for (u32 i = 0; i < 50; i++)
        f.inject(attacker, make_syn(f, attacker, victim_ip, u16(2000 + i), 80, u64(i) * 100));
    f.inject(attacker, make_udp(f, attacker, Ipv4Addr::from_octets(10, 99, 0, 1), 300));

    for (u64 t : {1ull, 1000ull, 2500ull, 4000ull, 10'000'000ull}) {
        EventStats st = f.run_until(t);
        CHECK(st.injected == st.delivered + st.dropped);
    }
    EventStats st = f.run_all();
    CHECK(st.injected == st.delivered + st.dropped);
    CHECK(st.injected == 101); // 50 SYNs + 50 SYN-ACKs + 1 unroutable
    CHECK(st.dropped == 1);
}

TEST_CASE("identical seeds produce byte-identical victim-side captures") {
    auto run_once = [](const std::string& tag) {
        Fabric f(fig2a());
        auto taps = taps_in("fabric-determinism-" + tag);
        taps.add(f, "wn3", IFACE_DATAPATH);
        int attacker = f.pod_index("hping3-1");
        int nginx = f.pod_index("nginx-1");
        for (u32 i = 0; i < 40; i++)
            f.inject(attacker,
                     make_syn(f, attacker, f.pod(nginx).ip, u16(3000 + i), 80, u64(i) * 33));
        f.open_connection(f.pod_index("hulk-1"), f.pod_index("apache-1"), 80);
        f.run_all();
        std::map<std::string, std::string> hashes;
        for (const auto& file : taps.sinks[0]->finalize()) hashes[file.info.file] = file.info.sha256;
        return hashes;
    };
    CHECK(run_once("a") == run_once("b"));
}

TEST_CASE("injecting with a mismatched origin is rejected") {
    Fabric f(fig2a());
    int attacker = f.pod_index("hping3-1");
    Packet p = make_udp(f, attacker, f.pod(f.pod_index("nginx-1")).ip, 0);
    CHECK_THROWS_AS(f.inject(f.pod_index("hulk-1"), std::move(p)), std::logic_error);
}
