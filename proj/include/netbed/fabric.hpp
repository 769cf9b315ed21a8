#pragma once

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netbed/capture.hpp"
#include "netbed/hash.hpp"
#include "netbed/packet.hpp"
#include "netbed/rng.hpp"
#include "netbed/scenario.hpp"

namespace netbed {

// Timing model. Every interface hop adds HOP_US; a pod that reacts to a
// delivered packet emits its reply TURNAROUND_US later. Both are fixed so the
// same scenario and seed always produce the same trace.
constexpr u64 HOP_US = 200;
constexpr u64 TURNAROUND_US = 50;
constexpr u32 SYN_BACKLOG = 4096;
constexpr u16 FIRST_EPHEMERAL_PORT = 49152;

enum class IfaceKind : u8 { PodEth, VethDatapath, VethBridge, StoragePlane };

inline const char* iface_kind_name(IfaceKind k) {
    switch (k) {
        case IfaceKind::PodEth: return "pod-eth";
        case IfaceKind::VethDatapath: return "veth-datapath";
        case IfaceKind::VethBridge: return "veth-bridge";
        case IfaceKind::StoragePlane: return "storage-plane";
    }
    return "?";
}

struct Interface {
    std::string node;
    std::string name;
    IfaceKind kind = IfaceKind::PodEth;
    int pod = -1; // owning pod for PodEth ifaces
    HookProgram hook;
    TapSink* tap = nullptr;
    u64 hook_invocations = 0;
};

struct EventStats {
    u64 injected = 0;
    u64 delivered = 0;
    u64 dropped = 0;
    u64 hook_invocations = 0;
};

// TCP connection state held by one endpoint. Both ends of a live connection
// have their own Endpoint in their pod's table.
enum class ConnState : u8 { SynSent, SynReceived, Established, FinWait, LastAck, Closed };

struct ConnKey {
    Ipv4Addr peer_ip;
    u16 peer_port = 0;
    u16 local_port = 0;

    auto operator<=>(const ConnKey&) const = default;
};

struct ConnectionHandle {
    enum class State : u8 { Opening, Established, Refused, Closed };
    State state = State::Opening;
    int client_pod = -1;
    int server_pod = -1;
    u16 sport = 0;
    u16 dport = 0;
    u64 established_ts = 0;
    u64 handshake_packets = 0; // client-side segments seen or sent before Established
};

class Fabric;
struct Endpoint;

// Client-side behavior attached to a connection (one HTTP exchange, a slow
// tool, a credential attempt, ...). The fabric drives the callbacks; the
// script consumes Endpoint::rx and emits through Fabric::send_tcp/send_tls.
struct ConnScript {
    virtual ~ConnScript() = default;
    virtual void on_established(Fabric&, Endpoint&, u64 now) { (void)now; }
    virtual void on_data(Fabric&, Endpoint&, u64 now) { (void)now; }
    virtual void on_peer_fin(Fabric&, Endpoint&, u64 now) { (void)now; }
    virtual void on_refused(Fabric&, Endpoint&, u64 now) { (void)now; }
};

struct HttpConnView {
    std::string tx;       // response bytes queued for the peer
    size_t tx_off = 0;    // next unsent byte
    u32 unacked_end = 0;  // seq after the in-flight chunk, 0 when idle
    bool in_flight = false;
};

struct Endpoint {
    ConnState state = ConnState::Closed;
    int self_pod = -1;
    int peer_pod = -1;
    Ipv4Addr local_ip, remote_ip;
    u16 local_port = 0, remote_port = 0;
    u32 snd_nxt = 0;
    u32 rcv_nxt = 0;
    u16 adv_window = 65535; // what we advertise
    u16 peer_window = 65535;
    bool defer_ack = false; // script produces its own ACKs (slow read)
    bool fin_sent = false;
    bool peer_fin = false;
    std::string rx; // assembled in-order bytes not yet consumed
    u64 opened_ts = 0;
    u64 last_activity = 0;
    Cause last_cause;
    bool acked_current = false; // a segment sent during this dispatch already carries the ACK
    std::shared_ptr<ConnScript> script;
    std::shared_ptr<ConnectionHandle> handle;
    HttpConnView http;
    bool mysql_greeted = false;
};

struct VictimCounters {
    u64 requests_completed = 0; // full HTTP requests received (headers + body)
    u64 responses_sent = 0;
    u64 auth_attempts = 0;
    u64 auth_successes = 0;
    u64 heartbeats_seen = 0;
    u64 bytes_overread = 0;
    u64 syns_seen = 0;
    u64 echoes_answered = 0;
};

enum class ServiceKind : u8 { None, Http, MysqlAuth, TlsHeartbeat };

struct PodRuntime {
    int index = -1;
    const PodSpec* spec = nullptr;
    Ipv4Addr ip;
    Mac mac;
    int eth_iface = -1;
    ServiceKind service = ServiceKind::None;
    bool vulnerable = true;
    std::string server_banner;    // Server: header value for HTTP flavors
    std::string mysql_user, mysql_pass;
    std::string tls_memory;       // heap image a vulnerable heartbeat leaks from
    std::map<ConnKey, Endpoint> conns;
    u16 next_ephemeral = FIRST_EPHEMERAL_PORT;
    u32 half_open = 0;
    VictimCounters counters;

    bool listening(u16 port) const {
        if (service == ServiceKind::None) return false;
        for (u16 p : spec->ports)
            if (p == port) return true;
        return false;
    }
};

struct StorageStats {
    u64 injected = 0;
    u64 delivered = 0;
    u64 dropped = 0;
};

namespace detail {

struct Event {
    u64 ts = 0;
    u64 seq = 0;
    std::function<void()> fn;
};

// Binary min-heap keyed on (ts, seq). seq is the global insertion counter, so
// events at the same timestamp run in the order they were scheduled.
class EventQueue {
public:
    bool empty() const { return heap_.empty(); }
    size_t size() const { return heap_.size(); }
    const Event& top() const { return heap_.front(); }

    void push(Event e) {
        heap_.push_back(std::move(e));
        size_t i = heap_.size() - 1;
        while (i > 0) {
            size_t parent = (i - 1) / 2;
            if (!before(heap_[i], heap_[parent])) break;
            std::swap(heap_[i], heap_[parent]);
            i = parent;
        }
    }

    Event pop() {
        Event out = std::move(heap_.front());
        heap_.front() = std::move(heap_.back());
        heap_.pop_back();
        size_t i = 0, n = heap_.size();
        while (true) {
            size_t l = 2 * i + 1, r = l + 1, m = i;
            if (l < n && before(heap_[l], heap_[m])) m = l;
            if (r < n && before(heap_[r], heap_[m])) m = r;
            if (m == i) break;
            std::swap(heap_[i], heap_[m]);
            i = m;
        }
        return out;
    }

private:
    static bool before(const Event& a, const Event& b) {
        if (a.ts != b.ts) return a.ts < b.ts;
        return a.seq < b.seq;
    }
    std::vector<Event> heap_;
};

} // namespace detail

// Initial sequence numbers are a pure function of seed and 4-tuple, so both
// the endpoint machinery and precomputed attack emissions agree on them.
inline u32 tcp_iss(u64 seed, Ipv4Addr local, u16 lport, Ipv4Addr remote, u16 rport,
                   bool server_side) {
    char buf[64];
    int n = std::snprintf(buf, sizeof buf, "iss/%u:%u/%u:%u/%llu/%d", local.value, lport,
                          remote.value, rport, (unsigned long long)seed, server_side ? 1 : 0);
    return u32(fnv1a64(std::string_view(buf, size_t(n))));
}

inline Mac pod_mac(const std::string& node, const std::string& pod) {
    u64 h = fnv1a64(node + "/" + pod);
    Mac m;
    m.bytes[0] = 0x02; // locally administered, unicast
    for (int i = 1; i < 6; i++) m.bytes[i] = u8(h >> (8 * (6 - i)));
    return m;
}

class Fabric {
public:
    explicit Fabric(const Scenario& sc) : sc_(sc), rng_(derive_rng(sc.seed, fnv1a64("fabric"))) {
        build();
    }

    // Pod runtimes hold pointers into sc_ and event closures capture `this`.
    Fabric(const Fabric&) = delete;
    Fabric& operator=(const Fabric&) = delete;

    const Scenario& scenario() const { return sc_; }
    u64 clock() const { return clock_; }
    u64 seed() const { return sc_.seed; }
    const EventStats& stats() const { return stats_; }
    const StorageStats& storage_stats() const { return storage_stats_; }

    int pod_index(const std::string& name) const {
        auto it = pod_by_name_.find(name);
        return it == pod_by_name_.end() ? -1 : it->second;
    }
    const PodRuntime& pod(int i) const { return pods_.at(size_t(i)); }
    PodRuntime& pod_mut(int i) { return pods_.at(size_t(i)); }
    size_t pod_count() const { return pods_.size(); }

    int iface_index(const std::string& node, const std::string& name) const {
        auto it = iface_by_id_.find({node, name});
        return it == iface_by_id_.end() ? -1 : it->second;
    }
    const Interface& iface(int i) const { return ifaces_.at(size_t(i)); }
    size_t iface_count() const { return ifaces_.size(); }

    void attach_hook(const std::string& node, const std::string& name, HookProgram prog) {
        int i = iface_index(node, name);
        if (i < 0) throw std::invalid_argument("no interface " + name + " on " + node);
        if (ifaces_[size_t(i)].hook)
            throw std::logic_error("interface " + name + " on " + node + " already has a hook");
        ifaces_[size_t(i)].hook = std::move(prog);
    }

    void attach_tap(const std::string& node, const std::string& name, TapSink* sink) {
        int i = iface_index(node, name);
        if (i < 0) throw std::invalid_argument("no interface " + name + " on " + node);
        if (ifaces_[size_t(i)].tap)
            throw std::logic_error("interface " + name + " on " + node + " already has a tap");
        ifaces_[size_t(i)].tap = sink;
    }

    // MySQL victims learn the one accepted credential pair from the scenario
    // (the runner wires it from the brute-force attack parameters).
    void set_mysql_credentials(int pod, std::string user, std::string pass) {
        pods_.at(size_t(pod)).mysql_user = std::move(user);
        pods_.at(size_t(pod)).mysql_pass = std::move(pass);
    }

    void schedule(u64 ts, std::function<void()> fn) {
        if (ts < clock_) throw std::logic_error("scheduling into the past");
        queue_.push(detail::Event{ts, next_seq_++, std::move(fn)});
    }

    // Queues a packet emitted by from_pod. The packet rides the overlay from
    // its timestamp on; origin must already identify the emitting pod.
    void inject(int from_pod, Packet p) {
        if (p.origin != from_pod) throw std::logic_error("inject: packet origin != from_pod");
        if (p.ts_us < clock_) throw std::logic_error("inject: timestamp in the past");
        u64 ts = p.ts_us;
        schedule(ts, [this, pkt = std::move(p)]() mutable { traverse(std::move(pkt)); });
    }

    // Node-to-node traffic on the storage plane. Kept apart from the overlay:
    // separate path, separate counters, never visible to overlay taps.
    void inject_storage(const std::string& from_node, const std::string& to_node, Packet p) {
        if (p.ts_us < clock_) throw std::logic_error("inject_storage: timestamp in the past");
        schedule(p.ts_us, [this, from_node, to_node, pkt = std::move(p)]() mutable {
            traverse_storage(from_node, to_node, std::move(pkt));
        });
    }

    void set_storage_handler(const std::string& node, std::function<void(Packet&&)> fn) {
        storage_handlers_[node] = std::move(fn);
    }

    std::shared_ptr<ConnectionHandle> open_connection(int client, int server, u16 dport,
                                                      std::shared_ptr<ConnScript> script = nullptr,
                                                      const Cause& cause = Cause{},
                                                      u16 adv_window = 65535) {
        PodRuntime& c = pods_.at(size_t(client));
        PodRuntime& s = pods_.at(size_t(server));
        u16 sport = alloc_ephemeral(c);
        auto handle = std::make_shared<ConnectionHandle>();
        handle->client_pod = client;
        handle->server_pod = server;
        handle->sport = sport;
        handle->dport = dport;

        ConnKey key{s.ip, dport, sport};
        Endpoint& ep = c.conns[key];
        ep.state = ConnState::SynSent;
        ep.self_pod = client;
        ep.peer_pod = server;
        ep.local_ip = c.ip;
        ep.remote_ip = s.ip;
        ep.local_port = sport;
        ep.remote_port = dport;
        ep.snd_nxt = tcp_iss(sc_.seed, c.ip, sport, s.ip, dport, false);
        ep.adv_window = adv_window;
        ep.opened_ts = clock_;
        ep.last_cause = cause;
        ep.script = std::move(script);
        ep.handle = handle;

        send_tcp(ep, tcpflag::SYN, "", cause, clock_);
        handle->handshake_packets = 1;
        return handle;
    }

    // Runs every queued event with ts < t, then parks the clock at t. The
    // counters settle when a packet's traversal processes, so conservation
    // (injected == delivered + dropped) holds at every boundary.
    EventStats run_until(u64 t) {
        if (t < clock_) throw std::logic_error("run_until: target before current clock");
        while (!queue_.empty() && queue_.top().ts < t) step();
        clock_ = t;
        return stats_;
    }

    EventStats run_all() {
        while (!queue_.empty()) step();
        return stats_;
    }

    bool idle() const { return queue_.empty(); }

    // Emits one TCP segment on an established-or-opening connection and
    // advances the local send sequence. ts must be now or later.
    void send_tcp(Endpoint& ep, u8 flags, std::string payload, const Cause& cause, u64 ts) {
        Packet p = frame_for(ep, flags, cause, ts);
        p.payload = std::move(payload);
        u32 adv = u32(p.payload.size());
        if (flags & (tcpflag::SYN | tcpflag::FIN)) adv += 1;
        std::get<TcpInfo>(p.l4).seq = ep.snd_nxt;
        ep.snd_nxt += adv;
        if (flags & tcpflag::ACK) ep.acked_current = true;
        inject(ep.self_pod, std::move(p));
    }

    // Emits one TLS record as a TCP segment; sequence space advances by the
    // record's wire length (5-byte header + body).
    void send_tls(Endpoint& ep, u8 content_type, std::string body, const Cause& cause, u64 ts) {
        Packet p = frame_for(ep, tcpflag::ACK | tcpflag::PSH, cause, ts);
        TcpInfo tcp = std::get<TcpInfo>(p.l4);
        TlsRecordInfo rec;
        rec.tcp = tcp;
        rec.content_type = content_type;
        rec.body.assign(body.begin(), body.end());
        u64 wire = tls_record_bytes(rec).size();
        p.l4 = rec;
        ep.snd_nxt += u32(wire);
        ep.acked_current = true;
        inject(ep.self_pod, std::move(p));
    }

    // Graceful close from our side: FIN goes out, the peer's FIN/ACK finishes
    // the exchange through the normal dispatch path.
    void close_conn(Endpoint& ep, const Cause& cause, u64 ts) {
        if (ep.fin_sent) return;
        ep.fin_sent = true;
        ep.state = ConnState::FinWait;
        send_tcp(ep, tcpflag::FIN | tcpflag::ACK, "", cause, ts);
    }

    Endpoint* find_conn(int pod, const ConnKey& key) {
        auto& conns = pods_.at(size_t(pod)).conns;
        auto it = conns.find(key);
        return it == conns.end() ? nullptr : &it->second;
    }

private:
    friend struct FabricTestPeer;

    // ---- construction ----

    void build() {
        auto violations = validate(sc_);
        if (!violations.empty())
            throw std::invalid_argument("scenario does not validate: " + violations.front().str());

        auto addrs = assign_addresses(sc_);

        for (const NodeSpec& n : sc_.nodes) {
            if (n.storage) continue;
            add_iface(n.name, IFACE_DATAPATH, IfaceKind::VethDatapath, -1);
            add_iface(n.name, IFACE_BRIDGE, IfaceKind::VethBridge, -1);
        }
        for (const NodeSpec& n : sc_.nodes)
            if (n.storage_addr || n.storage)
                add_iface(n.name, "storage0", IfaceKind::StoragePlane, -1);

        std::map<std::string, u32> per_node;
        pods_.resize(sc_.pods.size());
        for (size_t i = 0; i < sc_.pods.size(); i++) {
            const PodSpec& ps = sc_.pods[i];
            if (++per_node[ps.node] > 253)
                throw std::runtime_error("subnet exhausted on node " + ps.node +
                                         " (more than 253 pods)");
            PodRuntime& pr = pods_[i];
            pr.index = int(i);
            pr.spec = &ps;
            pr.ip = addrs.at(int(i));
            pr.mac = pod_mac(ps.node, ps.name);
            pr.eth_iface = add_iface(ps.node, ps.name, IfaceKind::PodEth, int(i));
            pod_by_name_[ps.name] = int(i);
            routes_[pr.ip.value] = int(i);
            init_service(pr);
        }
    }

    int add_iface(const std::string& node, const std::string& name, IfaceKind kind, int pod) {
        Interface ifc;
        ifc.node = node;
        ifc.name = name;
        ifc.kind = kind;
        ifc.pod = pod;
        int idx = int(ifaces_.size());
        ifaces_.push_back(std::move(ifc));
        iface_by_id_[{node, name}] = idx;
        return idx;
    }

    void init_service(PodRuntime& pr) {
        switch (pr.spec->role) {
            case PodRole::Nginx:
                pr.service = ServiceKind::Http;
                pr.server_banner = "nginx/1.21.6";
                break;
            case PodRole::Apache:
                pr.service = ServiceKind::Http;
                pr.server_banner = "Apache/2.4.52 (Ubuntu)";
                break;
            case PodRole::Mysql:
                pr.service = ServiceKind::MysqlAuth;
                pr.mysql_user = "root";
                pr.mysql_pass = "changeme";
                break;
            case PodRole::TlsServer:
                pr.service = ServiceKind::TlsHeartbeat;
                pr.vulnerable = pr.spec->vulnerable;
                pr.server_banner = "Apache/2.4.52 (Ubuntu) OpenSSL/1.0.1f";
                pr.tls_memory = make_tls_memory(pr);
                break;
            default:
                pr.service = ServiceKind::None;
                break;
        }
    }

    // Deterministic stand-in for process heap contents. Mostly alphanumeric
    // filler with recognizable secrets planted at fixed strides, so leaked
    // bytes look like something worth stealing.
    std::string make_tls_memory(const PodRuntime& pr) {
        Pcg32 rng = derive_rng(sc_.seed, fnv1a64("tls-memory/" + pr.spec->name));
        static const char alnum[] =
            "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
        std::string mem(66048, '\0');
        for (auto& ch : mem) ch = alnum[rng.next_below(sizeof alnum - 1)];
        for (size_t off = 1024; off + 64 < mem.size(); off += 4096) {
            char secret[64];
            int n = std::snprintf(secret, sizeof secret, " session=%08x; user=admin; pass=%08x ",
                                  rng.next(), rng.next());
            mem.replace(off, size_t(n), secret, size_t(n));
        }
        return mem;
    }

    // ---- event loop ----

    void step() {
        detail::Event ev = queue_.pop();
        clock_ = ev.ts;
        ev.fn();
    }

    // ---- overlay traversal ----

    struct Hop {
        int iface;
        Direction dir;
        bool decremented; // packet already passed the source bridge
    };

    void traverse(Packet&& p) {
        stats_.injected++;
        if (!p.ip) {
            stats_.dropped++;
            return;
        }
        PodRuntime& src = pods_.at(size_t(p.origin));
        if (p.src_mac == Mac{}) p.src_mac = src.mac;

        auto rit = routes_.find(p.ip->dst.value);
        int dst_pod = (rit == routes_.end() || rit->second == p.origin) ? -1 : rit->second;
        if (dst_pod >= 0) {
            if (p.dst_mac == Mac{}) p.dst_mac = pods_[size_t(dst_pod)].mac;
        } else if (p.dst_mac == Mac{}) {
            p.dst_mac = Mac{{0xff, 0xff, 0xff, 0xff, 0xff, 0xff}};
        }
        p.ip->id = ip_id_++;

        const std::string& src_node = src.spec->node;
        std::vector<Hop> hops;
        hops.push_back({src.eth_iface, Direction::Egress, false});
        hops.push_back({iface_index(src_node, IFACE_DATAPATH), Direction::Egress, false});
        hops.push_back({iface_index(src_node, IFACE_BRIDGE), Direction::Egress, false});
        if (dst_pod >= 0) {
            // Same-node delivery hairpins at the bridge, so a delivered packet
            // always crosses exactly six interface hops.
            const PodRuntime& dst = pods_[size_t(dst_pod)];
            const std::string& dst_node = dst.spec->node;
            hops.push_back({iface_index(dst_node, IFACE_BRIDGE), Direction::Ingress, true});
            hops.push_back({iface_index(dst_node, IFACE_DATAPATH), Direction::Ingress, true});
            hops.push_back({dst.eth_iface, Direction::Ingress, true});
        }

        u8 ttl_at_origin = p.ip->ttl;
        auto frame_pre = std::make_shared<const Bytes>(serialize_frame(p));
        std::shared_ptr<const Bytes> frame_post;
        if (dst_pod >= 0) {
            p.ip->ttl = u8(ttl_at_origin - 1);
            frame_post = std::make_shared<const Bytes>(serialize_frame(p));
        }

        u64 t0 = clock_;
        for (size_t k = 0; k < hops.size(); k++) {
            const Hop& hop = hops[k];
            Interface& ifc = ifaces_.at(size_t(hop.iface));
            u64 hop_ts = t0 + u64(k) * HOP_US;
            const auto& frame = hop.decremented ? frame_post : frame_pre;
            if (ifc.tap) {
                TapSink* sink = ifc.tap;
                schedule(hop_ts, [sink, dir = hop.dir, hop_ts, frame, cause = p.cause,
                                  origin = p.origin] {
                    sink->record(dir, hop_ts, *frame, cause, origin);
                });
            }
            if (ifc.hook) {
                p.ip->ttl = hop.decremented ? u8(ttl_at_origin - 1) : ttl_at_origin;
                Verdict v = ifc.hook(p);
                ifc.hook_invocations++;
                stats_.hook_invocations++;
                if (v.kind == Verdict::Drop) {
                    stats_.dropped++;
                    return;
                }
                if (v.kind == Verdict::Redirect) {
                    redirect(std::move(p), ifc.node, v.redirect_iface, hop_ts, frame);
                    return;
                }
            }
        }
        if (dst_pod < 0) {
            // No route for the destination: the packet makes it to the source
            // bridge and dies there.
            stats_.dropped++;
            return;
        }

        p.ip->ttl = u8(ttl_at_origin - 1);
        u64 deliver_ts = t0 + u64(hops.size() - 1) * HOP_US;
        stats_.delivered++;
        schedule(deliver_ts, [this, dst_pod, pkt = std::move(p)]() mutable {
            on_deliver(dst_pod, std::move(pkt));
        });
    }

    // A Redirect verdict teleports the packet to another interface on the
    // same node. Redirecting into a pod interface delivers to that pod; any
    // other target just records the packet and drops it.
    void redirect(Packet&& p, const std::string& node, const std::string& iface_name, u64 from_ts,
                  const std::shared_ptr<const Bytes>& frame) {
        int ti = iface_index(node, iface_name);
        if (ti < 0) {
            stats_.dropped++;
            return;
        }
        Interface& target = ifaces_.at(size_t(ti));
        u64 ts = from_ts + HOP_US;
        if (target.tap) {
            TapSink* sink = target.tap;
            schedule(ts, [sink, ts, frame, cause = p.cause, origin = p.origin] {
                sink->record(Direction::Ingress, ts, *frame, cause, origin);
            });
        }
        if (target.kind == IfaceKind::PodEth && target.pod >= 0) {
            stats_.delivered++;
            schedule(ts, [this, dst = target.pod, pkt = std::move(p)]() mutable {
                on_deliver(dst, std::move(pkt));
            });
        } else {
            stats_.dropped++;
        }
    }

    void traverse_storage(const std::string& from_node, const std::string& to_node, Packet&& p) {
        storage_stats_.injected++;
        int src_if = iface_index(from_node, "storage0");
        int dst_if = iface_index(to_node, "storage0");
        if (src_if < 0 || dst_if < 0) {
            storage_stats_.dropped++;
            return;
        }
        // Two hops: out the source plane interface, in at the destination.
        // (Overlay taps and hooks never see these; the planes are disjoint.)
        u64 deliver_ts = clock_ + HOP_US;
        storage_stats_.delivered++;
        schedule(deliver_ts, [this, to_node, pkt = std::move(p)]() mutable {
            auto it = storage_handlers_.find(to_node);
            if (it != storage_handlers_.end()) it->second(std::move(pkt));
        });
    }

    // ---- pod agent ----

    u16 alloc_ephemeral(PodRuntime& pod) {
        u16 port = pod.next_ephemeral;
        pod.next_ephemeral = (port == 65535) ? FIRST_EPHEMERAL_PORT : u16(port + 1);
        return port;
    }

    Packet frame_for(const Endpoint& ep, u8 flags, const Cause& cause, u64 ts) {
        Packet p;
        p.ts_us = ts;
        p.origin = ep.self_pod;
        p.cause = cause;
        Ipv4Info ip;
        ip.src = ep.local_ip;
        ip.dst = ep.remote_ip;
        ip.proto = 6;
        p.ip = ip;
        TcpInfo t;
        t.sport = ep.local_port;
        t.dport = ep.remote_port;
        t.seq = ep.snd_nxt;
        t.ack = (flags & tcpflag::ACK) ? ep.rcv_nxt : 0;
        t.flags = flags;
        t.window = ep.adv_window;
        p.l4 = t;
        return p;
    }

    // One-shot segment outside any connection (SYN-ACK for an evicted
    // half-open, RST for a closed port or a stray segment).
    void send_raw_tcp(int from_pod, Ipv4Addr dst_ip, u16 sport, u16 dport, u32 seq, u32 ack,
                      u8 flags, const Cause& cause, u64 ts) {
        PodRuntime& src = pods_.at(size_t(from_pod));
        Packet p;
        p.ts_us = ts;
        p.origin = from_pod;
        p.cause = cause;
        Ipv4Info ip;
        ip.src = src.ip;
        ip.dst = dst_ip;
        ip.proto = 6;
        p.ip = ip;
        TcpInfo t;
        t.sport = sport;
        t.dport = dport;
        t.seq = seq;
        t.ack = ack;
        t.flags = flags;
        t.window = (flags & tcpflag::RST) ? 0 : 65535;
        p.l4 = t;
        inject(from_pod, std::move(p));
    }

    void on_deliver(int dst, Packet&& p) {
        PodRuntime& pod = pods_.at(size_t(dst));
        if (!p.ip) return;

        if (const auto* ic = std::get_if<IcmpInfo>(&p.l4)) {
            if (ic->type == 8) { // echo request: every pod answers
                pod.counters.echoes_answered++;
                Packet r;
                r.ts_us = clock_ + TURNAROUND_US;
                r.origin = dst;
                r.cause = p.cause;
                Ipv4Info ip;
                ip.src = pod.ip;
                ip.dst = p.ip->src;
                ip.proto = 1;
                r.ip = ip;
                r.l4 = IcmpInfo{0, 0, ic->id, ic->seq};
                r.payload = p.payload;
                inject(dst, std::move(r));
            }
            return;
        }

        const TcpInfo* t = tcp_of(p);
        if (!t) return;
        std::string wire_payload;
        if (const auto* rec = std::get_if<TlsRecordInfo>(&p.l4)) {
            wire_payload = tls_record_bytes(*rec);
        } else {
            wire_payload = p.payload;
        }

        bool syn = t->flags & tcpflag::SYN;
        bool ack = t->flags & tcpflag::ACK;
        bool rst = t->flags & tcpflag::RST;
        u64 reply_ts = clock_ + TURNAROUND_US;

        ConnKey key{p.ip->src, t->sport, t->dport};
        auto cit = pod.conns.find(key);

        if (cit == pod.conns.end()) {
            if (rst) return;
            if (syn && !ack) {
                pod.counters.syns_seen++;
                if (!pod.listening(t->dport)) {
                    // Nothing bound there: refuse.
                    send_raw_tcp(dst, p.ip->src, t->dport, t->sport, 0, t->seq + 1,
                                 tcpflag::RST | tcpflag::ACK, p.cause, reply_ts);
                    return;
                }
                u32 iss = tcp_iss(sc_.seed, pod.ip, t->dport, p.ip->src, t->sport, true);
                if (pod.half_open < SYN_BACKLOG) {
                    Endpoint& ep = pod.conns[key];
                    ep.state = ConnState::SynReceived;
                    ep.self_pod = dst;
                    auto rt = routes_.find(p.ip->src.value);
                    ep.peer_pod = rt == routes_.end() ? -1 : rt->second;
                    ep.local_ip = pod.ip;
                    ep.remote_ip = p.ip->src;
                    ep.local_port = t->dport;
                    ep.remote_port = t->sport;
                    ep.snd_nxt = iss;
                    ep.rcv_nxt = t->seq + 1;
                    ep.peer_window = t->window;
                    ep.opened_ts = clock_;
                    ep.last_cause = p.cause;
                    pod.half_open++;
                    send_tcp(ep, tcpflag::SYN | tcpflag::ACK, "", p.cause, reply_ts);
                } else {
                    // Backlog full: answer statelessly. The ISS is a pure
                    // function of the tuple, so a later ACK can still be
                    // verified and the connection rebuilt (syncookie style).
                    send_raw_tcp(dst, p.ip->src, t->dport, t->sport, iss, t->seq + 1,
                                 tcpflag::SYN | tcpflag::ACK, p.cause, reply_ts);
                }
                return;
            }
            if (ack && !syn && pod.listening(t->dport)) {
                u32 iss = tcp_iss(sc_.seed, pod.ip, t->dport, p.ip->src, t->sport, true);
                if (t->ack == iss + 1) {
                    // Handshake ACK for a connection the full backlog pushed
                    // out; rebuild the endpoint and carry on.
                    Endpoint& ep = pod.conns[key];
                    ep.state = ConnState::Established;
                    ep.self_pod = dst;
                    auto rt = routes_.find(p.ip->src.value);
                    ep.peer_pod = rt == routes_.end() ? -1 : rt->second;
                    ep.local_ip = pod.ip;
                    ep.remote_ip = p.ip->src;
                    ep.local_port = t->dport;
                    ep.remote_port = t->sport;
                    ep.snd_nxt = iss + 1;
                    ep.rcv_nxt = t->seq;
                    ep.peer_window = t->window;
                    ep.opened_ts = clock_;
                    ep.last_cause = p.cause;
                    service_established(pod, ep, reply_ts);
                    deliver_into_conn(pod, key, p, *t, wire_payload, reply_ts);
                    return;
                }
            }
            // Stray mid-stream segment: reset the phantom connection. Flood
            // tools are the exception: their raw packets bypass the local
            // stack and the standard hping3 setup firewalls the kernel's
            // resets so the flood stays pure SYNs on the wire.
            if (pod.spec->role != PodRole::Hping3)
                send_raw_tcp(dst, p.ip->src, t->dport, t->sport, ack ? t->ack : 0, 0,
                             tcpflag::RST, p.cause, reply_ts);
            return;
        }

        Endpoint& ep = cit->second;
        ep.peer_window = t->window;
        ep.last_activity = clock_;
        ep.last_cause = p.cause;
        ep.acked_current = false;

        if (rst) {
            if (ep.state == ConnState::SynSent && ep.handle) {
                ep.handle->state = ConnectionHandle::State::Refused;
                if (ep.script) ep.script->on_refused(*this, ep, clock_);
            } else if (ep.handle) {
                ep.handle->state = ConnectionHandle::State::Closed;
            }
            erase_conn(pod, cit);
            return;
        }

        if (ep.state == ConnState::SynSent) {
            if (syn && ack && t->ack == ep.snd_nxt) {
                ep.rcv_nxt = t->seq + 1;
                ep.state = ConnState::Established;
                if (ep.handle) {
                    ep.handle->handshake_packets += 2; // the SYN-ACK and our ACK
                    ep.handle->state = ConnectionHandle::State::Established;
                    ep.handle->established_ts = clock_;
                }
                send_tcp(ep, tcpflag::ACK, "", p.cause, reply_ts);
                ep.acked_current = true;
                if (ep.script) ep.script->on_established(*this, ep, clock_);
            }
            return;
        }

        if (ep.state == ConnState::SynReceived) {
            if (!ack || t->ack != ep.snd_nxt) return; // not our handshake ACK
            ep.state = ConnState::Established;
            if (pod.half_open > 0) pod.half_open--;
            service_established(pod, ep, reply_ts);
            // fall through: the ACK may carry data
        }

        deliver_into_conn(pod, key, p, *t, wire_payload, reply_ts);
    }

    // In-order assembly, ACK generation, and teardown for a known connection.
    // May erase the endpoint; callers must not touch it afterwards.
    void deliver_into_conn(PodRuntime& pod, const ConnKey& key, const Packet& p, const TcpInfo& t,
                           const std::string& wire_payload, u64 reply_ts) {
        auto cit = pod.conns.find(key);
        if (cit == pod.conns.end()) return;
        Endpoint& ep = cit->second;
        bool fin = t.flags & tcpflag::FIN;
        bool advanced = false;

        if (!wire_payload.empty() || fin) {
            if (t.seq == ep.rcv_nxt) {
                if (!wire_payload.empty()) {
                    ep.rcv_nxt += u32(wire_payload.size());
                    ep.rx += wire_payload;
                    advanced = true;
                }
                if (fin) {
                    ep.rcv_nxt += 1;
                    ep.peer_fin = true;
                    advanced = true;
                }
            } else {
                // Out of order (or an old duplicate): duplicate ACK restating
                // what we expect. Sequence-prediction probes live off these.
                send_tcp(ep, tcpflag::ACK, "", p.cause, reply_ts);
                return;
            }
        }

        if (t.flags & tcpflag::ACK) {
            if (ep.state == ConnState::LastAck && t.ack == ep.snd_nxt) {
                // Final ACK for the FIN we sent after the peer's: done.
                if (ep.handle) ep.handle->state = ConnectionHandle::State::Closed;
                erase_conn(pod, cit);
                return;
            }
            http_on_ack(pod, ep, t.ack, reply_ts);
        }

        if (advanced && !ep.rx.empty()) {
            if (ep.script) ep.script->on_data(*this, ep, clock_);
            else service_data(pod, ep, reply_ts);
        }

        // Re-find: a script or service callback may have closed the conn.
        cit = pod.conns.find(key);
        if (cit == pod.conns.end()) return;
        Endpoint& ep2 = cit->second;

        if (ep2.peer_fin) {
            if (ep2.script) ep2.script->on_peer_fin(*this, ep2, clock_);
            if (!ep2.fin_sent) {
                // Peer closed first: acknowledge and close our side in one
                // FIN-ACK segment.
                ep2.fin_sent = true;
                ep2.state = ConnState::LastAck;
                send_tcp(ep2, tcpflag::FIN | tcpflag::ACK, "", p.cause, reply_ts);
            } else {
                // Peer's FIN answers ours: final ACK, connection gone.
                send_tcp(ep2, tcpflag::ACK, "", p.cause, reply_ts);
                if (ep2.handle) ep2.handle->state = ConnectionHandle::State::Closed;
                erase_conn(pod, cit);
            }
            return;
        }

        if (advanced && !ep2.acked_current && !ep2.defer_ack)
            send_tcp(ep2, tcpflag::ACK, "", p.cause, reply_ts);
    }

    void erase_conn(PodRuntime& pod, std::map<ConnKey, Endpoint>::iterator it) {
        if (it->second.state == ConnState::SynReceived && pod.half_open > 0) pod.half_open--;
        pod.conns.erase(it);
    }

    // ---- victim services ----

    void service_established(PodRuntime& pod, Endpoint& ep, u64 ts) {
        if (pod.service == ServiceKind::MysqlAuth && !ep.mysql_greeted) {
            ep.mysql_greeted = true;
            send_tcp(ep, tcpflag::ACK | tcpflag::PSH, "netbed-mysql 5.7.40 ready\n", ep.last_cause,
                     ts);
        }
    }

    void service_data(PodRuntime& pod, Endpoint& ep, u64 ts) {
        switch (pod.service) {
            case ServiceKind::Http: http_service_data(pod, ep, ts); break;
            case ServiceKind::MysqlAuth: mysql_data(pod, ep, ts); break;
            case ServiceKind::TlsHeartbeat: tls_data(pod, ep, ts); break;
            case ServiceKind::None: break;
        }
    }

    // -- HTTP --

    static std::string http_date(u64 ts_us) {
        u64 s = ts_us / 1000000 % 86400;
        char buf[48];
        std::snprintf(buf, sizeof buf, "Tue, 01 Feb 2022 %02llu:%02llu:%02llu GMT",
                      (unsigned long long)(s / 3600), (unsigned long long)(s / 60 % 60),
                      (unsigned long long)(s % 60));
        return buf;
    }

    std::string http_body(const PodRuntime& pod) {
        std::string host = pod.spec->name;
        std::string body = "<html><head><title>" + host + "</title></head><body>\n";
        if (pod.spec->role == PodRole::Apache) body += "<h1>It works!</h1>\n";
        else body += "<h1>Welcome to " + host + "</h1>\n";
        body += "<p>Served from the container testbed overlay.</p>\n</body></html>\n";
        return body;
    }

    void http_data(PodRuntime& pod, Endpoint& ep, u64 ts) {
        while (true) {
            size_t hdr_end = ep.rx.find("\r\n\r\n");
            if (hdr_end == std::string::npos) return; // incomplete headers: hold the conn
            std::string headers = ep.rx.substr(0, hdr_end);
            size_t body_len = 0;
            size_t cl = headers.find("\r\nContent-Length: ");
            if (cl != std::string::npos)
                body_len = size_t(std::strtoul(headers.c_str() + cl + 18, nullptr, 10));
            size_t total = hdr_end + 4 + body_len;
            if (ep.rx.size() < total) return; // body still trickling in
            ep.rx.erase(0, total);
            pod.counters.requests_completed++;

            bool ranged = headers.find("\r\nRange: bytes=") != std::string::npos;
            std::string body = http_body(pod);
            std::string status = "200 OK";
            if (ranged) {
                // Overlapping range sets amplify; cap the synthesized reply
                // so one request cannot balloon the trace.
                status = "206 Partial Content";
                body.assign(8192, 'R');
            }
            std::string resp = "HTTP/1.1 " + status + "\r\n";
            resp += "Server: " + pod.server_banner + "\r\n";
            resp += "Date: " + http_date(ts) + "\r\n";
            resp += "Content-Type: text/html\r\n";
            if (ranged) {
                resp += "Content-Range: bytes 0-8191/8192\r\n";
            }
            resp += "Content-Length: " + std::to_string(body.size()) + "\r\n";
            resp += "Connection: keep-alive\r\n\r\n";
            resp += body;
            ep.http.tx += resp;
            pod.counters.responses_sent++;
        }
    }

    void http_service_data(PodRuntime& pod, Endpoint& ep, u64 ts) {
        http_data(pod, ep, ts);
        http_pump(ep, ts); // first chunk; the client's ACKs clock the rest
    }

    // The response drains one chunk at a time, clocked by the client's ACKs
    // and capped by its advertised window. A 16-byte window turns a one-page
    // response into a long trickle; a normal window drains it immediately.
    void http_pump(Endpoint& ep, u64 ts) {
        if (ep.http.in_flight || ep.http.tx_off >= ep.http.tx.size()) return;
        size_t window = ep.peer_window == 0 ? 1 : ep.peer_window;
        size_t chunk = std::min({size_t(MSS), window, ep.http.tx.size() - ep.http.tx_off});
        std::string data = ep.http.tx.substr(ep.http.tx_off, chunk);
        ep.http.tx_off += chunk;
        send_tcp(ep, tcpflag::ACK | tcpflag::PSH, std::move(data), ep.last_cause, ts);
        ep.http.in_flight = true;
        ep.http.unacked_end = ep.snd_nxt;
    }

    void http_on_ack(PodRuntime& pod, Endpoint& ep, u32 acknum, u64 ts) {
        (void)pod;
        if (ep.http.in_flight && std::int32_t(acknum - ep.http.unacked_end) >= 0)
            ep.http.in_flight = false;
        http_pump(ep, ts);
    }

    // -- MySQL-like auth --

    void mysql_data(PodRuntime& pod, Endpoint& ep, u64 ts) {
        size_t nl;
        while ((nl = ep.rx.find('\n')) != std::string::npos) {
            std::string line = ep.rx.substr(0, nl);
            ep.rx.erase(0, nl + 1);
            if (line.rfind("AUTH ", 0) != 0) continue;
            size_t sp = line.find(' ', 5);
            if (sp == std::string::npos) continue;
            std::string user = line.substr(5, sp - 5);
            std::string pass = line.substr(sp + 1);
            pod.counters.auth_attempts++;
            if (user == pod.mysql_user && pass == pod.mysql_pass) {
                pod.counters.auth_successes++;
                send_tcp(ep, tcpflag::ACK | tcpflag::PSH, "OK welcome " + user + "\n",
                         ep.last_cause, ts);
            } else {
                send_tcp(ep, tcpflag::ACK | tcpflag::PSH,
                         "ERR access denied for user '" + user + "'\n", ep.last_cause, ts);
            }
        }
    }

    // -- TLS heartbeat --

    void tls_data(PodRuntime& pod, Endpoint& ep, u64 ts) {
        while (ep.rx.size() >= 5) {
            u8 type = u8(ep.rx[0]);
            size_t len = (size_t(u8(ep.rx[3])) << 8) | u8(ep.rx[4]);
            if (ep.rx.size() < 5 + len) return;
            std::string body = ep.rx.substr(5, len);
            ep.rx.erase(0, 5 + len);
            if (type == 22 && body.rfind("NETBED-CLIENT-HELLO", 0) == 0) {
                send_tls(ep, 22, "NETBED-SERVER-HELLO " + pod.server_banner, ep.last_cause, ts);
            } else if (type == 24 && body.size() >= 3 && u8(body[0]) == 1) {
                heartbeat(pod, ep, body, ts);
            }
        }
    }

    void heartbeat(PodRuntime& pod, Endpoint& ep, const std::string& body, u64 ts) {
        pod.counters.heartbeats_seen++;
        size_t claimed = (size_t(u8(body[1])) << 8) | u8(body[2]);
        size_t actual = body.size() >= 3 + 16 ? body.size() - 3 - 16 : 0;
        std::string payload = body.substr(3, actual);
        std::string out;
        size_t resp_len;
        if (pod.vulnerable && claimed > actual) {
            // The response buffer is filled from the request payload, then
            // read past its end: the claimed length wins and the difference
            // comes straight out of process memory.
            size_t over = claimed - actual;
            size_t off = size_t(fnv1a64(payload) % u64(pod.tls_memory.size() - over));
            out = payload + pod.tls_memory.substr(off, over);
            pod.counters.bytes_overread += over;
            resp_len = claimed;
        } else {
            // Patched (or no over-read requested): echo exactly what arrived.
            out = payload;
            resp_len = actual;
        }
        std::string resp;
        resp.push_back(char(2));
        resp.push_back(char(resp_len >> 8));
        resp.push_back(char(resp_len & 0xff));
        resp += out;
        resp += "netbed-padding16";
        send_tls(ep, 24, resp, ep.last_cause, ts);
    }

    const Scenario sc_;
    Pcg32 rng_;
    std::vector<Interface> ifaces_;
    std::map<std::pair<std::string, std::string>, int> iface_by_id_;
    std::vector<PodRuntime> pods_;
    std::map<std::string, int> pod_by_name_;
    std::map<u32, int> routes_; // overlay IP (host order) to pod index
    std::map<std::string, std::function<void(Packet&&)>> storage_handlers_;
    detail::EventQueue queue_;
    u64 next_seq_ = 0;
    u64 clock_ = 0;
    u16 ip_id_ = 1;
    EventStats stats_;
    StorageStats storage_stats_;
};

inline Fabric build_fabric(const Scenario& sc) { return Fabric(sc); }

} // namespace netbed
