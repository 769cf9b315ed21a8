#pragma once

// Traffic synthesis. A generator is a pure function of (identities, config,
// window, seed): it never touches a running fabric and two calls with the
// same inputs plan byte-identical traffic. Raw floods come back as an indexed
// stream whose i-th packet is computed on demand from its own derived rng
// stream, so replay checks and sampling stay O(1). Connection-oriented
// attacks come back as a list of planned connections whose scripts drive the
// dialogue once the fabric completes the handshake.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netbed/fabric.hpp"
#include "netbed/hash.hpp"
#include "netbed/net.hpp"
#include "netbed/packet.hpp"
#include "netbed/rng.hpp"
#include "netbed/scenario.hpp"

namespace netbed {

// Head room left at the end of a window so a connection opened late can still
// finish its exchange (and teardown) before the window closes.
constexpr u64 EXCHANGE_MARGIN_US = 500'000;

// Shorter guard for per-packet stimuli: a packet sent this close to the end
// of the window still gets its response back inside the window, so labels
// never have to reach past the schedule.
constexpr u64 RESPONSE_HOLDBACK_US = 10'000;

inline std::vector<std::string> default_request_paths() {
    return {"", "index.html", "news", "login", "static/site.css"};
}

inline std::vector<std::string> default_user_agents() {
    return {
        "Mozilla/5.0 (Windows NT 10.0; Win64; x64) Gecko/20100101 Firefox/97.0",
        "Mozilla/5.0 (X11; Linux x86_64) AppleWebKit/537.36 Chrome/98.0.4758.102",
        "Mozilla/5.0 (Macintosh; Intel Mac OS X 12_2) Version/15.3 Safari/605.1.15",
        "Mozilla/4.0 (compatible; MSIE 8.0; Windows NT 6.1)",
        "Opera/9.80 (Windows NT 6.0) Presto/2.12.388 Version/12.14",
    };
}

// Tunables for one schedule entry, with the shipped defaults. from_params
// applies overrides from the scenario's free-form parameter map; unknown keys
// are ignored and malformed values keep the default (validate() flags the
// ones that matter).
struct GeneratorConfig {
    double rate_pps = 1000.0;      // tcp-syn-flood, icmp-flood
    double conn_rate = 50.0;       // hulk request rate, slow-variant open ramp
    u64 connections = 200;         // slow variants: sockets held at the victim
    double interval_s = 10.0;      // slow variants: drip / delayed-ack cadence
    double attempts_per_s = 20.0;  // brute force pacing
    double heartbeats_per_s = 1.0; // heartbleed attempt pacing
    double benign_rate = 1.0;      // benign: mean connection arrivals per second
    u64 wordlist_size = 100;       // brute force: candidate credential pairs
    u64 true_index = 73;           // position of the real pair; >= size means absent
    u64 heartbeat_claimed_len = 16384;
    u64 heartbeat_actual_len = 16;
    u64 range_count = 100;         // slow-range: ranges packed into one request
    u64 probe_width = 16;          // seq-prediction: guesses per round
    u64 probe_stride = 1;          // seq-prediction: seq distance between guesses
    double round_interval_s = 0.1; // seq-prediction: time between rounds
    u64 inject_len = 12;           // seq-prediction: payload bytes per probe
    double provision_lead_s = 1.0; // seq-prediction: head start for the real session
    u64 recv_window = 16;          // slow-read: advertised client window
    u64 content_length = 4096;     // slow-body: declared request body size
    std::string hijack_client;     // seq-prediction: benign pod whose session is hit
    std::vector<std::string> request_path_pool = default_request_paths();

    static GeneratorConfig from_params(const std::map<std::string, std::string>& p) {
        GeneratorConfig c;
        auto f64 = [&](const char* k, double& v) {
            if (auto x = param_f64(p, k); x && *x > 0) v = *x;
        };
        auto uns = [&](const char* k, u64& v) {
            if (auto x = param_u64(p, k)) v = *x;
        };
        f64("rate_pps", c.rate_pps);
        f64("conn_rate", c.conn_rate);
        uns("connections", c.connections);
        f64("interval_s", c.interval_s);
        f64("attempts_per_s", c.attempts_per_s);
        f64("heartbeats_per_s", c.heartbeats_per_s);
        f64("benign_rate", c.benign_rate);
        uns("wordlist_size", c.wordlist_size);
        uns("true_index", c.true_index);
        uns("heartbeat_claimed_len", c.heartbeat_claimed_len);
        uns("heartbeat_actual_len", c.heartbeat_actual_len);
        uns("range_count", c.range_count);
        uns("probe_width", c.probe_width);
        uns("probe_stride", c.probe_stride);
        f64("round_interval_s", c.round_interval_s);
        uns("inject_len", c.inject_len);
        f64("provision_lead_s", c.provision_lead_s);
        uns("recv_window", c.recv_window);
        uns("content_length", c.content_length);
        if (auto x = param_str(p, "hijack_client")) c.hijack_client = *x;
        return c;
    }
};

namespace detail {

// Child seed for one attack's packet stream. Every packet then derives its
// own rng from (stream seed, index), which is what makes indexed access pure.
inline u64 stream_seed(u64 seed, const char* kind, std::size_t attack_index) {
    u64 label = fnv1a64(std::string(kind) + "/" + std::to_string(attack_index));
    return derive_rng(seed, label).next64();
}

inline std::string alnum(Pcg32& rng, std::size_t n) {
    static const char cs[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    std::string s(n, '0');
    for (auto& c : s) c = cs[rng.next_below(62)];
    return s;
}

// Evenly spaced emission times; integer math keeps the configured rate exact
// over the window instead of accumulating float error.
inline u64 spread(u64 start, u64 span_us, u64 n, u64 i) {
    return n == 0 ? start : start + (i * span_us) / n;
}

inline u64 count_for_rate(double per_second, u64 dur_us) {
    return per_second <= 0 ? 0 : u64(per_second * double(dur_us) / 1e6 + 0.5);
}

inline ConnKey key_of(const Endpoint& ep) {
    return ConnKey{ep.remote_ip, ep.remote_port, ep.local_port};
}

// Sends chunk(k) on the connection every interval until the window closes or
// the connection goes away. Drives the slowloris and slow-body drip.
inline void drip(Fabric& f, int pod, ConnKey key, u64 at, u64 interval, u64 stop_ts, u64 tick,
                 std::function<std::string(u64)> chunk, Cause cause) {
    if (at >= stop_ts) return;
    f.schedule(at, [&f, pod, key, at, interval, stop_ts, tick, chunk, cause]() {
        Endpoint* ep = f.find_conn(pod, key);
        if (!ep || ep->state != ConnState::Established) return;
        f.send_tcp(*ep, tcpflag::ACK | tcpflag::PSH, chunk(tick), cause, at);
        drip(f, pod, key, at + interval, interval, stop_ts, tick + 1, chunk, cause);
    });
}

// Pulls one complete record off the front of a TLS byte stream.
inline std::optional<std::pair<u8, std::string>> take_tls_record(std::string& rx) {
    if (rx.size() < 5) return std::nullopt;
    std::size_t len = (std::size_t(u8(rx[3])) << 8) | u8(rx[4]);
    if (rx.size() < 5 + len) return std::nullopt;
    std::pair<u8, std::string> rec{u8(rx[0]), rx.substr(5, len)};
    rx.erase(0, 5 + len);
    return rec;
}

} // namespace detail

// Candidate credential pair i for the brute force wordlist. Derived from the
// run seed alone (not from any attack), so the credentials provisioned on the
// victim and the attacker's list agree by construction.
inline std::pair<std::string, std::string> wordlist_entry(u64 seed, u64 i) {
    Pcg32 rng = derive_rng(derive_rng(seed, fnv1a64("wordlist")).next64(), i);
    char user[32];
    std::snprintf(user, sizeof user, "user%03llu", static_cast<unsigned long long>(i));
    return {user, "pw-" + detail::alnum(rng, 8)};
}

// ---- emission plans ----------------------------------------------------------

// A raw packet stream addressed by index; make(i) always returns the same
// packet for the same stream.
struct RawStream {
    u64 count = 0;
    std::function<Packet(u64)> make;
};

// One planned TCP connection: when to open it, who talks to whom, and the
// script that runs the dialogue once established.
struct ConnPlan {
    u64 open_ts = 0;
    int client_pod = -1;
    int server_pod = -1;
    u16 dport = 0;
    u16 adv_window = 65535;
    Cause cause;
    std::function<std::shared_ptr<ConnScript>()> make_script;
};

struct BuiltAttack {
    RawStream raw; // count == 0 for purely connection-based attacks
    std::vector<ConnPlan> conns;
    bool skipped = false;
    std::string skip_reason;
};

// Who attacks whom, resolved from the scenario rather than a running fabric
// so plans can be built and compared without an emulation.
struct AttackContext {
    u64 seed = 0;
    std::size_t attack_index = 0;
    int attacker_pod = -1;
    int victim_pod = -1;
    Ipv4Addr attacker_ip{};
    Ipv4Addr victim_ip{};
    u16 dport = 0;
    int client_pod = -1; // seq-prediction: the hijacked benign client
    Ipv4Addr client_ip{};
};

inline AttackContext make_attack_context(const Scenario& sc, std::size_t attack_index) {
    const AttackSpec& a = sc.attacks.at(attack_index);
    auto addrs = assign_addresses(sc);
    auto find = [&](const std::string& name) {
        for (std::size_t i = 0; i < sc.pods.size(); i++)
            if (sc.pods[i].name == name) return int(i);
        return -1;
    };
    AttackContext ctx;
    ctx.seed = sc.seed;
    ctx.attack_index = attack_index;
    ctx.attacker_pod = find(a.attacker);
    ctx.victim_pod = find(a.victim);
    if (auto it = addrs.find(std::size_t(ctx.attacker_pod)); it != addrs.end())
        ctx.attacker_ip = it->second;
    if (auto it = addrs.find(std::size_t(ctx.victim_pod)); it != addrs.end())
        ctx.victim_ip = it->second;
    if (ctx.victim_pod >= 0)
        ctx.dport = attack_target_port(a, sc.pods[std::size_t(ctx.victim_pod)]).value_or(0);
    if (auto client = param_str(a.params, "hijack_client")) {
        ctx.client_pod = find(*client);
        if (auto it = addrs.find(std::size_t(ctx.client_pod)); it != addrs.end())
            ctx.client_ip = it->second;
    }
    return ctx;
}

// Ground-truth tag stamped on every planned packet and connection. kind says
// whether the traffic is offensive, window identifies the schedule row, and
// the pod pair records who really talked (spoofed headers notwithstanding).
inline Cause attack_cause(const AttackContext& ctx) {
    Cause c;
    c.kind = CauseKind::Attack;
    c.window = i64(ctx.attack_index);
    c.client = ctx.attacker_pod;
    c.server = ctx.victim_pod;
    return c;
}

inline Cause benign_cause(const AttackContext& ctx, int client_pod) {
    Cause c;
    c.kind = CauseKind::Benign;
    c.window = i64(ctx.attack_index);
    c.client = client_pod;
    c.server = ctx.victim_pod;
    return c;
}

// ---- connection scripts ------------------------------------------------------

// Client side of one complete HTTP exchange: send the request, absorb the
// full response (headers plus declared body), then optionally close. Serves
// as the benign workload and as every attack that is just an odd request.
class HttpExchangeScript : public ConnScript {
public:
    HttpExchangeScript(std::string request, bool close_after, Cause cause)
        : request_(std::move(request)), close_after_(close_after), cause_(cause) {}

    void on_established(Fabric& f, Endpoint& ep, u64 now) override {
        f.send_tcp(ep, tcpflag::ACK | tcpflag::PSH, request_, cause_, now + TURNAROUND_US);
    }

    void on_data(Fabric& f, Endpoint& ep, u64 now) override {
        std::size_t hdr = ep.rx.find("\r\n\r\n");
        if (hdr == std::string::npos) return;
        std::size_t body = 0;
        std::size_t cl = ep.rx.find("Content-Length: ");
        if (cl != std::string::npos && cl < hdr)
            body = std::strtoul(ep.rx.c_str() + cl + 16, nullptr, 10);
        if (ep.rx.size() < hdr + 4 + body) return; // response still streaming in
        ep.rx.erase(0, hdr + 4 + body);
        if (close_after_) f.close_conn(ep, cause_, now + TURNAROUND_US);
    }

    const std::string& request() const { return request_; }

private:
    std::string request_;
    bool close_after_;
    Cause cause_;
};

// Sends a valid-looking request head that never ends, then keeps the socket
// warm with bogus header lines until the window closes.
class SlowlorisScript : public ConnScript {
public:
    SlowlorisScript(std::string partial, u64 interval_us, u64 stop_ts, Cause cause)
        : partial_(std::move(partial)), interval_(interval_us), stop_(stop_ts), cause_(cause) {}

    void on_established(Fabric& f, Endpoint& ep, u64 now) override {
        f.send_tcp(ep, tcpflag::ACK | tcpflag::PSH, partial_, cause_, now + TURNAROUND_US);
        detail::drip(f, ep.self_pod, detail::key_of(ep), now + interval_, interval_, stop_, 0,
                     [](u64) { return std::string("X-a: b\r\n"); }, cause_);
    }

    const std::string& opening() const { return partial_; }

private:
    std::string partial_;
    u64 interval_;
    u64 stop_;
    Cause cause_;
};

// Complete headers declaring a large body, then the body arrives one byte at
// a time. The server holds the connection waiting for the rest.
class SlowBodyScript : public ConnScript {
public:
    SlowBodyScript(std::string headers, u64 interval_us, u64 stop_ts, Cause cause)
        : headers_(std::move(headers)), interval_(interval_us), stop_(stop_ts), cause_(cause) {}

    void on_established(Fabric& f, Endpoint& ep, u64 now) override {
        f.send_tcp(ep, tcpflag::ACK | tcpflag::PSH, headers_, cause_, now + TURNAROUND_US);
        detail::drip(f, ep.self_pod, detail::key_of(ep), now + interval_, interval_, stop_, 0,
                     [](u64 k) { return std::string(1, char('a' + k % 26)); }, cause_);
    }

    const std::string& headers() const { return headers_; }

private:
    std::string headers_;
    u64 interval_;
    u64 stop_;
    Cause cause_;
};

// Issues a normal request but advertises a tiny receive window and delays
// every ACK, so the server spends the whole window dribbling its response.
class SlowReadScript : public ConnScript {
public:
    SlowReadScript(std::string request, u64 ack_interval_us, u64 stop_ts, Cause cause)
        : request_(std::move(request)), interval_(ack_interval_us), stop_(stop_ts), cause_(cause) {}

    void on_established(Fabric& f, Endpoint& ep, u64 now) override {
        ep.defer_ack = true;
        f.send_tcp(ep, tcpflag::ACK | tcpflag::PSH, request_, cause_, now + TURNAROUND_US);
    }

    void on_data(Fabric& f, Endpoint& ep, u64 now) override {
        ep.rx.clear();
        u64 at = now + interval_;
        if (at >= stop_) return; // starve the server past the window end
        int pod = ep.self_pod;
        ConnKey key = detail::key_of(ep);
        Cause cause = cause_;
        f.schedule(at, [&f, pod, key, at, cause]() {
            Endpoint* ep2 = f.find_conn(pod, key);
            if (!ep2 || ep2->state != ConnState::Established) return;
            f.send_tcp(*ep2, tcpflag::ACK, "", cause, at);
        });
    }

    const std::string& request() const { return request_; }

private:
    std::string request_;
    u64 interval_;
    u64 stop_;
    Cause cause_;
};

// One credential guess: wait for the server greeting, send AUTH, close on the
// OK or ERR verdict.
class MysqlAttemptScript : public ConnScript {
public:
    MysqlAttemptScript(std::string user, std::string pass, Cause cause)
        : user_(std::move(user)), pass_(std::move(pass)), cause_(cause) {}

    void on_data(Fabric& f, Endpoint& ep, u64 now) override {
        std::size_t nl;
        while ((nl = ep.rx.find('\n')) != std::string::npos) {
            std::string line = ep.rx.substr(0, nl);
            ep.rx.erase(0, nl + 1);
            if (line.find("ready") != std::string::npos) {
                f.send_tcp(ep, tcpflag::ACK | tcpflag::PSH, "AUTH " + user_ + " " + pass_ + "\n",
                           cause_, now + TURNAROUND_US);
            } else if (line.rfind("OK", 0) == 0 || line.rfind("ERR", 0) == 0) {
                f.close_conn(ep, cause_, now + TURNAROUND_US);
                return;
            }
        }
    }

    const std::string& user() const { return user_; }
    const std::string& pass() const { return pass_; }

private:
    std::string user_;
    std::string pass_;
    Cause cause_;
};

// Abbreviated TLS exchange followed by one heartbeat whose claimed length the
// config controls. Closes once the heartbeat response arrives.
class HeartbleedScript : public ConnScript {
public:
    HeartbleedScript(std::string hello, std::string payload, u64 claimed, Cause cause)
        : hello_(std::move(hello)), payload_(std::move(payload)), claimed_(claimed),
          cause_(cause) {}

    void on_established(Fabric& f, Endpoint& ep, u64 now) override {
        f.send_tls(ep, 22, hello_, cause_, now + TURNAROUND_US);
    }

    void on_data(Fabric& f, Endpoint& ep, u64 now) override {
        while (auto rec = detail::take_tls_record(ep.rx)) {
            if (rec->first == 22 && !beat_sent_) {
                beat_sent_ = true;
                std::string body;
                body.push_back(char(1));
                body.push_back(char((claimed_ >> 8) & 0xff));
                body.push_back(char(claimed_ & 0xff));
                body += payload_;
                body += "netbed-padding16";
                f.send_tls(ep, 24, body, cause_, now + TURNAROUND_US);
            } else if (rec->first == 24) {
                f.close_conn(ep, cause_, now + TURNAROUND_US);
                return;
            }
        }
    }

    const std::string& payload() const { return payload_; }
    u64 claimed() const { return claimed_; }

private:
    std::string hello_;
    std::string payload_;
    u64 claimed_;
    bool beat_sent_ = false;
    Cause cause_;
};

// Keeps one legitimate session open for the whole window; the sequence
// prediction probes splice their payload into this connection.
class ProvisionScript : public ConnScript {
public:
    ProvisionScript(std::string request, Cause cause)
        : request_(std::move(request)), cause_(cause) {}

    void on_established(Fabric& f, Endpoint& ep, u64 now) override {
        f.send_tcp(ep, tcpflag::ACK | tcpflag::PSH, request_, cause_, now + TURNAROUND_US);
    }

    void on_data(Fabric&, Endpoint& ep, u64) override { ep.rx.clear(); }

private:
    std::string request_;
    Cause cause_;
};

// ---- generators ----------------------------------------------------------------

// SYN flood: rate_pps packets evenly spread over the window, each from a
// fresh random source port in [1024, 65535] with a random initial sequence.
inline BuiltAttack gen_syn_flood(const AttackContext& ctx, const GeneratorConfig& cfg,
                                 const AttackWindow& w) {
    BuiltAttack out;
    u64 dur = w.end_us - w.start_us;
    u64 n = detail::count_for_rate(cfg.rate_pps, dur);
    u64 span = dur > 2 * RESPONSE_HOLDBACK_US ? dur - RESPONSE_HOLDBACK_US : dur / 2;
    u64 sseed = detail::stream_seed(ctx.seed, "syn-flood", ctx.attack_index);
    Cause cause = attack_cause(ctx);
    AttackContext c = ctx;
    out.raw.count = n;
    out.raw.make = [c, cause, sseed, w, span, n](u64 i) {
        Pcg32 rng = derive_rng(sseed, i);
        Packet p;
        p.ts_us = detail::spread(w.start_us, span, n, i);
        p.origin = c.attacker_pod;
        p.cause = cause;
        Ipv4Info ip;
        ip.src = c.attacker_ip;
        ip.dst = c.victim_ip;
        p.ip = ip;
        TcpInfo t;
        t.sport = u16(1024 + rng.next_below(65535 - 1024 + 1));
        t.dport = c.dport;
        t.seq = rng.next();
        t.flags = tcpflag::SYN;
        p.l4 = t;
        return p;
    };
    return out;
}

// ICMP echo flood: one ping process worth of echo requests, id fixed for the
// stream, sequence strictly increasing in emission order.
inline BuiltAttack gen_icmp_flood(const AttackContext& ctx, const GeneratorConfig& cfg,
                                  const AttackWindow& w) {
    BuiltAttack out;
    u64 dur = w.end_us - w.start_us;
    u64 n = detail::count_for_rate(cfg.rate_pps, dur);
    u64 span = dur > 2 * RESPONSE_HOLDBACK_US ? dur - RESPONSE_HOLDBACK_US : dur / 2;
    u64 sseed = detail::stream_seed(ctx.seed, "icmp-flood", ctx.attack_index);
    u16 icmp_id = u16(derive_rng(sseed, 0xffff'ffff'ffff'ffffull).next());
    Cause cause = attack_cause(ctx);
    AttackContext c = ctx;
    out.raw.count = n;
    out.raw.make = [c, cause, sseed, icmp_id, w, span, n](u64 i) {
        Pcg32 rng = derive_rng(sseed, i);
        Packet p;
        p.ts_us = detail::spread(w.start_us, span, n, i);
        p.origin = c.attacker_pod;
        p.cause = cause;
        Ipv4Info ip;
        ip.src = c.attacker_ip;
        ip.dst = c.victim_ip;
        ip.proto = 1;
        p.ip = ip;
        IcmpInfo icmp;
        icmp.type = 8;
        icmp.code = 0;
        icmp.id = icmp_id;
        icmp.seq = u16(i);
        p.l4 = icmp;
        p.payload = detail::alnum(rng, 32);
        return p;
    };
    return out;
}

// HULK-style GET flood: conn_rate fresh connections per second, each carrying
// one no-cache request with a randomized path, query and user agent.
inline BuiltAttack gen_hulk_get(const AttackContext& ctx, const GeneratorConfig& cfg,
                                const AttackWindow& w) {
    BuiltAttack out;
    u64 dur = w.end_us - w.start_us;
    u64 n = detail::count_for_rate(cfg.conn_rate, dur);
    u64 sseed = detail::stream_seed(ctx.seed, "hulk", ctx.attack_index);
    u64 span = dur > 2 * EXCHANGE_MARGIN_US ? dur - EXCHANGE_MARGIN_US : dur / 2;
    Cause cause = attack_cause(ctx);
    std::vector<std::string> agents = default_user_agents();
    for (u64 i = 0; i < n; i++) {
        Pcg32 rng = derive_rng(sseed, i);
        const auto& pool = cfg.request_path_pool;
        std::string path = pool.empty() ? "" : pool[rng.next_below(u32(pool.size()))];
        std::string req = "GET /" + path + "?" + detail::alnum(rng, 8) + " HTTP/1.1\r\n" +
                          "Host: " + ctx.victim_ip.str() + "\r\n" +
                          "User-Agent: " + agents[rng.next_below(u32(agents.size()))] + "\r\n" +
                          "Cache-Control: no-cache\r\nAccept: */*\r\nConnection: keep-alive\r\n\r\n";
        ConnPlan pl;
        pl.open_ts = detail::spread(w.start_us, span, n, i);
        pl.client_pod = ctx.attacker_pod;
        pl.server_pod = ctx.victim_pod;
        pl.dport = ctx.dport;
        pl.cause = cause;
        pl.make_script = [req, cause]() {
            return std::make_shared<HttpExchangeScript>(req, true, cause);
        };
        out.conns.push_back(std::move(pl));
    }
    return out;
}

// The slowhttptest family. All four variants ramp up cfg.connections sockets
// and differ only in how each connection then starves the server.
inline BuiltAttack gen_slow_variant(const AttackContext& ctx, const GeneratorConfig& cfg,
                                    const AttackWindow& w, AttackType variant) {
    BuiltAttack out;
    u64 dur = w.end_us - w.start_us;
    u64 n = cfg.connections;
    u64 interval = seconds_to_us(cfg.interval_s);
    u64 sseed = detail::stream_seed(ctx.seed, "slow", ctx.attack_index);
    u64 spacing = cfg.conn_rate > 0 ? u64(1e6 / cfg.conn_rate + 0.5) : 0;
    if (n > 0 && spacing * n > dur / 2) spacing = dur / (2 * n); // compress the ramp
    Cause cause = attack_cause(ctx);
    std::vector<std::string> agents = default_user_agents();
    std::string host = ctx.victim_ip.str();

    for (u64 i = 0; i < n; i++) {
        Pcg32 rng = derive_rng(sseed, i);
        std::string ua = agents[rng.next_below(u32(agents.size()))];
        ConnPlan pl;
        pl.open_ts = w.start_us + i * spacing;
        pl.client_pod = ctx.attacker_pod;
        pl.server_pod = ctx.victim_pod;
        pl.dport = ctx.dport;
        pl.cause = cause;
        u64 stop = w.end_us > RESPONSE_HOLDBACK_US ? w.end_us - RESPONSE_HOLDBACK_US
                                                    : w.end_us;
        switch (variant) {
            case AttackType::Slowloris: {
                // Header block with no terminating blank line.
                std::string partial = "GET / HTTP/1.1\r\nHost: " + host + "\r\nUser-Agent: " + ua +
                                      "\r\n";
                pl.make_script = [partial, interval, stop, cause]() {
                    return std::make_shared<SlowlorisScript>(partial, interval, stop, cause);
                };
                break;
            }
            case AttackType::SlowBody: {
                std::string headers = "POST /upload HTTP/1.1\r\nHost: " + host +
                                      "\r\nUser-Agent: " + ua + "\r\nContent-Length: " +
                                      std::to_string(cfg.content_length) + "\r\n\r\n";
                pl.make_script = [headers, interval, stop, cause]() {
                    return std::make_shared<SlowBodyScript>(headers, interval, stop, cause);
                };
                break;
            }
            case AttackType::SlowRead: {
                std::string req = "GET / HTTP/1.1\r\nHost: " + host + "\r\nUser-Agent: " + ua +
                                  "\r\n\r\n";
                pl.adv_window = u16(std::min<u64>(cfg.recv_window, 65535));
                pl.make_script = [req, interval, stop, cause]() {
                    return std::make_shared<SlowReadScript>(req, interval, stop, cause);
                };
                break;
            }
            default: { // SlowRange
                std::string ranges = "0-";
                for (u64 r = 0; r + 1 < cfg.range_count; r++)
                    ranges += ",5-" + std::to_string(r);
                std::string req = "GET / HTTP/1.1\r\nHost: " + host + "\r\nUser-Agent: " + ua +
                                  "\r\nRange: bytes=" + ranges + "\r\n\r\n";
                pl.make_script = [req, cause]() {
                    return std::make_shared<HttpExchangeScript>(req, true, cause);
                };
                break;
            }
        }
        out.conns.push_back(std::move(pl));
    }
    return out;
}

// Brute force: walks the wordlist in order, one connection per guess, and
// stops at the first success (or when the list or window runs out).
inline BuiltAttack gen_brute_force(const AttackContext& ctx, const GeneratorConfig& cfg,
                                   const AttackWindow& w) {
    BuiltAttack out;
    u64 dur = w.end_us - w.start_us;
    u64 spacing = cfg.attempts_per_s > 0 ? u64(1e6 / cfg.attempts_per_s + 0.5) : dur;
    u64 capacity = spacing > 0 ? (dur > EXCHANGE_MARGIN_US ? dur - EXCHANGE_MARGIN_US : dur / 2) /
                                     spacing + 1
                               : cfg.wordlist_size;
    u64 n = std::min(cfg.wordlist_size, capacity);
    if (cfg.true_index < n) n = cfg.true_index + 1;
    Cause cause = attack_cause(ctx);
    for (u64 i = 0; i < n; i++) {
        auto [user, pass] = wordlist_entry(ctx.seed, i);
        ConnPlan pl;
        pl.open_ts = w.start_us + i * spacing;
        pl.client_pod = ctx.attacker_pod;
        pl.server_pod = ctx.victim_pod;
        pl.dport = ctx.dport;
        pl.cause = cause;
        pl.make_script = [user, pass, cause]() {
            return std::make_shared<MysqlAttemptScript>(user, pass, cause);
        };
        out.conns.push_back(std::move(pl));
    }
    return out;
}

// Heartbleed: heartbeats_per_s connections, each doing the abbreviated
// handshake and one heartbeat with the configured claimed/actual lengths.
inline BuiltAttack gen_heartbleed(const AttackContext& ctx, const GeneratorConfig& cfg,
                                  const AttackWindow& w) {
    BuiltAttack out;
    u64 dur = w.end_us - w.start_us;
    u64 spacing = cfg.heartbeats_per_s > 0 ? u64(1e6 / cfg.heartbeats_per_s + 0.5) : dur;
    u64 usable = dur > EXCHANGE_MARGIN_US ? dur - EXCHANGE_MARGIN_US : dur / 2;
    u64 n = spacing > 0 ? usable / spacing + 1 : 0;
    u64 sseed = detail::stream_seed(ctx.seed, "heartbleed", ctx.attack_index);
    Cause cause = attack_cause(ctx);
    for (u64 i = 0; i < n; i++) {
        Pcg32 rng = derive_rng(sseed, i);
        std::string hello = "NETBED-CLIENT-HELLO r=" + detail::alnum(rng, 8);
        std::string payload = detail::alnum(rng, cfg.heartbeat_actual_len);
        u64 claimed = cfg.heartbeat_claimed_len;
        ConnPlan pl;
        pl.open_ts = w.start_us + i * spacing;
        pl.client_pod = ctx.attacker_pod;
        pl.server_pod = ctx.victim_pod;
        pl.dport = ctx.dport;
        pl.cause = cause;
        pl.make_script = [hello, payload, claimed, cause]() {
            return std::make_shared<HeartbleedScript>(hello, payload, claimed, cause);
        };
        out.conns.push_back(std::move(pl));
    }
    return out;
}

// Sequence prediction. One legitimate session from the benign client gets a
// head start; the attacker then fires rounds of spoofed data segments whose
// sequence numbers bracket the predicted in-order point. Within a round the
// guesses descend, so exactly the zero-offset probe lands in order and the
// prediction advances by inject_len per round. The spoofed source address
// matches the client while the emitting pod stays the attacker, which is
// precisely the discrepancy the ground-truth audit has to catch.
inline BuiltAttack gen_tcp_seq_prediction(const AttackContext& ctx, const GeneratorConfig& cfg,
                                          const AttackWindow& w) {
    BuiltAttack out;
    if (ctx.client_pod < 0) {
        out.skipped = true;
        out.skip_reason = "no client session to hijack";
        return out;
    }

    std::string request = "GET /session HTTP/1.1\r\nHost: " + ctx.victim_ip.str() +
                          "\r\nUser-Agent: Mozilla/5.0 (benign-client)\r\nConnection: keep-alive"
                          "\r\n\r\n";
    ConnPlan provision;
    provision.open_ts = w.start_us;
    provision.client_pod = ctx.client_pod;
    provision.server_pod = ctx.victim_pod;
    provision.dport = ctx.dport;
    provision.cause = benign_cause(ctx, ctx.client_pod);
    Cause pcause = provision.cause;
    provision.make_script = [request, pcause]() {
        return std::make_shared<ProvisionScript>(request, pcause);
    };
    out.conns.push_back(std::move(provision));

    // The client pod touches nothing else (validate() enforces that), so its
    // session uses the first ephemeral port and the handshake sequence is the
    // same hash the victim computes.
    u32 iss = tcp_iss(ctx.seed, ctx.client_ip, FIRST_EPHEMERAL_PORT, ctx.victim_ip, ctx.dport,
                      false);
    u32 base = iss + 1 + u32(request.size());

    u64 dur = w.end_us - w.start_us;
    u64 lead = seconds_to_us(cfg.provision_lead_s);
    u64 interval = seconds_to_us(cfg.round_interval_s);
    u64 width = std::max<u64>(1, cfg.probe_width);
    u64 rounds = (interval > 0 && dur > lead) ? (dur - lead) / interval : 0;
    u64 probe_gap = std::min<u64>(HOP_US, width > 0 ? interval / width : HOP_US);
    u64 tail = width * probe_gap + RESPONSE_HOLDBACK_US;
    if (rounds > 0 && interval > 0) {
        if (dur <= lead + tail) rounds = 0;
        else rounds = std::min(rounds, (dur - lead - tail) / interval + 1);
    }
    u64 sseed = detail::stream_seed(ctx.seed, "seq-prediction", ctx.attack_index);
    Cause cause = attack_cause(ctx);
    AttackContext c = ctx;
    u64 stride = cfg.probe_stride;
    u64 inject = cfg.inject_len;

    out.raw.count = rounds * width;
    out.raw.make = [c, cause, sseed, w, lead, interval, width, probe_gap, base, stride,
                    inject](u64 i) {
        u64 r = i / width;
        u64 j = i % width;
        Pcg32 rng = derive_rng(sseed, i);
        Packet p;
        p.ts_us = w.start_us + lead + r * interval + j * probe_gap;
        p.origin = c.attacker_pod;
        p.cause = cause;
        Ipv4Info ip;
        ip.src = c.client_ip; // spoofed: the real emitter is the attacker pod
        ip.dst = c.victim_ip;
        p.ip = ip;
        i64 off = i64(width) - 1 - i64(j) - i64(width / 2);
        TcpInfo t;
        t.sport = FIRST_EPHEMERAL_PORT;
        t.dport = c.dport;
        t.seq = u32(u64(base) + r * inject + u64(i64(stride) * off));
        t.ack = rng.next(); // guessed; the victim does not check it
        t.flags = tcpflag::ACK | tcpflag::PSH;
        p.l4 = t;
        std::string body = inject > 4 ? "INJ=" + detail::alnum(rng, std::size_t(inject - 4))
                                      : detail::alnum(rng, std::size_t(inject));
        p.payload = body;
        return p;
    };
    return out;
}

// Benign browsing: connection arrivals Poisson-thinned from the seeded rng,
// each one a complete request/response exchange with a clean close.
inline BuiltAttack gen_benign_http(const AttackContext& ctx, const GeneratorConfig& cfg,
                                   const AttackWindow& w) {
    BuiltAttack out;
    u64 dur = w.end_us - w.start_us;
    if (cfg.benign_rate <= 0 || dur <= EXCHANGE_MARGIN_US) return out;
    u64 sseed = detail::stream_seed(ctx.seed, "benign", ctx.attack_index);
    Pcg32 rng = derive_rng(sseed, 0);
    Cause cause = benign_cause(ctx, ctx.attacker_pod);
    std::vector<std::string> agents = default_user_agents();
    std::string host = ctx.victim_ip.str();
    u64 t = w.start_us;
    for (;;) {
        double gap = -std::log(1.0 - rng.next_double()) / cfg.benign_rate;
        t += std::max<u64>(1, seconds_to_us(gap));
        if (t >= w.end_us - EXCHANGE_MARGIN_US) break;
        const auto& pool = cfg.request_path_pool;
        std::string path = pool.empty() ? "" : pool[rng.next_below(u32(pool.size()))];
        std::string req = "GET /" + path + " HTTP/1.1\r\nHost: " + host + "\r\nUser-Agent: " +
                          agents[rng.next_below(u32(agents.size()))] + "\r\nAccept: */*\r\n\r\n";
        ConnPlan pl;
        pl.open_ts = t;
        pl.client_pod = ctx.attacker_pod;
        pl.server_pod = ctx.victim_pod;
        pl.dport = ctx.dport;
        pl.cause = cause;
        pl.make_script = [req, cause]() {
            return std::make_shared<HttpExchangeScript>(req, true, cause);
        };
        out.conns.push_back(std::move(pl));
    }
    return out;
}

// Arms one built attack on a fabric: a self-rescheduling feeder walks the raw
// stream (so a long flood never materializes as a list in memory) and every
// planned connection gets an open event at its start time.
inline void arm_attack(Fabric& f, const BuiltAttack& b) {
    if (b.skipped) return;
    if (b.raw.count > 0) {
        auto feed = std::make_shared<std::function<void(u64)>>();
        RawStream raw = b.raw;
        Fabric* fp = &f;
        *feed = [fp, raw, feed](u64 i) {
            Packet p = raw.make(i);
            fp->inject(p.origin, std::move(p));
            if (i + 1 < raw.count) {
                u64 next_ts = raw.make(i + 1).ts_us;
                fp->schedule(next_ts, [feed, i] { (*feed)(i + 1); });
            }
        };
        f.schedule(raw.make(0).ts_us, [feed] { (*feed)(0); });
    }
    for (const ConnPlan& pl : b.conns) {
        f.schedule(pl.open_ts, [fp = &f, pl]() {
            fp->open_connection(pl.client_pod, pl.server_pod, pl.dport,
                                pl.make_script ? pl.make_script() : nullptr, pl.cause,
                                pl.adv_window);
        });
    }
}

// Builds the emission plan for one schedule row.
inline BuiltAttack build_attack(const Scenario& sc, std::size_t attack_index) {
    const AttackSpec& a = sc.attacks.at(attack_index);
    AttackContext ctx = make_attack_context(sc, attack_index);
    GeneratorConfig cfg = GeneratorConfig::from_params(a.params);
    AttackWindow w{attack_index, 0, 0};
    for (const AttackWindow& x : effective_schedule(sc))
        if (x.attack_index == attack_index) w = x;
    switch (a.type) {
        case AttackType::TcpSynFlood: return gen_syn_flood(ctx, cfg, w);
        case AttackType::IcmpFlood: return gen_icmp_flood(ctx, cfg, w);
        case AttackType::TcpSeqPrediction: return gen_tcp_seq_prediction(ctx, cfg, w);
        case AttackType::HulkGetFlood: return gen_hulk_get(ctx, cfg, w);
        case AttackType::Slowloris:
        case AttackType::SlowBody:
        case AttackType::SlowRead:
        case AttackType::SlowRange: return gen_slow_variant(ctx, cfg, w, a.type);
        case AttackType::BruteForce: return gen_brute_force(ctx, cfg, w);
        case AttackType::Heartbleed: return gen_heartbleed(ctx, cfg, w);
        case AttackType::Benign: return gen_benign_http(ctx, cfg, w);
    }
    return BuiltAttack{};
}

} // namespace netbed
