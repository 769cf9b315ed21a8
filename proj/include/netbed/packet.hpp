#pragma once

#include <cstring>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "netbed/net.hpp"

namespace netbed {

using Bytes = std::vector<u8>;

// TCP flag bits as they appear in the wire header.
namespace tcpflag {
constexpr u8 FIN = 0x01;
constexpr u8 SYN = 0x02;
constexpr u8 RST = 0x04;
constexpr u8 PSH = 0x08;
constexpr u8 ACK = 0x10;
} // namespace tcpflag

constexpr u32 MSS = 1460;

struct TcpInfo {
    u16 sport = 0;
    u16 dport = 0;
    u32 seq = 0;
    u32 ack = 0;
    u8 flags = 0;
    u16 window = 65535;
};

struct UdpInfo {
    u16 sport = 0;
    u16 dport = 0;
};

struct IcmpInfo {
    u8 type = 8; // echo request
    u8 code = 0;
    u16 id = 0;
    u16 seq = 0;
};

// A TLS record carried over TCP. Serialized as a TCP segment whose payload
// is the record framing (type, version, length, body); parse_frame sees it
// back as plain TCP, which is all the labeling pipeline needs.
struct TlsRecordInfo {
    TcpInfo tcp;
    u8 content_type = 22;
    u16 version = 0x0302;
    std::string body;
};

using L4 = std::variant<std::monostate, TcpInfo, UdpInfo, IcmpInfo, TlsRecordInfo>;

struct Ipv4Info {
    Ipv4Addr src;
    Ipv4Addr dst;
    u8 proto = 6;
    u8 ttl = 64;
    u16 id = 0;
};

enum class CauseKind : u8 { Attack, Benign, Transfer, Infra };

// Hidden audit metadata. Travels with the packet through the fabric and into
// the capture tap bookkeeping, but is never serialized into frame bytes, so
// the labeler cannot cheat by reading it. Pod identities are indices into
// the scenario's pod list; -1 means "not a pod" (infrastructure).
struct Cause {
    CauseKind kind = CauseKind::Infra;
    i64 window = -1;    // attack list index the packet belongs to
    int client = -1;    // pod index of the benign client (Benign only)
    int server = -1;    // pod index of the benign server (Benign only)

    bool operator==(const Cause&) const = default;
};

struct Packet {
    u64 ts_us = 0;
    Mac src_mac;
    Mac dst_mac;
    std::optional<Ipv4Info> ip;
    L4 l4;
    std::string payload; // TCP/UDP payload or ICMP data; unused for TlsRecordInfo

    int origin = -1; // pod index that emitted the packet (audit metadata)
    Cause cause;
};

namespace detail {

inline void put_u16(Bytes& b, u16 v) {
    b.push_back(u8(v >> 8));
    b.push_back(u8(v));
}

inline void put_u32(Bytes& b, u32 v) {
    b.push_back(u8(v >> 24));
    b.push_back(u8(v >> 16));
    b.push_back(u8(v >> 8));
    b.push_back(u8(v));
}

inline u16 read_u16(const u8* p) { return u16((u16(p[0]) << 8) | p[1]); }
inline u32 read_u32(const u8* p) {
    return (u32(p[0]) << 24) | (u32(p[1]) << 16) | (u32(p[2]) << 8) | u32(p[3]);
}

// RFC 1071 internet checksum over a byte range, with an optional seed for
// pseudo-header folding.
inline u16 inet_checksum(const u8* data, std::size_t len, u32 sum = 0) {
    for (std::size_t i = 0; i + 1 < len; i += 2) sum += (u32(data[i]) << 8) | data[i + 1];
    if (len & 1) sum += u32(data[len - 1]) << 8;
    while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
    return u16(~sum);
}

inline u32 pseudo_header_sum(const Ipv4Info& ip, u16 l4_len) {
    u32 sum = 0;
    sum += ip.src.value >> 16;
    sum += ip.src.value & 0xffff;
    sum += ip.dst.value >> 16;
    sum += ip.dst.value & 0xffff;
    sum += ip.proto;
    sum += l4_len;
    return sum;
}

} // namespace detail

inline std::string tls_record_bytes(const TlsRecordInfo& r) {
    std::string out;
    out.push_back(char(r.content_type));
    out.push_back(char(r.version >> 8));
    out.push_back(char(r.version & 0xff));
    out.push_back(char(r.body.size() >> 8));
    out.push_back(char(r.body.size() & 0xff));
    out += r.body;
    return out;
}

// Builds the full Ethernet frame for a packet. The same packet always
// serializes to the same bytes, so every tap that sees it records an
// identical record body (modulo the TTL decrement applied mid-path).
inline Bytes serialize_frame(const Packet& p) {
    Bytes b;
    b.reserve(64 + p.payload.size());
    b.insert(b.end(), p.dst_mac.bytes.begin(), p.dst_mac.bytes.end());
    b.insert(b.end(), p.src_mac.bytes.begin(), p.src_mac.bytes.end());
    if (!p.ip) {
        detail::put_u16(b, 0x88b5); // local experimental ethertype
        b.insert(b.end(), p.payload.begin(), p.payload.end());
        return b;
    }
    detail::put_u16(b, 0x0800);

    const std::string* payload = &p.payload;
    std::string tls_buf;
    Bytes l4;
    const Ipv4Info& ip = *p.ip;
    if (auto* tls = std::get_if<TlsRecordInfo>(&p.l4)) {
        tls_buf = tls_record_bytes(*tls);
        payload = &tls_buf;
    }

    if (std::holds_alternative<TcpInfo>(p.l4) || std::holds_alternative<TlsRecordInfo>(p.l4)) {
        const TcpInfo& t = std::holds_alternative<TcpInfo>(p.l4)
                               ? std::get<TcpInfo>(p.l4)
                               : std::get<TlsRecordInfo>(p.l4).tcp;
        detail::put_u16(l4, t.sport);
        detail::put_u16(l4, t.dport);
        detail::put_u32(l4, t.seq);
        detail::put_u32(l4, t.ack);
        l4.push_back(0x50); // data offset 5 words, no options
        l4.push_back(t.flags);
        detail::put_u16(l4, t.window);
        detail::put_u16(l4, 0); // checksum placeholder
        detail::put_u16(l4, 0); // urgent pointer
        l4.insert(l4.end(), payload->begin(), payload->end());
        u16 sum = detail::inet_checksum(l4.data(), l4.size(),
                                        detail::pseudo_header_sum(ip, u16(l4.size())));
        l4[16] = u8(sum >> 8);
        l4[17] = u8(sum);
    } else if (auto* u = std::get_if<UdpInfo>(&p.l4)) {
        detail::put_u16(l4, u->sport);
        detail::put_u16(l4, u->dport);
        detail::put_u16(l4, u16(8 + payload->size()));
        detail::put_u16(l4, 0);
        l4.insert(l4.end(), payload->begin(), payload->end());
        u16 sum = detail::inet_checksum(l4.data(), l4.size(),
                                        detail::pseudo_header_sum(ip, u16(l4.size())));
        if (sum == 0) sum = 0xffff;
        l4[6] = u8(sum >> 8);
        l4[7] = u8(sum);
    } else if (auto* ic = std::get_if<IcmpInfo>(&p.l4)) {
        l4.push_back(ic->type);
        l4.push_back(ic->code);
        detail::put_u16(l4, 0);
        detail::put_u16(l4, ic->id);
        detail::put_u16(l4, ic->seq);
        l4.insert(l4.end(), payload->begin(), payload->end());
        u16 sum = detail::inet_checksum(l4.data(), l4.size());
        l4[2] = u8(sum >> 8);
        l4[3] = u8(sum);
    } else {
        l4.insert(l4.end(), payload->begin(), payload->end());
    }

    // Oversize payloads (storage-plane chunks) would overflow the 16-bit
    // total length field; saturate instead of wrapping.
    u64 total = 20 + l4.size();
    u16 total_len = total > 0xffff ? u16(0xffff) : u16(total);

    Bytes iph;
    iph.push_back(0x45);
    iph.push_back(0x00);
    detail::put_u16(iph, total_len);
    detail::put_u16(iph, ip.id);
    detail::put_u16(iph, 0x4000); // DF
    iph.push_back(ip.ttl);
    iph.push_back(ip.proto);
    detail::put_u16(iph, 0);
    detail::put_u32(iph, ip.src.value);
    detail::put_u32(iph, ip.dst.value);
    u16 sum = detail::inet_checksum(iph.data(), iph.size());
    iph[10] = u8(sum >> 8);
    iph[11] = u8(sum);

    b.insert(b.end(), iph.begin(), iph.end());
    b.insert(b.end(), l4.begin(), l4.end());
    return b;
}

enum class ParseError { TooShort, BadIpHeader, BadL4Header };

// Reconstructs header fields from frame bytes. Origin and cause metadata do
// not exist on the wire, so the result always carries the defaults; that is
// the point: labeling must work from these fields alone. TLS records come
// back as plain TCP segments with the record framing left in the payload.
inline std::variant<Packet, ParseError> parse_frame(const Bytes& frame, u64 ts_us = 0) {
    if (frame.size() < 14) return ParseError::TooShort;
    Packet p;
    p.ts_us = ts_us;
    std::memcpy(p.dst_mac.bytes.data(), frame.data(), 6);
    std::memcpy(p.src_mac.bytes.data(), frame.data() + 6, 6);
    u16 ethertype = detail::read_u16(frame.data() + 12);
    if (ethertype != 0x0800) {
        p.payload.assign(frame.begin() + 14, frame.end());
        return p;
    }
    if (frame.size() < 34) return ParseError::BadIpHeader;
    const u8* ih = frame.data() + 14;
    if ((ih[0] >> 4) != 4) return ParseError::BadIpHeader;
    u32 ihl = u32(ih[0] & 0xf) * 4;
    if (ihl < 20 || frame.size() < 14 + ihl) return ParseError::BadIpHeader;
    Ipv4Info ip;
    ip.id = detail::read_u16(ih + 4);
    ip.ttl = ih[8];
    ip.proto = ih[9];
    ip.src = Ipv4Addr{detail::read_u32(ih + 12)};
    ip.dst = Ipv4Addr{detail::read_u32(ih + 16)};
    p.ip = ip;

    u16 total_len = detail::read_u16(ih + 2);
    std::size_t avail = frame.size() - 14 - ihl;
    std::size_t l4_len = std::min<std::size_t>(avail, total_len > ihl ? total_len - ihl : avail);
    const u8* l4 = ih + ihl;

    if (ip.proto == 6) {
        if (l4_len < 20) return ParseError::BadL4Header;
        TcpInfo t;
        t.sport = detail::read_u16(l4);
        t.dport = detail::read_u16(l4 + 2);
        t.seq = detail::read_u32(l4 + 4);
        t.ack = detail::read_u32(l4 + 8);
        u32 doff = u32(l4[12] >> 4) * 4;
        if (doff < 20 || l4_len < doff) return ParseError::BadL4Header;
        t.flags = l4[13];
        t.window = detail::read_u16(l4 + 14);
        p.l4 = t;
        p.payload.assign(l4 + doff, l4 + l4_len);
    } else if (ip.proto == 17) {
        if (l4_len < 8) return ParseError::BadL4Header;
        UdpInfo u;
        u.sport = detail::read_u16(l4);
        u.dport = detail::read_u16(l4 + 2);
        p.l4 = u;
        p.payload.assign(l4 + 8, l4 + l4_len);
    } else if (ip.proto == 1) {
        if (l4_len < 8) return ParseError::BadL4Header;
        IcmpInfo ic;
        ic.type = l4[0];
        ic.code = l4[1];
        ic.id = detail::read_u16(l4 + 4);
        ic.seq = detail::read_u16(l4 + 6);
        p.l4 = ic;
        p.payload.assign(l4 + 8, l4 + l4_len);
    } else {
        p.payload.assign(l4, l4 + l4_len);
    }
    return p;
}

// Recomputes the IPv4 (and, when cheap, L4) checksums of a serialized frame
// and reports whether the stored values match. Test helper.
inline bool verify_frame_checksums(const Bytes& frame) {
    if (frame.size() < 34) return false;
    const u8* ih = frame.data() + 14;
    u32 ihl = u32(ih[0] & 0xf) * 4;
    if (detail::inet_checksum(ih, ihl) != 0) return false;
    u8 proto = ih[9];
    u16 total_len = detail::read_u16(ih + 2);
    if (14 + std::size_t(total_len) > frame.size()) return true; // saturated length
    std::size_t l4_len = total_len - ihl;
    if (proto == 6 || proto == 17) {
        Ipv4Info ip;
        ip.src = Ipv4Addr{detail::read_u32(ih + 12)};
        ip.dst = Ipv4Addr{detail::read_u32(ih + 16)};
        ip.proto = proto;
        u16 sum = detail::inet_checksum(ih + ihl, l4_len,
                                        detail::pseudo_header_sum(ip, u16(l4_len)));
        return sum == 0 || (proto == 17 && sum == 0xffff);
    }
    if (proto == 1) return detail::inet_checksum(ih + ihl, l4_len) == 0;
    return true;
}

// Convenience accessors used throughout labeling and flow extraction.
inline const TcpInfo* tcp_of(const Packet& p) {
    if (auto* t = std::get_if<TcpInfo>(&p.l4)) return t;
    if (auto* r = std::get_if<TlsRecordInfo>(&p.l4)) return &r->tcp;
    return nullptr;
}

inline u16 src_port_of(const Packet& p) {
    if (auto* t = tcp_of(p)) return t->sport;
    if (auto* u = std::get_if<UdpInfo>(&p.l4)) return u->sport;
    return 0;
}

inline u16 dst_port_of(const Packet& p) {
    if (auto* t = tcp_of(p)) return t->dport;
    if (auto* u = std::get_if<UdpInfo>(&p.l4)) return u->dport;
    return 0;
}

} // namespace netbed
