#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace netbed {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

// IPv4 address held in host byte order so arithmetic and subnet masks work
// the obvious way. Byte order is only a concern when serializing frames.
struct Ipv4Addr {
    u32 value = 0;

    static constexpr Ipv4Addr from_octets(u8 a, u8 b, u8 c, u8 d) {
        return Ipv4Addr{(u32(a) << 24) | (u32(b) << 16) | (u32(c) << 8) | u32(d)};
    }

    static std::optional<Ipv4Addr> parse(std::string_view s) {
        u32 parts[4];
        int idx = 0;
        u64 cur = 0;
        bool have_digit = false;
        for (char ch : s) {
            if (ch >= '0' && ch <= '9') {
                cur = cur * 10 + u64(ch - '0');
                if (cur > 255) return std::nullopt;
                have_digit = true;
            } else if (ch == '.') {
                if (!have_digit || idx >= 3) return std::nullopt;
                parts[idx++] = u32(cur);
                cur = 0;
                have_digit = false;
            } else {
                return std::nullopt;
            }
        }
        if (!have_digit || idx != 3) return std::nullopt;
        parts[3] = u32(cur);
        return Ipv4Addr{(parts[0] << 24) | (parts[1] << 16) | (parts[2] << 8) | parts[3]};
    }

    std::string str() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%u.%u.%u.%u",
                      (value >> 24) & 0xff, (value >> 16) & 0xff,
                      (value >> 8) & 0xff, value & 0xff);
        return buf;
    }

    constexpr auto operator<=>(const Ipv4Addr&) const = default;
};

// CIDR block, e.g. 10.34.0.0/24. Stored normalized (host bits cleared).
struct Cidr {
    Ipv4Addr network;
    u8 prefix = 0;

    static std::optional<Cidr> parse(std::string_view s) {
        auto slash = s.rfind('/');
        if (slash == std::string_view::npos) return std::nullopt;
        auto addr = Ipv4Addr::parse(s.substr(0, slash));
        if (!addr) return std::nullopt;
        auto plen_str = s.substr(slash + 1);
        if (plen_str.empty() || plen_str.size() > 2) return std::nullopt;
        u32 plen = 0;
        for (char ch : plen_str) {
            if (ch < '0' || ch > '9') return std::nullopt;
            plen = plen * 10 + u32(ch - '0');
        }
        if (plen > 32) return std::nullopt;
        Cidr c{*addr, u8(plen)};
        c.network.value &= c.mask();
        return c;
    }

    constexpr u32 mask() const {
        return prefix == 0 ? 0 : (~u32(0) << (32 - prefix));
    }

    constexpr bool contains(Ipv4Addr a) const {
        return (a.value & mask()) == network.value;
    }

    bool overlaps(const Cidr& other) const {
        return contains(other.network) || other.contains(network);
    }

    std::string str() const {
        return network.str() + "/" + std::to_string(prefix);
    }

    constexpr auto operator<=>(const Cidr&) const = default;
};

struct Mac {
    std::array<u8, 6> bytes{};

    std::string str() const {
        char buf[18];
        std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x",
                      bytes[0], bytes[1], bytes[2], bytes[3], bytes[4], bytes[5]);
        return buf;
    }

    constexpr auto operator<=>(const Mac&) const = default;
};

} // namespace netbed
