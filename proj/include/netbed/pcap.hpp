#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "netbed/hash.hpp"
#include "netbed/packet.hpp"

namespace netbed {

// Classic pcap (not pcapng), little-endian, microsecond timestamps,
// LINKTYPE_ETHERNET. Laid out by hand so the on-disk format is under test
// instead of under a library.
constexpr u32 PCAP_MAGIC = 0xa1b2c3d4;
constexpr u16 PCAP_VERSION_MAJOR = 2;
constexpr u16 PCAP_VERSION_MINOR = 4;
constexpr u32 PCAP_LINKTYPE_ETHERNET = 1;
constexpr u32 PCAP_GLOBAL_HEADER_LEN = 24;
constexpr u32 PCAP_RECORD_HEADER_LEN = 16;
constexpr u32 DEFAULT_SNAPLEN = 65535;

namespace detail {

inline void put_u32le(std::string& b, u32 v) {
    b.push_back(char(v & 0xff));
    b.push_back(char((v >> 8) & 0xff));
    b.push_back(char((v >> 16) & 0xff));
    b.push_back(char((v >> 24) & 0xff));
}

inline void put_u16le(std::string& b, u16 v) {
    b.push_back(char(v & 0xff));
    b.push_back(char((v >> 8) & 0xff));
}

inline u32 read_u32le(const u8* p) {
    return u32(p[0]) | (u32(p[1]) << 8) | (u32(p[2]) << 16) | (u32(p[3]) << 24);
}

inline u16 read_u16le(const u8* p) { return u16(u16(p[0]) | (u16(p[1]) << 8)); }

} // namespace detail

inline std::string pcap_global_header(u32 snaplen) {
    std::string h;
    h.reserve(PCAP_GLOBAL_HEADER_LEN);
    detail::put_u32le(h, PCAP_MAGIC);
    detail::put_u16le(h, PCAP_VERSION_MAJOR);
    detail::put_u16le(h, PCAP_VERSION_MINOR);
    detail::put_u32le(h, 0); // thiszone
    detail::put_u32le(h, 0); // sigfigs
    detail::put_u32le(h, snaplen);
    detail::put_u32le(h, PCAP_LINKTYPE_ETHERNET);
    return h;
}

// Streams records to disk while keeping a running SHA-256 of the exact file
// bytes, so finalizing a capture never needs to re-read what it just wrote.
class PcapWriter {
public:
    PcapWriter() = default;

    bool open(const std::filesystem::path& path, u32 snaplen = DEFAULT_SNAPLEN) {
        path_ = path;
        snaplen_ = snaplen;
        out_.open(path, std::ios::binary | std::ios::trunc);
        if (!out_) return false;
        std::string h = pcap_global_header(snaplen);
        out_.write(h.data(), std::streamsize(h.size()));
        hash_.update(h);
        bytes_ = h.size();
        return true;
    }

    bool is_open() const { return out_.is_open(); }

    void write_record(u64 ts_epoch_us, const Bytes& frame) {
        u32 orig_len = u32(frame.size());
        u32 incl_len = orig_len < snaplen_ ? orig_len : snaplen_;
        std::string hdr;
        hdr.reserve(PCAP_RECORD_HEADER_LEN);
        detail::put_u32le(hdr, u32(ts_epoch_us / 1000000));
        detail::put_u32le(hdr, u32(ts_epoch_us % 1000000));
        detail::put_u32le(hdr, incl_len);
        detail::put_u32le(hdr, orig_len);
        out_.write(hdr.data(), std::streamsize(hdr.size()));
        out_.write(reinterpret_cast<const char*>(frame.data()), incl_len);
        hash_.update(hdr);
        hash_.update(frame.data(), incl_len);
        bytes_ += hdr.size() + incl_len;
        count_++;
    }

    u64 record_count() const { return count_; }
    u64 byte_count() const { return bytes_; }
    const std::filesystem::path& path() const { return path_; }

    // Closes the stream and returns the hex SHA-256 of the file contents.
    std::string close() {
        out_.close();
        return hex_string(hash_.finish());
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    Sha256 hash_;
    u32 snaplen_ = DEFAULT_SNAPLEN;
    u64 count_ = 0;
    u64 bytes_ = PCAP_GLOBAL_HEADER_LEN;
};

struct PcapRecord {
    u64 ts_epoch_us = 0;
    u32 orig_len = 0;
    Bytes data; // captured bytes (incl_len of them)
};

struct PcapFile {
    u32 snaplen = 0;
    u32 linktype = 0;
    std::vector<PcapRecord> records;
};

struct PcapReadError {
    enum Code { OpenFailed, BadMagic, BadVersion, TruncatedHeader, TruncatedRecord } code;
    u64 offset = 0;

    std::string str() const {
        const char* name = "?";
        switch (code) {
            case OpenFailed: name = "OpenFailed"; break;
            case BadMagic: name = "BadMagic"; break;
            case BadVersion: name = "BadVersion"; break;
            case TruncatedHeader: name = "TruncatedHeader"; break;
            case TruncatedRecord: name = "TruncatedRecord"; break;
        }
        return std::string(name) + " at offset " + std::to_string(offset);
    }
};

inline std::variant<PcapFile, PcapReadError> read_pcap(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return PcapReadError{PcapReadError::OpenFailed, 0};
    std::vector<u8> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < PCAP_GLOBAL_HEADER_LEN) return PcapReadError{PcapReadError::TruncatedHeader, 0};
    u32 magic = detail::read_u32le(buf.data());
    // 0xd4c3b2a1 is our magic byte-swapped: a big-endian writer. Refuse both
    // that and anything unrecognized rather than guessing.
    if (magic != PCAP_MAGIC) return PcapReadError{PcapReadError::BadMagic, 0};
    u16 vmaj = detail::read_u16le(buf.data() + 4);
    u16 vmin = detail::read_u16le(buf.data() + 6);
    if (vmaj != PCAP_VERSION_MAJOR || vmin != PCAP_VERSION_MINOR)
        return PcapReadError{PcapReadError::BadVersion, 4};
    PcapFile f;
    f.snaplen = detail::read_u32le(buf.data() + 16);
    f.linktype = detail::read_u32le(buf.data() + 20);
    u64 off = PCAP_GLOBAL_HEADER_LEN;
    while (off < buf.size()) {
        if (off + PCAP_RECORD_HEADER_LEN > buf.size())
            return PcapReadError{PcapReadError::TruncatedRecord, off};
        PcapRecord r;
        u32 sec = detail::read_u32le(buf.data() + off);
        u32 usec = detail::read_u32le(buf.data() + off + 4);
        u32 incl = detail::read_u32le(buf.data() + off + 8);
        r.orig_len = detail::read_u32le(buf.data() + off + 12);
        r.ts_epoch_us = u64(sec) * 1000000 + usec;
        off += PCAP_RECORD_HEADER_LEN;
        if (off + incl > buf.size()) return PcapReadError{PcapReadError::TruncatedRecord, off};
        r.data.assign(buf.begin() + std::ptrdiff_t(off), buf.begin() + std::ptrdiff_t(off + incl));
        off += incl;
        f.records.push_back(std::move(r));
    }
    return f;
}

} // namespace netbed
