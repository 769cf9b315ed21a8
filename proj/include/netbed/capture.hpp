#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "netbed/packet.hpp"
#include "netbed/pcap.hpp"

namespace netbed {

// Simulated runs are pinned to this epoch (2022-02-01T00:00:00Z) so capture
// timestamps land in the collection period the datasets describe.
constexpr u64 SIM_EPOCH_US = 1643673600ull * 1000000ull;

enum class Direction : u8 { Ingress, Egress };

inline const char* direction_name(Direction d) {
    return d == Direction::Ingress ? "in" : "out";
}

struct Verdict {
    enum Kind : u8 { Pass, Drop, Redirect } kind = Pass;
    std::string redirect_iface;

    static Verdict pass() { return Verdict{}; }
    static Verdict drop() { return Verdict{Drop, {}}; }
    static Verdict redirect(std::string iface) { return Verdict{Redirect, std::move(iface)}; }
};

// An XDP-style program: pure function of the packet it inspects.
using HookProgram = std::function<Verdict(const Packet&)>;

struct CaptureFileInfo {
    std::filesystem::path path;
    std::string file; // basename, as referenced by labels and the manifest
    std::string node;
    std::string iface;
    Direction direction = Direction::Ingress;
    u32 slot = 0;
    u64 records = 0;
    std::string sha256;
};

// Rotating pcap sink for one tapped interface. Records are fed strictly in
// timestamp order per direction; the sink splits them into per-slot files
// named <node>_<iface>_<direction>_<slot>.pcap and keeps the hidden cause of
// every record so the audit can replay the ground truth afterwards.
class TapSink {
public:
    TapSink(std::filesystem::path dir, std::string node, std::string iface, u32 rotation_s,
            u32 snaplen)
        : dir_(std::move(dir)),
          node_(std::move(node)),
          iface_(std::move(iface)),
          rotation_us_(u64(rotation_s) * 1000000),
          snaplen_(snaplen) {}

    const std::string& node() const { return node_; }
    const std::string& iface() const { return iface_; }

    void record(Direction d, u64 ts_us, const Bytes& frame, const Cause& cause, int origin) {
        u32 slot = u32(ts_us / rotation_us_);
        Stream& s = streams_[{d, slot}];
        if (!s.writer.is_open()) {
            s.info.node = node_;
            s.info.iface = iface_;
            s.info.direction = d;
            s.info.slot = slot;
            s.info.file = file_name(d, slot);
            s.info.path = dir_ / s.info.file;
            s.writer.open(s.info.path, snaplen_);
        }
        s.writer.write_record(SIM_EPOCH_US + ts_us, frame);
        s.causes.push_back(cause);
        s.origins.push_back(origin);
        count_[int(d)]++;
    }

    u64 records(Direction d) const { return count_[int(d)]; }

    struct FinalizedFile {
        CaptureFileInfo info;
        std::vector<Cause> causes;
        std::vector<int> origins;
    };

    // Closes every writer. Directions that saw no traffic still produce a
    // header-only slot-0 file, so the dataset layout is uniform.
    std::vector<FinalizedFile> finalize() {
        for (Direction d : {Direction::Ingress, Direction::Egress}) {
            bool any = false;
            for (const auto& [key, s] : streams_)
                if (key.first == d) any = true;
            if (!any) {
                Stream& s = streams_[{d, 0}];
                s.info.node = node_;
                s.info.iface = iface_;
                s.info.direction = d;
                s.info.slot = 0;
                s.info.file = file_name(d, 0);
                s.info.path = dir_ / s.info.file;
                s.writer.open(s.info.path, snaplen_);
            }
        }
        std::vector<FinalizedFile> out;
        for (auto& [key, s] : streams_) {
            s.info.records = s.writer.record_count();
            s.info.sha256 = s.writer.close();
            out.push_back(FinalizedFile{s.info, std::move(s.causes), std::move(s.origins)});
        }
        streams_.clear();
        return out;
    }

private:
    std::string file_name(Direction d, u32 slot) const {
        char slot_str[8];
        std::snprintf(slot_str, sizeof slot_str, "%03u", slot);
        return node_ + "_" + iface_ + "_" + direction_name(d) + "_" + slot_str + ".pcap";
    }

    struct Stream {
        PcapWriter writer;
        CaptureFileInfo info;
        std::vector<Cause> causes;
        std::vector<int> origins;
    };

    std::filesystem::path dir_;
    std::string node_;
    std::string iface_;
    u64 rotation_us_;
    u32 snaplen_;
    std::map<std::pair<Direction, u32>, Stream> streams_;
    u64 count_[2] = {0, 0};
};

} // namespace netbed
