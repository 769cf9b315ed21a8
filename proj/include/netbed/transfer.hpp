#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "netbed/capture.hpp"
#include "netbed/fabric.hpp"
#include "netbed/hash.hpp"

namespace netbed {

constexpr u64 TRANSFER_CHUNK_BYTES = 64 * 1024;

struct TransferItem {
    std::string file;
    u64 bytes = 0;  // bytes the storage node actually received
    u64 chunks = 0; // chunks sent
    std::string sha256;        // hash of the reassembled copy
    std::string source_sha256; // hash the capture reported when finalized
    bool ok = false;
    std::string note;
};

struct TransferReceipt {
    std::string storage_node;
    std::vector<TransferItem> items;
    u64 chunks_sent = 0;
    // Overlay counters before and after; a transfer that leaks onto the
    // overlay is a plane violation and shows up as a delta here.
    EventStats overlay_before;
    EventStats overlay_after;

    bool all_ok() const {
        for (const TransferItem& it : items)
            if (!it.ok) return false;
        return true;
    }
    bool overlay_clean() const {
        return overlay_before.injected == overlay_after.injected &&
               overlay_before.delivered == overlay_after.delivered &&
               overlay_before.dropped == overlay_after.dropped;
    }
};

// Test hook: stop sending a file's chunks partway through, as if the link
// died mid-copy. The receipt must then flag the file, not pass it.
struct TransferFault {
    std::string file;
    u64 send_first = 0; // chunks to deliver before cutting off
};

// Copies finalized capture files to the storage node over the storage
// plane, one 64KiB chunk per packet, and writes what the storage node
// reassembled into dest_dir. Hashes are compared end to end: the receipt
// records the source hash from capture finalization and the hash of the
// bytes that actually arrived.
inline TransferReceipt transfer_to_storage(Fabric& f, const std::vector<CaptureFileInfo>& files,
                                           const std::filesystem::path& dest_dir,
                                           std::optional<TransferFault> fault = std::nullopt) {
    TransferReceipt receipt;
    receipt.overlay_before = f.stats();
    const Scenario& sc = f.scenario();
    const NodeSpec* storage = nullptr;
    for (const NodeSpec& n : sc.nodes)
        if (n.storage) storage = &n;
    if (!storage) {
        for (const CaptureFileInfo& info : files)
            receipt.items.push_back(
                TransferItem{info.file, 0, 0, "", info.sha256, false, "no storage node"});
        receipt.overlay_after = f.stats();
        return receipt;
    }
    receipt.storage_node = storage->name;
    std::filesystem::create_directories(dest_dir);

    std::string assembled;
    f.set_storage_handler(storage->name, [&assembled](Packet&& p) { assembled += p.payload; });

    for (const CaptureFileInfo& info : files) {
        TransferItem item;
        item.file = info.file;
        item.source_sha256 = info.sha256;

        std::ifstream in(info.path, std::ios::binary);
        if (!in) {
            item.note = "unreadable source file";
            receipt.items.push_back(std::move(item));
            continue;
        }
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

        u64 total_chunks = (bytes.size() + TRANSFER_CHUNK_BYTES - 1) / TRANSFER_CHUNK_BYTES;
        if (total_chunks == 0) total_chunks = 1; // header-only files still get copied
        u64 send = total_chunks;
        if (fault && fault->file == info.file) send = std::min(send, fault->send_first);

        assembled.clear();
        u64 base_ts = f.clock() + 1;
        for (u64 i = 0; i < send; i++) {
            Packet p;
            p.ts_us = base_ts + i;
            p.cause.kind = CauseKind::Transfer;
            Ipv4Info ip;
            for (const NodeSpec& n : sc.nodes)
                if (n.name == info.node && n.storage_addr) ip.src = *n.storage_addr;
            if (storage->storage_addr) ip.dst = *storage->storage_addr;
            p.ip = ip;
            TcpInfo t;
            t.sport = 49999;
            t.dport = 22;
            t.seq = u32(i * TRANSFER_CHUNK_BYTES);
            t.flags = tcpflag::ACK | tcpflag::PSH;
            p.l4 = t;
            std::size_t off = std::size_t(i * TRANSFER_CHUNK_BYTES);
            p.payload = bytes.substr(off, TRANSFER_CHUNK_BYTES);
            f.inject_storage(info.node, storage->name, std::move(p));
        }
        f.run_all();

        item.chunks = send;
        item.bytes = assembled.size();
        item.sha256 = sha256_hex(assembled);
        receipt.chunks_sent += send;

        std::ofstream out(dest_dir / info.file, std::ios::binary);
        out.write(assembled.data(), std::streamsize(assembled.size()));
        out.close();

        if (send < total_chunks) {
            item.note = "transfer cut off after " + std::to_string(send) + " of " +
                        std::to_string(total_chunks) + " chunks";
        } else if (item.sha256 != item.source_sha256) {
            item.note = "hash mismatch";
        } else {
            item.ok = true;
        }
        receipt.items.push_back(std::move(item));
    }
    f.set_storage_handler(storage->name, nullptr);
    receipt.overlay_after = f.stats();
    return receipt;
}

} // namespace netbed
