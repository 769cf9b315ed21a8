#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "netbed/capture.hpp"
#include "netbed/flows.hpp"
#include "netbed/labeling.hpp"
#include "netbed/scenario_io.hpp"
#include "netbed/transfer.hpp"

namespace netbed {

inline const char* MANIFEST_FORMAT = "netbed-manifest/1";

// Everything a consumer needs to verify a dataset without rerunning it:
// which scenario produced it (by content digest), every capture file with
// its hash, the label table hash and tallies, when each attack ran, the
// storage receipt and the audit verdict. Serialized with sorted keys and LF
// newlines so the same run always yields the same bytes.
inline nlohmann::json build_manifest(const Scenario& sc,
                                     const std::vector<CaptureFileInfo>& files,
                                     const std::vector<LabelRecord>& labels,
                                     const std::string& labels_sha256,
                                     const TransferReceipt& receipt, const AuditReport& audit) {
    nlohmann::json m;
    m["format"] = MANIFEST_FORMAT;

    m["scenario"] = {
        {"name", sc.name},
        {"seed", sc.seed},
        {"digest", sha256_hex(serialize_scenario(sc))},
        {"path", "scenario.json"},
    };

    nlohmann::json jfiles = nlohmann::json::array();
    for (const CaptureFileInfo& f : files) {
        jfiles.push_back({
            {"path", "captures/" + f.file},
            {"node", f.node},
            {"interface", f.iface},
            {"direction", direction_name(f.direction)},
            {"slot", f.slot},
            {"packet_count", f.records},
            {"sha256", f.sha256},
        });
    }
    m["files"] = std::move(jfiles);

    u64 attack = 0, benign = 0, infra = 0;
    for (const LabelRecord& r : labels) {
        if (r.kind == LabelKind::Attack) attack++;
        else if (r.kind == LabelKind::Benign) benign++;
        else infra++;
    }
    m["labels"] = {
        {"path", "labels.tsv"},
        {"sha256", labels_sha256},
        {"records", labels.size()},
        {"attack", attack},
        {"benign", benign},
        {"infrastructure", infra},
    };

    nlohmann::json windows = nlohmann::json::array();
    for (const AttackWindow& w : effective_schedule(sc)) {
        const AttackSpec& a = sc.attacks[w.attack_index];
        windows.push_back({
            {"attack", w.attack_index},
            {"type", attack_type_name(a.type)},
            {"start_us", w.start_us},
            {"duration_us", w.end_us - w.start_us},
            {"attacker", a.attacker},
            {"victim", a.victim},
        });
    }
    m["attack_windows"] = std::move(windows);

    nlohmann::json items = nlohmann::json::array();
    for (const TransferItem& it : receipt.items) {
        items.push_back({
            {"file", it.file},
            {"bytes", it.bytes},
            {"chunks", it.chunks},
            {"sha256", it.sha256},
            {"ok", it.ok},
        });
    }
    m["transfer"] = {
        {"storage_node", receipt.storage_node},
        {"chunk_bytes", TRANSFER_CHUNK_BYTES},
        {"items", std::move(items)},
        {"ok", receipt.all_ok()},
    };

    m["audit"] = {
        {"records", audit.records},
        {"coverage_percent", audit.coverage_percent()},
        {"mismatches", audit.mismatches},
        {"warnings", audit.warnings},
    };
    return m;
}

inline std::string serialize_manifest(const nlohmann::json& m) { return m.dump(2) + "\n"; }

} // namespace netbed
