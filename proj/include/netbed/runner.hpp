#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "netbed/flows.hpp"
#include "netbed/generators.hpp"
#include "netbed/labeling.hpp"
#include "netbed/manifest.hpp"
#include "netbed/transfer.hpp"

namespace netbed {

struct RunOptions {
    std::filesystem::path out;
    std::optional<u64> seed;       // overrides the scenario's seed
    std::optional<u32> rotation_s; // overrides the capture rotation interval
    std::ostream* progress = nullptr;
};

struct RunError {
    std::string message;
    std::vector<Violation> violations; // set when validation failed
};

struct RunResult {
    std::filesystem::path out;
    std::string scenario_name;
    u64 seed = 0;
    std::vector<CaptureFileInfo> files;
    u64 records = 0;
    AuditReport audit;
    TransferReceipt transfer;
    EventStats overlay;
    StorageStats storage;
    std::string manifest_sha256;
    std::vector<std::string> notes; // skipped attacks and similar oddities
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(bytes.data(), std::streamsize(bytes.size()));
}

// Clears the artifacts a previous run may have left in the output directory,
// and nothing else; the directory itself may hold unrelated files.
inline void clear_run_outputs(const std::filesystem::path& out) {
    std::filesystem::remove_all(out / "captures");
    std::filesystem::remove_all(out / "storage");
    for (const char* f : {"scenario.json", "labels.tsv", "flows.tsv", "manifest.json"})
        std::filesystem::remove(out / f);
}

} // namespace detail

// Runs one scenario end to end: emulate, capture, label, audit, copy to
// storage, manifest. The output directory afterwards holds scenario.json,
// captures/*.pcap, labels.tsv, storage/* and manifest.json.
inline std::variant<RunResult, RunError> run_scenario(Scenario sc, const RunOptions& opts) {
    if (opts.seed) sc.seed = *opts.seed;
    if (opts.rotation_s) sc.capture.rotation_s = *opts.rotation_s;

    auto violations = validate(sc);
    if (!violations.empty())
        return RunError{"scenario failed validation", std::move(violations)};

    auto note = [&](const std::string& line) {
        if (opts.progress) *opts.progress << line << "\n" << std::flush;
    };

    std::error_code ec;
    std::filesystem::create_directories(opts.out, ec);
    if (ec) return RunError{"cannot create " + opts.out.string() + ": " + ec.message(), {}};
    detail::clear_run_outputs(opts.out);
    std::filesystem::create_directories(opts.out / "captures");
    std::filesystem::create_directories(opts.out / "storage");

    detail::write_file(opts.out / "scenario.json", serialize_scenario(sc));

    RunResult res;
    res.out = opts.out;
    res.scenario_name = sc.name;
    res.seed = sc.seed;

    Fabric fabric = build_fabric(sc);

    std::vector<std::unique_ptr<TapSink>> sinks;
    for (const TapSpec& tap : sc.capture.taps) {
        sinks.push_back(std::make_unique<TapSink>(opts.out / "captures", tap.node, tap.iface,
                                                  sc.capture.rotation_s, sc.capture.snaplen));
        fabric.attach_tap(tap.node, tap.iface, sinks.back().get());
    }
    note("attached " + std::to_string(sinks.size()) + " capture taps");

    // MySQL victims accept exactly one credential pair; plant the one the
    // wordlist will eventually guess so brute force can succeed.
    for (const AttackSpec& a : sc.attacks) {
        if (a.type != AttackType::BruteForce) continue;
        GeneratorConfig cfg = GeneratorConfig::from_params(a.params);
        if (cfg.true_index >= cfg.wordlist_size) continue;
        for (std::size_t i = 0; i < sc.pods.size(); i++) {
            if (sc.pods[i].name != a.victim) continue;
            auto [user, pass] = wordlist_entry(sc.seed, cfg.true_index);
            fabric.set_mysql_credentials(int(i), user, pass);
        }
    }

    u64 horizon = 0;
    for (const AttackWindow& w : effective_schedule(sc)) horizon = std::max(horizon, w.end_us);
    for (std::size_t i = 0; i < sc.attacks.size(); i++) {
        BuiltAttack built = build_attack(sc, i);
        if (built.skipped) {
            res.notes.push_back("attacks[" + std::to_string(i) + "] skipped: " +
                                built.skip_reason);
            continue;
        }
        arm_attack(fabric, built);
    }
    note("emulating " + std::to_string(horizon / 1000000) + "s of traffic");
    fabric.run_until(horizon + 2'000'000);
    fabric.run_all();
    res.overlay = fabric.stats();

    std::vector<TapSink::FinalizedFile> finals;
    for (auto& sink : sinks)
        for (auto& file : sink->finalize()) finals.push_back(std::move(file));
    for (const auto& f : finals) res.files.push_back(f.info);
    note("finalized " + std::to_string(finals.size()) + " capture files");

    auto labeled = label_dataset(sc, res.files);
    if (auto* err = std::get_if<LabelError>(&labeled))
        return RunError{"labeling failed: " + err->message, {}};
    LabeledDataset& ds = std::get<LabeledDataset>(labeled);
    res.records = ds.records.size();

    res.audit = audit_ground_truth(sc, finals, ds.records);
    note("audited " + std::to_string(res.audit.records) + " records: " +
         std::to_string(res.audit.mismatches) + " mismatches, " +
         std::to_string(res.audit.warnings) + " warnings");

    std::string labels_text = serialize_labels(ds.records);
    detail::write_file(opts.out / "labels.tsv", labels_text);

    res.transfer = transfer_to_storage(fabric, res.files, opts.out / "storage");
    res.storage = fabric.storage_stats();
    if (!res.transfer.overlay_clean())
        res.notes.push_back("transfer leaked onto the overlay");
    note("copied " + std::to_string(res.transfer.items.size()) + " files to storage");

    nlohmann::json manifest = build_manifest(sc, res.files, ds.records,
                                             sha256_hex(labels_text), res.transfer, res.audit);
    std::string manifest_text = serialize_manifest(manifest);
    detail::write_file(opts.out / "manifest.json", manifest_text);
    res.manifest_sha256 = sha256_hex(manifest_text);
    return res;
}

} // namespace netbed
