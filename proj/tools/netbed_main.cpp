// Command-line front end: run scenarios into datasets, validate scenario
// files, audit emitted datasets, extract flow tables and list presets.
// Progress goes to stderr, results to stdout. Exit codes: 0 success,
// 1 operational error, 2 scenario validation failure, 3 audit failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "netbed/flows.hpp"
#include "netbed/presets.hpp"
#include "netbed/runner.hpp"
#include "netbed/scenario_io.hpp"

using namespace netbed;

namespace {

std::optional<std::string> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct RunArgs {
    std::string scenario_path;
    std::string preset_name;
    std::string out;
    std::optional<u64> seed;
    std::optional<u32> rotation;
    bool porcelain = false;
};

int cmd_run(const RunArgs& args) {
    Scenario sc;
    if (!args.preset_name.empty()) {
        auto p = preset(args.preset_name);
        if (!p) {
            std::cerr << "netbed: unknown preset '" << args.preset_name
                      << "' (see `netbed presets`)\n";
            return 1;
        }
        sc = std::move(*p);
    } else {
        auto loaded = load_scenario(args.scenario_path);
        if (auto* err = std::get_if<IoError>(&loaded)) {
            std::cerr << "netbed: " << args.scenario_path << ": " << err->message << "\n";
            return 1;
        }
        sc = std::get<Scenario>(std::move(loaded));
    }

    RunOptions opts;
    opts.out = args.out;
    opts.seed = args.seed;
    opts.rotation_s = args.rotation;
    opts.progress = &std::cerr;

    auto got = run_scenario(std::move(sc), opts);
    if (auto* err = std::get_if<RunError>(&got)) {
        if (!err->violations.empty()) {
            for (const Violation& v : err->violations) std::cout << v.str() << "\n";
            std::cerr << "netbed: scenario failed validation with " << err->violations.size()
                      << " violation(s)\n";
            return 2;
        }
        std::cerr << "netbed: " << err->message << "\n";
        return 1;
    }
    const RunResult& res = std::get<RunResult>(got);
    for (const std::string& note : res.notes) std::cerr << "netbed: note: " << note << "\n";

    bool ok = res.audit.pass() && res.transfer.all_ok() && res.transfer.overlay_clean();
    if (args.porcelain) {
        char coverage[32];
        std::snprintf(coverage, sizeof coverage, "%.2f", res.audit.coverage_percent());
        std::cout << "scenario=" << res.scenario_name << "\n"
                  << "seed=" << res.seed << "\n"
                  << "out=" << res.out.string() << "\n"
                  << "files=" << res.files.size() << "\n"
                  << "records=" << res.records << "\n"
                  << "coverage=" << coverage << "\n"
                  << "mismatches=" << res.audit.mismatches << "\n"
                  << "warnings=" << res.audit.warnings << "\n"
                  << "transfer=" << (res.transfer.all_ok() ? "ok" : "failed") << "\n"
                  << "manifest_sha256=" << res.manifest_sha256 << "\n"
                  << "audit=" << (ok ? "pass" : "fail") << "\n";
    } else {
        std::cout << "wrote " << res.files.size() << " capture files (" << res.records
                  << " packets) to " << res.out.string() << "\n"
                  << "ground truth: " << res.audit.coverage_percent() << "% coverage, "
                  << res.audit.mismatches << " mismatches, " << res.audit.warnings
                  << " warnings\n"
                  << "storage copy: " << (res.transfer.all_ok() ? "verified" : "FAILED") << "\n"
                  << "manifest: " << res.manifest_sha256 << "\n";
        if (!ok) std::cout << "audit FAILED";
        if (!ok && !res.audit.first_mismatch.empty())
            std::cout << " (" << res.audit.first_mismatch << ")";
        if (!ok) std::cout << "\n";
    }
    return ok ? 0 : 3;
}

int cmd_validate(const std::string& path) {
    auto loaded = load_scenario(path);
    if (auto* err = std::get_if<IoError>(&loaded)) {
        std::cout << "[ParseError] " << path << ": " << err->message << "\n";
        return 2;
    }
    const Scenario& sc = std::get<Scenario>(loaded);
    auto violations = validate(sc);
    for (const Violation& v : violations) std::cout << v.str() << "\n";
    if (!violations.empty()) return 2;
    std::cout << "ok: " << sc.name << " (" << sc.nodes.size() << " nodes, " << sc.pods.size()
              << " pods, " << sc.attacks.size() << " attack windows)\n";
    return 0;
}

// Re-derives everything the manifest claims from the files on disk: hashes,
// record counts, label assignments and the storage copies. Prints one line
// per problem and fails if there were any.
int cmd_audit(const std::string& dir_arg) {
    std::filesystem::path dir = dir_arg;
    std::vector<std::string> problems;
    auto bad = [&](const std::string& what) { problems.push_back(what); };

    auto manifest_text = read_file(dir / "manifest.json");
    if (!manifest_text) {
        std::cout << "audit: missing or unreadable " << (dir / "manifest.json").string() << "\n";
        return 3;
    }
    nlohmann::json m = nlohmann::json::parse(*manifest_text, nullptr, false);
    if (m.is_discarded() || m.value("format", "") != MANIFEST_FORMAT) {
        std::cout << "audit: manifest.json is not a recognized manifest\n";
        return 3;
    }

    std::optional<Scenario> sc;
    if (auto text = read_file(dir / "scenario.json")) {
        if (sha256_hex(*text) != m["scenario"].value("digest", ""))
            bad("scenario.json does not match the manifest digest");
        auto parsed = parse_scenario_text(*text);
        if (auto* err = std::get_if<IoError>(&parsed))
            bad("scenario.json: " + err->message);
        else
            sc = std::get<Scenario>(std::move(parsed));
    } else {
        bad("missing scenario.json");
    }

    std::vector<CaptureFileInfo> infos;
    for (const auto& jf : m["files"]) {
        std::string rel = jf.value("path", "");
        std::filesystem::path path = dir / rel;
        CaptureFileInfo info;
        info.path = path;
        info.file = path.filename().string();
        auto bytes = read_file(path);
        if (!bytes) {
            bad("missing capture file " + rel);
            continue;
        }
        if (sha256_hex(*bytes) != jf.value("sha256", "")) {
            bad("capture file " + rel + " does not match its recorded hash");
            continue;
        }
        auto parsed = read_pcap(path);
        if (auto* err = std::get_if<PcapReadError>(&parsed)) {
            bad("capture file " + rel + " unreadable: " + err->str());
            continue;
        }
        u64 n = std::get<PcapFile>(parsed).records.size();
        if (n != jf.value("packet_count", u64(0)))
            bad("capture file " + rel + " holds " + std::to_string(n) +
                " records, manifest says " + std::to_string(jf.value("packet_count", u64(0))));
        infos.push_back(std::move(info));
    }

    auto labels_text = read_file(dir / "labels.tsv");
    if (!labels_text) {
        bad("missing labels.tsv");
    } else {
        if (sha256_hex(*labels_text) != m["labels"].value("sha256", ""))
            bad("labels.tsv does not match its recorded hash");
        auto table = parse_labels_text(*labels_text);
        if (auto* err = std::get_if<LabelError>(&table)) {
            bad("labels.tsv: " + err->message);
        } else if (sc && infos.size() == m["files"].size()) {
            // Independent relabeling from the capture bytes; the stored
            // table must agree record for record.
            auto relabeled = label_dataset(*sc, infos);
            if (auto* err2 = std::get_if<LabelError>(&relabeled)) {
                bad("relabeling failed: " + err2->message);
            } else {
                auto& fresh = std::get<LabeledDataset>(relabeled).records;
                auto& stored = std::get<std::vector<LabelRecord>>(table);
                if (fresh.size() != stored.size()) {
                    bad("labels.tsv holds " + std::to_string(stored.size()) +
                        " records, captures hold " + std::to_string(fresh.size()));
                } else {
                    for (std::size_t i = 0; i < fresh.size(); i++) {
                        if (fresh[i] == stored[i]) continue;
                        bad("label disagreement at " + stored[i].file + "#" +
                            std::to_string(stored[i].record));
                        break;
                    }
                }
            }
        }
    }

    for (const auto& item : m["transfer"]["items"]) {
        std::string name = item.value("file", "");
        if (!item.value("ok", false)) {
            bad("storage copy of " + name + " was not verified at run time");
            continue;
        }
        auto bytes = read_file(dir / "storage" / name);
        if (!bytes) {
            bad("missing storage copy " + name);
            continue;
        }
        if (sha256_hex(*bytes) != item.value("sha256", ""))
            bad("storage copy " + name + " does not match its recorded hash");
    }

    if (sc) {
        auto windows = effective_schedule(*sc);
        if (windows.size() != m["attack_windows"].size())
            bad("manifest lists " + std::to_string(m["attack_windows"].size()) +
                " attack windows, scenario defines " + std::to_string(windows.size()));
    }

    for (const std::string& p : problems) std::cout << "audit: " << p << "\n";
    if (!problems.empty()) {
        std::cout << "audit FAILED with " << problems.size() << " problem(s)\n";
        return 3;
    }
    std::cout << "audit ok: " << m["files"].size() << " capture files, "
              << m["labels"].value("records", u64(0)) << " labeled records, "
              << m["audit"].value("mismatches", u64(~0ull)) << " mismatches\n";
    return 0;
}

int cmd_flows(const std::string& dir_arg) {
    std::filesystem::path dir = dir_arg;
    auto manifest_text = read_file(dir / "manifest.json");
    if (!manifest_text) {
        std::cerr << "netbed: missing or unreadable " << (dir / "manifest.json").string() << "\n";
        return 1;
    }
    nlohmann::json m = nlohmann::json::parse(*manifest_text, nullptr, false);
    if (m.is_discarded()) {
        std::cerr << "netbed: manifest.json is not valid JSON\n";
        return 1;
    }
    auto scenario_text = read_file(dir / "scenario.json");
    if (!scenario_text) {
        std::cerr << "netbed: missing scenario.json\n";
        return 1;
    }
    auto parsed = parse_scenario_text(*scenario_text);
    if (auto* err = std::get_if<IoError>(&parsed)) {
        std::cerr << "netbed: scenario.json: " << err->message << "\n";
        return 1;
    }
    Scenario sc = std::get<Scenario>(std::move(parsed));

    std::vector<CaptureFileInfo> infos;
    for (const auto& jf : m["files"]) {
        CaptureFileInfo info;
        info.path = dir / jf.value("path", "");
        info.file = info.path.filename().string();
        infos.push_back(std::move(info));
    }
    auto got = extract_flows(sc, infos);
    if (auto* err = std::get_if<LabelError>(&got)) {
        std::cerr << "netbed: " << err->message << "\n";
        return 1;
    }
    FlowDataset& ds = std::get<FlowDataset>(got);
    std::filesystem::path out_path = dir / "flows.tsv";
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "netbed: cannot write " << out_path.string() << "\n";
        return 1;
    }
    std::string text = serialize_flows(ds.flows);
    out.write(text.data(), std::streamsize(text.size()));
    std::cout << ds.flows.size() << " flows from " << ds.records << " records -> "
              << out_path.string() << "\n";
    return 0;
}

int cmd_presets() {
    for (const std::string& name : preset_names())
        std::printf("%-26s %s\n", name.c_str(), preset_description(name).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scenario-driven attack traffic emulator and dataset builder"};
    app.require_subcommand(1);

    RunArgs run_args;
    u64 seed_val = 0;
    u32 rotation_val = 0;
    CLI::App* run = app.add_subcommand("run", "run a scenario and emit a labeled dataset");
    CLI::Option* opt_scenario =
        run->add_option("--scenario", run_args.scenario_path, "scenario file to run");
    CLI::Option* opt_preset =
        run->add_option("--preset", run_args.preset_name, "built-in scenario to run");
    opt_scenario->excludes(opt_preset);
    opt_preset->excludes(opt_scenario);
    run->add_option("--out", run_args.out, "output directory for the dataset")->required();
    CLI::Option* opt_seed = run->add_option("--seed", seed_val, "override the scenario seed");
    CLI::Option* opt_rotation =
        run->add_option("--rotation", rotation_val, "capture rotation interval, seconds");
    run->add_flag("--porcelain", run_args.porcelain, "machine-readable key=value output");

    std::string validate_path;
    CLI::App* validate_cmd = app.add_subcommand("validate", "check a scenario file");
    validate_cmd->add_option("path", validate_path, "scenario file")->required();

    std::string audit_dir;
    CLI::App* audit_cmd = app.add_subcommand("audit", "verify an emitted dataset");
    audit_cmd->add_option("dir", audit_dir, "dataset directory")->required();

    std::string flows_dir;
    CLI::App* flows_cmd = app.add_subcommand("flows", "extract a flow table from a dataset");
    flows_cmd->add_option("dir", flows_dir, "dataset directory")->required();

    CLI::App* presets_cmd = app.add_subcommand("presets", "list built-in scenarios");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (run_args.scenario_path.empty() && run_args.preset_name.empty()) {
            std::cerr << "netbed: run needs --scenario or --preset\n";
            return 1;
        }
        if (*opt_seed) run_args.seed = seed_val;
        if (*opt_rotation) run_args.rotation = rotation_val;
        return cmd_run(run_args);
    }
    if (validate_cmd->parsed()) return cmd_validate(validate_path);
    if (audit_cmd->parsed()) return cmd_audit(audit_dir);
    if (flows_cmd->parsed()) return cmd_flows(flows_dir);
    if (presets_cmd->parsed()) return cmd_presets();
    return 1;
}
