#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "netbed/capture.hpp"
#include "netbed/fabric.hpp"

// Per-process scratch directory for tests that touch the filesystem.
inline std::filesystem::path test_scratch_dir() {
    static std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("netbed-tests-" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

inline std::filesystem::path test_scratch_dir(const std::string& sub) {
    auto d = test_scratch_dir() / sub;
    std::filesystem::create_directories(d);
    return d;
}

inline std::string slurp_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Owns capture sinks for the duration of a test and wires them to a fabric.
struct TapSet {
    std::filesystem::path dir;
    std::vector<std::unique_ptr<netbed::TapSink>> sinks;

    netbed::TapSink* add(netbed::Fabric& f, const std::string& node, const std::string& iface) {
        sinks.push_back(std::make_unique<netbed::TapSink>(dir, node, iface, 60,
                                                          netbed::DEFAULT_SNAPLEN));
        f.attach_tap(node, iface, sinks.back().get());
        return sinks.back().get();
    }
};
