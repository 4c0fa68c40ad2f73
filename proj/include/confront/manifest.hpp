#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace confront {

/// 64-bit FNV-1a of a byte string (content fingerprints for the manifest).
std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

/// Run manifest: records the configuration hash, tolerances, wall-clock
/// timings, and a content hash for every emitted file. Data files stay
/// deterministic; timing lives only here.
class Manifest {
public:
    void set_config(const std::string& canonical_config);
    void set_tolerance(const std::string& name, double value);
    void set_timing(const std::string& name, double seconds);
    void add_file(const std::filesystem::path& path);

    void write(const std::filesystem::path& path) const;

private:
    std::string config_hash_;
    std::map<std::string, double> tolerances_;
    std::map<std::string, double> timings_;
    std::vector<std::pair<std::string, std::string>> files_;  // (name, hash)
};

}  // namespace confront
