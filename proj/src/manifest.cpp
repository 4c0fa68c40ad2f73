#include "confront/manifest.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "confront/errors.hpp"

namespace confront {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

void Manifest::set_config(const std::string& canonical_config) {
    config_hash_ = fnv1a64_hex(canonical_config);
}

void Manifest::set_tolerance(const std::string& name, double value) {
    tolerances_[name] = value;
}

void Manifest::set_timing(const std::string& name, double seconds) { timings_[name] = seconds; }

void Manifest::add_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("manifest: cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    files_.emplace_back(path.filename().string(), fnv1a64_hex(ss.str()));
}

void Manifest::write(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["config_hash"] = config_hash_;
    j["tolerances"] = tolerances_;
    j["timings_seconds"] = timings_;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [name, hash] : files_) files.push_back({{"file", name}, {"hash", hash}});
    j["files"] = files;
    std::ofstream out(path);
    if (!out) throw ConfigError("manifest: cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace confront
