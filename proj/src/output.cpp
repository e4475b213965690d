#include "degwave/output.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace degwave {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Error::Code::io, "cannot open for writing: " + path);
    out << text;
    if (!out) throw Error(Error::Code::io, "write failed: " + path);
}

void CsvWriter::write(const std::string& path) const {
    std::string text;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        text += cols[i];
        text += (i + 1 < cols.size()) ? ',' : '\n';
    }
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            text += format_double(r[i]);
            text += (i + 1 < r.size()) ? ',' : '\n';
        }
    }
    write_text(path, text);
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

void Manifest::write(const std::string& dir) const {
    nlohmann::json j;
    j["files"] = files;
    j["config_hash"] = config_hash;
    j["version"] = version.empty() ? kToolVersion : version;
    write_text(dir + "/manifest.json", j.dump(2) + "\n");
}

} // namespace degwave
