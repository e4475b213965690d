#ifndef DEGWAVE_OUTPUT_HPP
#define DEGWAVE_OUTPUT_HPP

#include <string>
#include <vector>

#include "degwave/numerics.hpp"

namespace degwave {

// Deterministic CSV/JSON emission: doubles are printed with %.17g so that
// rerunning with an identical config and seed reproduces files byte for byte.

struct CsvWriter {
    explicit CsvWriter(std::vector<std::string> columns) : cols(std::move(columns)) {}
    std::vector<std::string> cols;
    std::vector<std::vector<double>> rows;
    void row(std::initializer_list<double> vals) { rows.emplace_back(vals); }
    void write(const std::string& path) const;
};

std::string format_double(double v);

// Writes text to path, creating parent directories.
void write_text(const std::string& path, const std::string& text);

// Output manifest: file list, FNV-1a hash of the resolved config, tool version.
struct Manifest {
    std::vector<std::string> files;
    std::string config_hash;
    std::string version;
    void add(const std::string& path) { files.push_back(path); }
    void write(const std::string& dir) const;
};

std::string fnv1a_hex(const std::string& data);

constexpr const char* kToolVersion = "0.1.0";

} // namespace degwave

#endif
