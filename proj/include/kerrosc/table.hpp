#pragma once
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace kerrosc {

/// Shortest round-trip decimal representation of a double (deterministic,
/// locale-independent).
std::string format_double(double v);

/// FNV-1a 64-bit content hash, hex-encoded.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hash_hex(const std::string& bytes);
std::string hash_file(const std::filesystem::path& path);

/// Delimited text table with '#'-prefixed metadata header lines. Content is
/// buffered so rerunning with identical inputs yields byte-identical files.
class TableWriter {
public:
    explicit TableWriter(std::string name) : name_(std::move(name)) {}

    void meta(const std::string& key, const std::string& value);
    void meta(const std::string& key, double value);
    void columns(const std::vector<std::string>& names);
    void row(const std::vector<double>& values);
    void row_text(const std::string& line);

    const std::string& name() const { return name_; }
    std::string content() const;
    /// Writes the file and returns its content hash.
    std::string write(const std::filesystem::path& dir) const;

private:
    std::string name_;
    std::string head_, body_;
    std::size_t n_cols_ = 0;
};

/// Minimal polyline plot emitted as a standalone SVG file.
struct SvgSeries {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<double> x, y;
};
std::string render_svg(const std::vector<SvgSeries>& series, const std::string& x_label,
                       const std::string& y_label, int width = 720, int height = 480);

} // namespace kerrosc
