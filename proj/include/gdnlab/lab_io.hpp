#pragma once

#include "gdnlab/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace gdnlab {

// On-disk state container: magic "GDNL", format version u32, n u64, box
// length f64, time f64, sigma f64, then n interleaved (re, im) f64 pairs.
// Every field is little-endian IEEE-754.  The format stores centered boxes
// only (origin = -length/2), which is the convention of every solver run.
inline constexpr std::uint32_t kSnapshotFormatVersion = 1;

struct SnapshotHeader {
    std::uint32_t version = kSnapshotFormatVersion;
    std::uint64_t n = 0;
    double length = 0.0;
    double time = 0.0;
    double sigma = 0.0;
};

void write_snapshot(const Field& f, double sigma, const std::filesystem::path& path);
SnapshotHeader read_snapshot_header(const std::filesystem::path& path);
Field read_snapshot(const std::filesystem::path& path);

// 17 significant digits through std::to_chars: enough to round-trip any
// double, '.' decimal point regardless of locale.
std::string format_double(double value);

// Comma-separated rows with CRLF endings, header row first.  Values are
// emitted with format_double, so identical inputs give identical bytes.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);

private:
    std::ostream& out_;
    std::size_t width_;
};

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Self-contained SVG line plot, no external renderer.  Log-log axes when
// loglog is set, which requires strictly positive data.
void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series, bool loglog);

} // namespace gdnlab
