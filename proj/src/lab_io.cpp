#include "gdnlab/lab_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gdnlab {

namespace {

constexpr char kMagic[4] = {'G', 'D', 'N', 'L'};

void put_u32(std::string& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b)
        out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b)
        out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void put_f64(std::string& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class ByteReader {
public:
    ByteReader(const std::string& data, const std::filesystem::path& path)
        : data_(data), path_(path) {}

    std::uint32_t u32() { return static_cast<std::uint32_t>(raw(4)); }
    std::uint64_t u64() { return raw(8); }
    double f64() { return std::bit_cast<double>(raw(8)); }

    std::size_t remaining() const { return data_.size() - pos_; }

    void expect_magic() {
        if (remaining() < 4 || std::memcmp(data_.data() + pos_, kMagic, 4) != 0)
            throw std::runtime_error("read_snapshot: " + path_.string() +
                                     ": not a snapshot file (bad magic)");
        pos_ += 4;
    }

private:
    std::uint64_t raw(int bytes) {
        if (remaining() < static_cast<std::size_t>(bytes))
            throw std::runtime_error("read_snapshot: " + path_.string() + ": truncated file");
        std::uint64_t v = 0;
        for (int b = 0; b < bytes; ++b)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + b]))
                 << (8 * b);
        pos_ += static_cast<std::size_t>(bytes);
        return v;
    }

    const std::string& data_;
    const std::filesystem::path& path_;
    std::size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("read_snapshot: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

SnapshotHeader parse_header(ByteReader& r, const std::filesystem::path& path) {
    r.expect_magic();
    SnapshotHeader h;
    h.version = r.u32();
    if (h.version != kSnapshotFormatVersion)
        throw std::runtime_error("read_snapshot: " + path.string() +
                                 ": unsupported format version " + std::to_string(h.version));
    h.n = r.u64();
    h.length = r.f64();
    h.time = r.f64();
    h.sigma = r.f64();
    if (h.n == 0 || !std::isfinite(h.length) || !(h.length > 0.0) || !std::isfinite(h.time) ||
        !std::isfinite(h.sigma))
        throw std::runtime_error("read_snapshot: " + path.string() + ": invalid header values");
    return h;
}

} // namespace

void write_snapshot(const Field& f, double sigma, const std::filesystem::path& path) {
    if (f.grid.origin != -f.grid.length / 2.0)
        throw std::invalid_argument("write_snapshot: the format stores centered boxes only");
    if (!std::isfinite(f.time) || !std::isfinite(sigma) || !(sigma > 0.0))
        throw std::invalid_argument(
            "write_snapshot: time must be finite and sigma finite positive");
    if (f.samples.size() != f.grid.n)
        throw std::invalid_argument("write_snapshot: sample count does not match the grid");

    std::string out;
    out.reserve(36 + 16 * f.grid.n);
    out.append(kMagic, 4);
    put_u32(out, kSnapshotFormatVersion);
    put_u64(out, static_cast<std::uint64_t>(f.grid.n));
    put_f64(out, f.grid.length);
    put_f64(out, f.time);
    put_f64(out, sigma);
    for (const cdouble& s : f.samples) {
        put_f64(out, s.real());
        put_f64(out, s.imag());
    }

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw std::runtime_error("write_snapshot: cannot open " + path.string());
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file)
        throw std::runtime_error("write_snapshot: write failed for " + path.string());
}

SnapshotHeader read_snapshot_header(const std::filesystem::path& path) {
    const std::string data = slurp(path);
    ByteReader r(data, path);
    return parse_header(r, path);
}

Field read_snapshot(const std::filesystem::path& path) {
    const std::string data = slurp(path);
    ByteReader r(data, path);
    const SnapshotHeader h = parse_header(r, path);
    if (r.remaining() != 16 * h.n)
        throw std::runtime_error("read_snapshot: " + path.string() +
                                 ": payload size does not match header (" +
                                 std::to_string(r.remaining()) + " bytes for n = " +
                                 std::to_string(h.n) + ")");

    Field f(Grid1D(h.n, h.length), h.time);
    for (std::size_t i = 0; i < h.n; ++i) {
        const double re = r.f64();
        const double im = r.f64();
        f.samples[i] = cdouble(re, im);
    }
    return f;
}

std::string format_double(double value) {
    char buf[64];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& columns)
    : out_(out), width_(columns.size()) {
    if (columns.empty())
        throw std::invalid_argument("CsvWriter: need at least one column");
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].find_first_of(",\"\r\n") != std::string::npos)
            throw std::invalid_argument("CsvWriter: column name needs no quoting by design: " +
                                        columns[i]);
        out_ << (i ? "," : "") << columns[i];
    }
    out_ << "\r\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != width_)
        throw std::invalid_argument("CsvWriter: row width does not match the header");
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << (i ? "," : "") << format_double(values[i]);
    out_ << "\r\n";
}

namespace {

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string coord(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

std::string tick_label(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 3);
    return std::string(buf, res.ptr);
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};

} // namespace

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series, bool loglog) {
    if (series.empty())
        throw std::invalid_argument("write_svg_plot: need at least one series");

    auto transform = [&](double v) {
        if (!loglog)
            return v;
        if (!(v > 0.0))
            throw std::invalid_argument("write_svg_plot: log axes need positive data");
        return std::log10(v);
    };

    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const PlotSeries& s : series) {
        if (s.x.size() != s.y.size())
            throw std::invalid_argument("write_svg_plot: series " + s.label +
                                        " has mismatched x/y lengths");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double tx = transform(s.x[i]), ty = transform(s.y[i]);
            if (!std::isfinite(tx) || !std::isfinite(ty))
                throw std::invalid_argument("write_svg_plot: non-finite data in " + s.label);
            x_min = std::min(x_min, tx);
            x_max = std::max(x_max, tx);
            y_min = std::min(y_min, ty);
            y_max = std::max(y_max, ty);
        }
    }
    if (!std::isfinite(x_min))
        throw std::invalid_argument("write_svg_plot: no data points");
    if (x_max - x_min < 1e-12) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (y_max - y_min < 1e-12) {
        y_min -= 0.5;
        y_max += 0.5;
    }

    const double width = 720.0, height = 480.0;
    const double ml = 76.0, mr = 24.0, mt = 44.0, mb = 56.0;
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto px = [&](double tx) { return ml + (tx - x_min) / (x_max - x_min) * pw; };
    auto py = [&](double ty) { return mt + (y_max - ty) / (y_max - y_min) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
           "viewBox=\"0 0 720 480\">\n";
    svg << "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
    svg << "<text x=\"360\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">"
        << escape_xml(title) << "</text>\n";

    // Frame and ticks: five linear divisions, or decade marks on log axes.
    svg << "<rect x=\"" << coord(ml) << "\" y=\"" << coord(mt) << "\" width=\"" << coord(pw)
        << "\" height=\"" << coord(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    auto emit_ticks = [&](bool vertical) {
        const double lo = vertical ? y_min : x_min;
        const double hi = vertical ? y_max : x_max;
        std::vector<double> ticks;
        if (loglog) {
            const int d0 = static_cast<int>(std::ceil(lo - 1e-9));
            const int d1 = static_cast<int>(std::floor(hi + 1e-9));
            const int step = std::max(1, (d1 - d0) / 6 + ((d1 - d0) % 6 ? 1 : 0));
            for (int d = d0; d <= d1; d += step)
                ticks.push_back(static_cast<double>(d));
            if (ticks.empty())
                ticks = {lo, hi};
        } else {
            for (int k = 0; k <= 4; ++k)
                ticks.push_back(lo + (hi - lo) * k / 4.0);
        }
        for (double tv : ticks) {
            const double label = loglog ? std::pow(10.0, tv) : tv;
            if (vertical) {
                const double y = py(tv);
                svg << "<line x1=\"" << coord(ml - 5.0) << "\" y1=\"" << coord(y) << "\" x2=\""
                    << coord(ml) << "\" y2=\"" << coord(y) << "\" stroke=\"black\"/>\n";
                svg << "<text x=\"" << coord(ml - 9.0) << "\" y=\"" << coord(y + 4.0)
                    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
                    << tick_label(label) << "</text>\n";
            } else {
                const double x = px(tv);
                svg << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(mt + ph) << "\" x2=\""
                    << coord(x) << "\" y2=\"" << coord(mt + ph + 5.0)
                    << "\" stroke=\"black\"/>\n";
                svg << "<text x=\"" << coord(x) << "\" y=\"" << coord(mt + ph + 18.0)
                    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
                    << tick_label(label) << "</text>\n";
            }
        }
    };
    emit_ticks(false);
    emit_ticks(true);

    svg << "<text x=\"" << coord(ml + pw / 2.0) << "\" y=\"" << coord(height - 14.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << escape_xml(x_label) << "</text>\n";
    svg << "<text x=\"20\" y=\"" << coord(mt + ph / 2.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 20 "
        << coord(mt + ph / 2.0) << ")\">" << escape_xml(y_label) << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const PlotSeries& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i)
                svg << " ";
            svg << coord(px(transform(s.x[i]))) << "," << coord(py(transform(s.y[i])));
        }
        svg << "\"/>\n";
        const double ly = mt + 16.0 + 16.0 * static_cast<double>(si);
        svg << "<line x1=\"" << coord(ml + pw - 150.0) << "\" y1=\"" << coord(ly) << "\" x2=\""
            << coord(ml + pw - 126.0) << "\" y2=\"" << coord(ly) << "\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
        svg << "<text x=\"" << coord(ml + pw - 120.0) << "\" y=\"" << coord(ly + 4.0)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(s.label)
            << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw std::runtime_error("write_svg_plot: cannot open " + path.string());
    const std::string body = svg.str();
    file.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!file)
        throw std::runtime_error("write_svg_plot: write failed for " + path.string());
}

} // namespace gdnlab
