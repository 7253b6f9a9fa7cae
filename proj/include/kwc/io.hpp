#pragma once

// Output helpers: locale-independent number formatting, CSV files with a
// provenance header, JSON files, and a small deterministic SVG line plot.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "kwc/errors.hpp"

namespace kwc::io {

inline constexpr std::string_view kVersion = "1.0.0";

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

/// Round-trippable, locale-independent decimal form (17 significant digits).
inline std::string formatNumber(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 40> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

/// Provenance stamped on every output file.
struct Provenance {
    std::string configHash = "0000000000000000";
    std::string tool = "kwc";

    std::string line(std::string_view commentPrefix) const {
        return std::string(commentPrefix) + " " + tool + " " + std::string(kVersion) + " config-hash " + configHash;
    }
};

inline std::ofstream openForWrite(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    return os;
}

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const Provenance& prov, const std::vector<std::string>& columns)
        : path_(path), os_(openForWrite(path)), width_(columns.size()) {
        os_ << prov.line("#") << '\n';
        for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
        os_ << '\n';
    }

    void row(const std::vector<double>& values) {
        if (values.size() != width_) throw DimensionError("CSV row width mismatch in " + path_.string());
        for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << formatNumber(values[i]);
        os_ << '\n';
    }

    /// Mixed row: pre-formatted cells.
    void rawRow(const std::vector<std::string>& cells) {
        if (cells.size() != width_) throw DimensionError("CSV row width mismatch in " + path_.string());
        for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
        os_ << '\n';
    }

    void close() {
        os_.close();
        if (!os_) throw IoError("error writing " + path_.string());
    }

  private:
    std::filesystem::path path_;
    std::ofstream os_;
    std::size_t width_;
};

/// Writes {"meta": {...}, ...payload} with two-space indentation.
inline void writeJson(const std::filesystem::path& path, const Provenance& prov, nlohmann::ordered_json payload) {
    nlohmann::ordered_json doc;
    doc["meta"] = {{"tool", prov.tool}, {"version", std::string(kVersion)}, {"configHash", prov.configHash}};
    for (auto& [k, v] : payload.items()) doc[k] = v;
    auto os = openForWrite(path);
    os << doc.dump(2) << '\n';
    if (!os) throw IoError("error writing " + path.string());
}

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal SVG line plot: frame, axis tick labels at the data extremes, one
/// polyline per series, legend in input order. Output depends only on the input.
inline std::string svgLinePlot(const std::vector<Series>& series, std::string_view title = "") {
    constexpr double W = 640, H = 400, L = 70, R = 160, T = 30, B = 50;
    static constexpr std::array<const char*, 6> colors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw DimensionError("series '" + s.name + "': x and y lengths differ");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!(xmin <= xmax)) xmin = 0, xmax = 1;
    if (!(ymin <= ymax)) ymin = 0, ymax = 1;
    if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
    if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
    const double pw = W - L - R, ph = H - T - B;
    auto px = [&](double x) { return L + pw * (x - xmin) / (xmax - xmin); };
    auto py = [&](double y) { return T + ph * (1.0 - (y - ymin) / (ymax - ymin)); };
    auto fmt = [](double v) {
        std::array<char, 32> buf{};
        const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 6);
        return std::string(buf.data(), r.ptr);
    };
    auto esc = [](std::string_view s) {
        std::string o;
        for (char c : s) {
            if (c == '<') o += "&lt;";
            else if (c == '>') o += "&gt;";
            else if (c == '&') o += "&amp;";
            else o += c;
        }
        return o;
    };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (!title.empty())
        os << "<text x=\"" << L + pw / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << esc(title)
           << "</text>\n";
    os << "<text x=\"" << L << "\" y=\"" << H - B + 18 << "\" font-size=\"11\">" << fmt(xmin) << "</text>\n";
    os << "<text x=\"" << L + pw << "\" y=\"" << H - B + 18 << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(xmax)
       << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << T + ph << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(ymin)
       << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << T + 10 << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(ymax)
       << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = colors[k % colors.size()];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            os << (first ? "" : " ") << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
            first = false;
        }
        os << "\"/>\n";
        const double ly = T + 14 + 18 * double(k);
        os << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly - 4
           << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << W - R + 35 << "\" y=\"" << ly << "\" font-size=\"12\">" << esc(s.name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

inline void emitSvgLinePlot(const std::vector<Series>& series, const std::filesystem::path& path,
                            std::string_view title = "") {
    auto os = openForWrite(path);
    os << svgLinePlot(series, title);
    if (!os) throw IoError("error writing " + path.string());
}

} // namespace kwc::io
