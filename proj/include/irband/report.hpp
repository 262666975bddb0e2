#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <string>

#include <json.hpp>

#include "irband/bandsearch.hpp"
#include "irband/error.hpp"

namespace irband {

enum class HeatmapScale {
  Absolute,  ///< 0 -> 0, 1 -> 255
  Relative,  ///< grid min -> 0, grid max -> 255
};

/// Six significant digits, always with a decimal point or exponent so the
/// token reads back as a floating value ("2.0", not "2").
inline std::string format_sig6(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos && s.find_first_of("0123456789") != std::string::npos)
    s += ".0";
  return s;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open for writing", path.string());
  body(out);
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed", path.string());
}

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace detail

/// Matrix CSV: header row of widths, then one row per start. Absent cells are
/// empty fields.
inline void write_heatmap_csv(std::ostream& out, const CoefficientGrid& grid) {
  out << "start_um\\width_um";
  for (std::size_t w = 0; w < grid.cols(); ++w) out << ',' << format_sig6(grid.width(w));
  out << '\n';
  for (std::size_t s = 0; s < grid.rows(); ++s) {
    out << format_sig6(grid.start(s));
    for (std::size_t w = 0; w < grid.cols(); ++w) {
      out << ',';
      if (const auto v = grid.value(s, w)) out << format_sig6(*v);
    }
    out << '\n';
  }
}

inline void export_heatmap_csv(const CoefficientGrid& grid, const std::filesystem::path& path) {
  detail::write_file(path, [&](std::ostream& out) { write_heatmap_csv(out, grid); });
}

/// Gray level for value v under the chosen scale, rounding half up.
inline int heatmap_pixel(double v, double lo, double hi, HeatmapScale scale) {
  double t = v;
  if (scale == HeatmapScale::Relative) t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return static_cast<int>(std::floor(255.0 * t + 0.5));
}

/// Plain PGM (P2): one column per width, one row per start, smallest start on
/// the top row. Absent cells are black.
inline void write_heatmap_pgm(std::ostream& out, const CoefficientGrid& grid, HeatmapScale scale) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < grid.rows(); ++s)
    for (std::size_t w = 0; w < grid.cols(); ++w)
      if (const auto v = grid.value(s, w)) {
        lo = std::min(lo, *v);
        hi = std::max(hi, *v);
      }
  out << "P2\n" << grid.cols() << ' ' << grid.rows() << "\n255\n";
  for (std::size_t s = 0; s < grid.rows(); ++s) {
    for (std::size_t w = 0; w < grid.cols(); ++w) {
      if (w > 0) out << ' ';
      const auto v = grid.value(s, w);
      out << (v ? heatmap_pixel(*v, lo, hi, scale) : 0);
    }
    out << '\n';
  }
}

inline void export_heatmap_pgm(const CoefficientGrid& grid, HeatmapScale scale,
                               const std::filesystem::path& path) {
  detail::write_file(path, [&](std::ostream& out) { write_heatmap_pgm(out, grid, scale); });
}

/// Byte-stable JSON: fixed key order, six significant digits.
inline void write_band_report_json(std::ostream& out, const BandReport& report) {
  const auto band_fields = [](const Band& b) {
    return "\"start_um\":" + format_sig6(b.start) + ",\"width_um\":" + format_sig6(b.width) +
           ",\"end_um\":" + format_sig6(b.end());
  };
  out << "{\n  \"pair\":[" << detail::json_string(report.pair.first) << ','
      << detail::json_string(report.pair.second) << "],\n";
  out << "  \"best\":[";
  for (std::size_t i = 0; i < report.best.size(); ++i) {
    const auto& b = report.best[i];
    out << (i ? ",\n" : "\n") << "    {" << band_fields(b.band)
        << ",\"coefficient\":" << format_sig6(b.coefficient) << '}';
  }
  out << (report.best.empty() ? "],\n" : "\n  ],\n");
  out << "  \"regions\":[";
  for (std::size_t i = 0; i < report.regions.size(); ++i) {
    const auto& r = report.regions[i];
    out << (i ? ",\n" : "\n") << "    {\"start_lo_um\":" << format_sig6(r.start_lo)
        << ",\"start_hi_um\":" << format_sig6(r.start_hi) << ",\"width_lo_um\":" << format_sig6(r.width_lo)
        << ",\"width_hi_um\":" << format_sig6(r.width_hi)
        << ",\"max_coefficient\":" << format_sig6(r.max_coefficient) << ",\"argmax_band\":{"
        << band_fields(r.argmax.band) << "}}";
  }
  out << (report.regions.empty() ? "]\n" : "\n  ]\n");
  out << "}\n";
}

inline void export_band_report_json(const BandReport& report, const std::filesystem::path& path) {
  detail::write_file(path, [&](std::ostream& out) { write_band_report_json(out, report); });
}

}  // namespace irband
