#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "irband/error.hpp"
#include "irband/resample.hpp"

namespace irband {

/// Waveband [start, start + width] in micrometers, both endpoints included.
struct Band {
  double start = 0.0;
  double width = 0.0;

  double end() const noexcept { return start + width; }
  bool contains(double wavelength) const noexcept {
    return wavelength >= start - kWavelengthTolerance && wavelength <= end() + kWavelengthTolerance;
  }
};

/// Trapezoid prefix integral of an averaged spectrum. `prefix[k]` is the area
/// from grid point 0 to grid point k. The running sum is kept as an unevaluated
/// pair (prefix + carry) so that band areas, which are differences of two
/// prefixes, do not lose digits to cancellation on narrow bands.
struct CumulativeIntegral {
  WavelengthGrid grid;
  std::vector<double> prefix;
  std::vector<double> carry;

  /// Area between grid points `from` and `to` (from <= to).
  double area(std::size_t from, std::size_t to) const noexcept {
    return (prefix[to] - prefix[from]) + (carry[to] - carry[from]);
  }
};

inline CumulativeIntegral cumulative_integral(const WavelengthGrid& grid, std::span<const double> r) {
  if (r.size() != grid.count)
    throw Error(ErrorKind::IncompatibleGrids, "reflectance length does not match grid");
  CumulativeIntegral c{grid, std::vector<double>(grid.count, 0.0), std::vector<double>(grid.count, 0.0)};
  double sum = 0.0;
  double err = 0.0;
  for (std::size_t k = 1; k < grid.count; ++k) {
    const double term = grid.step * (r[k - 1] + r[k]) / 2.0;
    // two-sum: s + e == sum + term exactly
    const double s = sum + term;
    const double bp = s - sum;
    const double e = (sum - (s - bp)) + (term - bp);
    sum = s;
    err += e;
    c.prefix[k] = sum;
    c.carry[k] = err;
  }
  return c;
}

inline CumulativeIntegral cumulative_integral(const AveragedSpectrum& a) {
  return cumulative_integral(a.grid, a.mean_reflectance);
}

/// Area under the curve over `band`. Both endpoints must be grid points.
inline double auc(const CumulativeIntegral& c, const Band& band) {
  const auto& g = c.grid;
  if (!(band.width >= 0.0) || band.start < g.at(0) - kWavelengthTolerance ||
      band.end() > g.last() + kWavelengthTolerance)
    throw Error(ErrorKind::BandOutOfRange, "band [" + std::to_string(band.start) + ", " +
                                               std::to_string(band.end()) + "] um outside grid");
  const auto from = g.index_of(band.start);
  const auto to = g.index_of(band.end());
  if (from < 0 || to < 0)
    throw Error(ErrorKind::BandNotOnGrid, "band endpoints are not grid points");
  return std::max(0.0, c.area(static_cast<std::size_t>(from), static_cast<std::size_t>(to)));
}

/// |auc1 - auc2| / (auc1 + auc2), defined as 0 when both areas are zero.
inline double discriminative_coef(double auc1, double auc2) {
  if (auc1 < 0.0 || auc2 < 0.0 || std::isnan(auc1) || std::isnan(auc2))
    throw Error(ErrorKind::NegativeAUC, "band areas must be nonnegative");
  const double total = auc1 + auc2;
  if (total == 0.0) return 0.0;
  return std::abs(auc1 - auc2) / total;
}

struct BandScanConfig {
  double scan_step = 0.05;
  double range_lo = 1.6;
  double range_hi = 3.2;
  /// Widest band scanned; unset means the whole window.
  std::optional<double> max_width;
  double region_threshold_fraction = 0.8;

  /// Number of scan steps that fit in the window.
  std::size_t step_count() const noexcept {
    return static_cast<std::size_t>(std::floor((range_hi - range_lo) / scan_step + 1e-9));
  }
  std::size_t width_count() const noexcept {
    const std::size_t n = step_count();
    if (!max_width) return n;
    return std::min(n, static_cast<std::size_t>(std::floor(*max_width / scan_step + 1e-9)));
  }

  void validate() const {
    if (!(scan_step > 0.0) || !std::isfinite(scan_step))
      throw Error(ErrorKind::InvalidConfig, "scan step must be positive");
    if (!(range_lo < range_hi) || !std::isfinite(range_lo) || !std::isfinite(range_hi))
      throw Error(ErrorKind::InvalidConfig, "scan range must satisfy lo < hi");
    if (!(range_lo > 0.0)) throw Error(ErrorKind::InvalidConfig, "scan range must start above 0");
    if (max_width && !(*max_width >= scan_step - kWavelengthTolerance))
      throw Error(ErrorKind::InvalidConfig, "max width must be at least one scan step");
    if (!(region_threshold_fraction > 0.0 && region_threshold_fraction <= 1.0))
      throw Error(ErrorKind::InvalidConfig, "region threshold fraction must lie in (0, 1]");
    if (step_count() == 0)
      throw Error(ErrorKind::InvalidConfig, "scan range is narrower than one scan step");
  }
};

/// Coefficients indexed by (start row, width column). Row s starts at
/// range_lo + s * step; column w has width (w + 1) * step. A cell is absent
/// when the band would end past range_hi.
class CoefficientGrid {
 public:
  CoefficientGrid(BandScanConfig config, std::pair<std::string, std::string> pair)
      : config_(std::move(config)), pair_(std::move(pair)) {
    config_.validate();
    rows_ = config_.step_count();
    cols_ = config_.width_count();
    values_.assign(rows_ * cols_, 0.0);
  }

  CoefficientGrid(BandScanConfig config, std::pair<std::string, std::string> pair,
                  const std::vector<std::vector<std::optional<double>>>& cells)
      : CoefficientGrid(std::move(config), std::move(pair)) {
    if (cells.size() != rows_)
      throw Error(ErrorKind::InvalidConfig, "cell rows do not match the scan window");
    for (std::size_t s = 0; s < rows_; ++s) {
      if (cells[s].size() != cols_)
        throw Error(ErrorKind::InvalidConfig, "cell columns do not match the scan widths");
      for (std::size_t w = 0; w < cols_; ++w) {
        if (cells[s][w].has_value() != present(s, w))
          throw Error(ErrorKind::InvalidConfig, "cell presence does not match the window");
        if (cells[s][w]) set(s, w, *cells[s][w]);
      }
    }
  }

  const BandScanConfig& config() const noexcept { return config_; }
  const std::pair<std::string, std::string>& pair() const noexcept { return pair_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double start(std::size_t s) const noexcept {
    return config_.range_lo + static_cast<double>(s) * config_.scan_step;
  }
  double width(std::size_t w) const noexcept {
    return static_cast<double>(w + 1) * config_.scan_step;
  }
  Band band(std::size_t s, std::size_t w) const noexcept { return Band{start(s), width(w)}; }
  /// start + width evaluated on the step lattice, free of addition drift.
  double end(std::size_t s, std::size_t w) const noexcept {
    return config_.range_lo + static_cast<double>(s + w + 1) * config_.scan_step;
  }

  bool present(std::size_t s, std::size_t w) const noexcept { return s + w + 1 <= rows_; }
  std::optional<double> value(std::size_t s, std::size_t w) const noexcept {
    if (!present(s, w)) return std::nullopt;
    return values_[s * cols_ + w];
  }
  std::size_t present_count() const noexcept {
    std::size_t n = 0;
    for (std::size_t s = 0; s < rows_; ++s) n += std::min(cols_, rows_ - s);
    return n;
  }

  void set(std::size_t s, std::size_t w, double v) {
    if (!present(s, w)) throw Error(ErrorKind::BandOutOfRange, "cell lies outside the window");
    if (!(v >= 0.0 && v <= 1.0))
      throw Error(ErrorKind::InvalidConfig, "coefficient outside [0, 1]");
    values_[s * cols_ + w] = v;
  }

  /// Largest present value, 0 for a grid with no present cells.
  double max_value() const noexcept {
    double m = 0.0;
    for (std::size_t s = 0; s < rows_; ++s)
      for (std::size_t w = 0; w < cols_ && present(s, w); ++w) m = std::max(m, values_[s * cols_ + w]);
    return m;
  }

  bool operator==(const CoefficientGrid& o) const noexcept {
    return rows_ == o.rows_ && cols_ == o.cols_ && pair_ == o.pair_ && values_ == o.values_;
  }

 private:
  BandScanConfig config_;
  std::pair<std::string, std::string> pair_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

struct ScanOptions {
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 1;
};

/// Evaluates the discriminative coefficient of every band in the window.
inline CoefficientGrid scan_grid(const AveragedSpectrum& a1, const AveragedSpectrum& a2,
                                 const BandScanConfig& config, ScanOptions options = {}) {
  config.validate();
  const WavelengthGrid& g = a1.grid;
  if (!same_grid(g, a2.grid) || a1.mean_reflectance.size() != g.count ||
      a2.mean_reflectance.size() != g.count)
    throw Error(ErrorKind::IncompatibleGrids, "averaged spectra are not on the same grid");

  const double ratio = std::round(config.scan_step / g.step);
  if (ratio < 1.0 || std::abs(ratio * g.step - config.scan_step) > kWavelengthTolerance)
    throw Error(ErrorKind::StepMismatch,
                "scan step " + std::to_string(config.scan_step) +
                    " um is not a multiple of the grid resolution " + std::to_string(g.step) + " um");
  const auto stride = static_cast<std::size_t>(ratio);

  if (config.range_lo < g.at(0) - kWavelengthTolerance || config.range_lo > g.last() + kWavelengthTolerance)
    throw Error(ErrorKind::BandOutOfRange, "scan window starts outside the common wavelength range");
  const auto origin = g.index_of(config.range_lo);
  if (origin < 0)
    throw Error(ErrorKind::StepMismatch, "scan window start is not a grid point");
  const std::size_t base = static_cast<std::size_t>(origin);

  CoefficientGrid out(config, {a1.class_label, a2.class_label});
  const std::size_t rows = out.rows();
  const std::size_t cols = out.cols();
  if (base + rows * stride > g.count - 1)
    throw Error(ErrorKind::BandOutOfRange, "scan window ends past the common wavelength range");

  const CumulativeIntegral c1 = cumulative_integral(a1);
  const CumulativeIntegral c2 = cumulative_integral(a2);

  auto scan_rows = [&](std::size_t first, std::size_t every) {
    for (std::size_t s = first; s < rows; s += every) {
      const std::size_t from = base + s * stride;
      for (std::size_t w = 0; w < cols && out.present(s, w); ++w) {
        const std::size_t to = from + (w + 1) * stride;
        const double auc1 = std::max(0.0, c1.area(from, to));
        const double auc2 = std::max(0.0, c2.area(from, to));
        out.set(s, w, discriminative_coef(auc1, auc2));
      }
    }
  };

  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                          : options.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, rows));
  if (threads <= 1) {
    scan_rows(0, 1);
  } else {
    // Rows are interleaved across workers; each cell is written by exactly one.
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(scan_rows, t, threads);
  }
  return out;
}

struct RankedBand {
  Band band;
  double coefficient = 0.0;
  std::size_t start_index = 0;
  std::size_t width_index = 0;
};

/// Coefficients closer than this are ranked as ties.
inline constexpr double kTieQuantum = 1e-12;

/// Ordering for "better band": higher coefficient, then narrower, then
/// earlier start. Coefficients are compared after quantizing to kTieQuantum
/// so rounding noise between analytically equal cells does not decide ties.
inline bool ranks_before(const RankedBand& a, const RankedBand& b) noexcept {
  const auto qa = std::llround(a.coefficient / kTieQuantum);
  const auto qb = std::llround(b.coefficient / kTieQuantum);
  if (qa != qb) return qa > qb;
  if (a.width_index != b.width_index) return a.width_index < b.width_index;
  return a.start_index < b.start_index;
}

inline RankedBand ranked_cell(const CoefficientGrid& grid, std::size_t s, std::size_t w) {
  return RankedBand{grid.band(s, w), *grid.value(s, w), s, w};
}

/// Top-k cells by coefficient, fewer when the grid has fewer present cells.
inline std::vector<RankedBand> find_optimal_bands(const CoefficientGrid& grid, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::InvalidConfig, "k must be at least 1");
  std::vector<RankedBand> cells;
  cells.reserve(grid.present_count());
  for (std::size_t s = 0; s < grid.rows(); ++s)
    for (std::size_t w = 0; w < grid.cols() && grid.present(s, w); ++w)
      cells.push_back(ranked_cell(grid, s, w));
  if (cells.empty()) throw Error(ErrorKind::EmptyGrid, "grid has no present cells");
  const std::size_t n = std::min(k, cells.size());
  std::partial_sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(n), cells.end(),
                    ranks_before);
  cells.resize(n);
  return cells;
}

/// 4-connected set of cells at or above the region threshold.
struct SelectiveRegion {
  double start_lo = 0.0;
  double start_hi = 0.0;
  double width_lo = 0.0;
  double width_hi = 0.0;
  double max_coefficient = 0.0;
  RankedBand argmax;
  /// Member cells as (start index, width index), sorted.
  std::vector<std::pair<std::size_t, std::size_t>> cells;
};

inline std::vector<SelectiveRegion> find_selective_regions(const CoefficientGrid& grid) {
  const std::size_t rows = grid.rows();
  const std::size_t cols = grid.cols();
  if (grid.present_count() == 0) throw Error(ErrorKind::EmptyGrid, "grid has no present cells");
  const double peak = grid.max_value();
  if (peak == 0.0) return {};
  const double threshold = grid.config().region_threshold_fraction * peak;

  auto selected = [&](std::size_t s, std::size_t w) {
    const auto v = grid.value(s, w);
    return v && *v >= threshold;
  };

  std::vector<char> visited(rows * cols, 0);
  std::vector<SelectiveRegion> regions;
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t s0 = 0; s0 < rows; ++s0) {
    for (std::size_t w0 = 0; w0 < cols; ++w0) {
      if (visited[s0 * cols + w0] || !selected(s0, w0)) continue;
      SelectiveRegion region;
      visited[s0 * cols + w0] = 1;
      stack.assign(1, {s0, w0});
      while (!stack.empty()) {
        const auto [s, w] = stack.back();
        stack.pop_back();
        region.cells.emplace_back(s, w);
        const auto visit = [&](std::size_t ns, std::size_t nw) {
          if (ns >= rows || nw >= cols || visited[ns * cols + nw] || !selected(ns, nw)) return;
          visited[ns * cols + nw] = 1;
          stack.emplace_back(ns, nw);
        };
        if (s > 0) visit(s - 1, w);
        visit(s + 1, w);
        if (w > 0) visit(s, w - 1);
        visit(s, w + 1);
      }
      std::sort(region.cells.begin(), region.cells.end());

      std::size_t s_lo = rows, s_hi = 0, w_lo = cols, w_hi = 0;
      region.argmax = ranked_cell(grid, region.cells.front().first, region.cells.front().second);
      for (const auto& [s, w] : region.cells) {
        s_lo = std::min(s_lo, s);
        s_hi = std::max(s_hi, s);
        w_lo = std::min(w_lo, w);
        w_hi = std::max(w_hi, w);
        const RankedBand cell = ranked_cell(grid, s, w);
        region.max_coefficient = std::max(region.max_coefficient, cell.coefficient);
        if (ranks_before(cell, region.argmax)) region.argmax = cell;
      }
      region.start_lo = grid.start(s_lo);
      region.start_hi = grid.start(s_hi);
      region.width_lo = grid.width(w_lo);
      region.width_hi = grid.width(w_hi);
      regions.push_back(std::move(region));
    }
  }
  std::sort(regions.begin(), regions.end(), [](const SelectiveRegion& a, const SelectiveRegion& b) {
    return ranks_before(a.argmax, b.argmax);
  });
  return regions;
}

struct BandReport {
  std::pair<std::string, std::string> pair;
  std::vector<RankedBand> best;
  std::vector<SelectiveRegion> regions;
};

inline BandReport make_band_report(const CoefficientGrid& grid, std::size_t k) {
  return BandReport{grid.pair(), find_optimal_bands(grid, k), find_selective_regions(grid)};
}

}  // namespace irband
