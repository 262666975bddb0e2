#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "irband/error.hpp"
#include "irband/spectrum.hpp"

namespace irband {

/// Absolute tolerance (um) for deciding that two wavelengths coincide.
inline constexpr double kWavelengthTolerance = 1e-9;

/// Uniform wavelength grid: point k sits at start + k * step, k in [0, count).
struct WavelengthGrid {
  double start = 0.0;
  double step = 0.0;
  std::size_t count = 0;

  double at(std::size_t k) const noexcept { return start + static_cast<double>(k) * step; }
  double last() const noexcept { return at(count - 1); }

  /// Index of the grid point within tolerance of `wavelength`, or -1.
  std::ptrdiff_t index_of(double wavelength) const noexcept {
    const double pos = std::round((wavelength - start) / step);
    if (pos < 0 || pos > static_cast<double>(count - 1)) return -1;
    const auto k = static_cast<std::size_t>(pos);
    return std::abs(at(k) - wavelength) <= kWavelengthTolerance ? static_cast<std::ptrdiff_t>(k) : -1;
  }

  bool operator==(const WavelengthGrid&) const = default;
};

inline bool same_grid(const WavelengthGrid& a, const WavelengthGrid& b) noexcept {
  return a.count == b.count && std::abs(a.start - b.start) <= kWavelengthTolerance &&
         std::abs(a.step - b.step) <= 1e-12 * std::max(a.step, b.step);
}

/// Mean reflectance of one class sampled on a shared grid.
struct AveragedSpectrum {
  WavelengthGrid grid;
  std::vector<double> mean_reflectance;
  std::string class_label;
  std::size_t n_spectra = 0;
};

/// Largest uniform grid of spacing `resolution` inside the common range of all
/// spectra. The first point is the lower bound rounded up to a multiple of
/// `resolution` (counted from zero).
inline WavelengthGrid common_grid(std::span<const std::span<const Spectrum>> groups, double resolution) {
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw Error(ErrorKind::InvalidConfig, "resolution must be positive");
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  for (const auto group : groups) {
    for (const auto& s : group) {
      lo = std::max(lo, s.min_wavelength());
      hi = std::min(hi, s.max_wavelength());
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorKind::DegenerateOverlap, "no spectra to place on a grid");
  if (!(hi - lo >= resolution - kWavelengthTolerance))
    throw Error(ErrorKind::DegenerateOverlap,
                "common wavelength range is narrower than the resolution");

  // Relative slack keeps exact multiples such as 1.6 / 0.01 from rounding away.
  constexpr double slack = 1e-9;
  const double first = std::ceil(lo / resolution - slack);
  const double start = first * resolution;
  const double span = (hi - start) / resolution;
  if (span < 1.0 - slack)
    throw Error(ErrorKind::DegenerateOverlap, "common range holds fewer than 2 grid points");
  const auto count = static_cast<std::size_t>(std::floor(span + slack)) + 1;
  return WavelengthGrid{start, resolution, count};
}

inline WavelengthGrid common_grid(std::span<const Spectrum> a, std::span<const Spectrum> b,
                                  double resolution) {
  const std::span<const Spectrum> groups[] = {a, b};
  return common_grid(std::span<const std::span<const Spectrum>>(groups), resolution);
}

/// Linear interpolation of `s` at every grid point. Grid points within
/// tolerance of a sample reproduce that sample exactly.
inline std::vector<double> resample_linear(const Spectrum& s, const WavelengthGrid& grid) {
  const auto wl = s.wavelengths();
  const auto refl = s.reflectance();
  if (grid.count == 0) return {};
  if (grid.at(0) < wl.front() - kWavelengthTolerance ||
      grid.last() > wl.back() + kWavelengthTolerance)
    throw Error(ErrorKind::GridOutOfRange,
                "grid [" + std::to_string(grid.at(0)) + ", " + std::to_string(grid.last()) +
                    "] um exceeds spectrum '" + s.metadata().sample_id + "'");

  std::vector<double> out(grid.count);
  std::size_t hi = 1;
  for (std::size_t k = 0; k < grid.count; ++k) {
    const double x = grid.at(k);
    // grid points increase, so the bracket only moves forward
    while (hi + 1 < wl.size() && wl[hi] < x) ++hi;
    const std::size_t lo = hi - 1;
    if (std::abs(x - wl[lo]) <= kWavelengthTolerance) {
      out[k] = refl[lo];
    } else if (std::abs(x - wl[hi]) <= kWavelengthTolerance) {
      out[k] = refl[hi];
    } else {
      const double t = (x - wl[lo]) / (wl[hi] - wl[lo]);
      out[k] = std::max(0.0, refl[lo] + (refl[hi] - refl[lo]) * t);
    }
  }
  return out;
}

/// Unweighted mean of the group's resampled spectra. Members are summed in
/// order of (source, sample_id) so the result does not depend on input order.
inline AveragedSpectrum average_class(std::span<const Spectrum> group, const std::string& label,
                                      const WavelengthGrid& grid) {
  if (group.empty()) throw Error(ErrorKind::EmptyClass, "class '" + label + "' has no spectra");

  std::vector<const Spectrum*> ordered;
  ordered.reserve(group.size());
  for (const auto& s : group) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(), [](const Spectrum* a, const Spectrum* b) {
    const auto& ma = a->metadata();
    const auto& mb = b->metadata();
    if (ma.source != mb.source) return ma.source < mb.source;
    if (ma.sample_id != mb.sample_id) return ma.sample_id < mb.sample_id;
    return std::lexicographical_compare(a->reflectance().begin(), a->reflectance().end(),
                                        b->reflectance().begin(), b->reflectance().end());
  });

  std::vector<double> sum(grid.count, 0.0);
  std::vector<double> lo(grid.count, std::numeric_limits<double>::infinity());
  std::vector<double> hi(grid.count, 0.0);
  for (const Spectrum* s : ordered) {
    const auto values = resample_linear(*s, grid);
    for (std::size_t k = 0; k < grid.count; ++k) {
      sum[k] += values[k];
      lo[k] = std::min(lo[k], values[k]);
      hi[k] = std::max(hi[k], values[k]);
    }
  }

  AveragedSpectrum avg{grid, std::vector<double>(grid.count), label, group.size()};
  const auto n = static_cast<double>(group.size());
  // Rounding in the sum can push the mean an ulp past the member envelope.
  for (std::size_t k = 0; k < grid.count; ++k)
    avg.mean_reflectance[k] = std::clamp(sum[k] / n, lo[k], hi[k]);
  return avg;
}

}  // namespace irband
