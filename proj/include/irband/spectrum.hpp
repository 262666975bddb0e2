#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "irband/error.hpp"

namespace irband {

/// Sanity bounds on wavelength after conversion to micrometers.
inline constexpr double kMinWavelengthUm = 0.1;
inline constexpr double kMaxWavelengthUm = 100.0;

/// Reflectance in [-kNegativeClampTolerance, 0) is clamped to zero on ingestion;
/// anything more negative is rejected.
inline constexpr double kNegativeClampTolerance = 1e-6;

enum class WavelengthUnit { Micrometer, Nanometer };

struct SpectrumMetadata {
  std::string sample_id;
  std::string class_label;
  std::string disease;
  std::optional<std::string> stage;
  std::optional<std::string> subregion_id;
  /// File the spectrum was read from; empty for in-memory spectra.
  std::string source;

  bool operator==(const SpectrumMetadata&) const = default;
};

/// One reflectance curve. Wavelengths are in micrometers, strictly increasing,
/// and all reflectance values are nonnegative. Construction validates.
class Spectrum {
 public:
  Spectrum(std::vector<double> wavelengths, std::vector<double> reflectance,
           SpectrumMetadata metadata = {})
      : wavelengths_(std::move(wavelengths)),
        reflectance_(std::move(reflectance)),
        metadata_(std::move(metadata)) {
    validate();
  }

  std::span<const double> wavelengths() const noexcept { return wavelengths_; }
  std::span<const double> reflectance() const noexcept { return reflectance_; }
  const SpectrumMetadata& metadata() const noexcept { return metadata_; }
  std::size_t size() const noexcept { return wavelengths_.size(); }

  double min_wavelength() const noexcept { return wavelengths_.front(); }
  double max_wavelength() const noexcept { return wavelengths_.back(); }
  double max_reflectance() const noexcept {
    return *std::max_element(reflectance_.begin(), reflectance_.end());
  }

  Spectrum with_metadata(SpectrumMetadata metadata) const {
    Spectrum copy = *this;
    copy.metadata_ = std::move(metadata);
    return copy;
  }

  bool operator==(const Spectrum&) const = default;

 private:
  void validate() {
    if (wavelengths_.size() != reflectance_.size())
      throw Error(ErrorKind::MalformedRow, "wavelength and reflectance lengths differ");
    if (wavelengths_.size() < 2)
      throw Error(ErrorKind::TooFewPoints,
                  "need at least 2 samples, got " + std::to_string(wavelengths_.size()));
    for (std::size_t i = 0; i < wavelengths_.size(); ++i) {
      const double w = wavelengths_[i];
      if (!std::isfinite(w) || !std::isfinite(reflectance_[i]))
        throw Error(ErrorKind::MalformedRow, "non-finite value at sample " + std::to_string(i));
      if (w < kMinWavelengthUm || w > kMaxWavelengthUm)
        throw Error(ErrorKind::WavelengthOutOfRange,
                    "wavelength " + std::to_string(w) + " um outside [0.1, 100] um");
      if (i > 0 && !(w > wavelengths_[i - 1]))
        throw Error(ErrorKind::NonMonotonicWavelengths,
                    "wavelength at sample " + std::to_string(i) + " does not increase");
      double& r = reflectance_[i];
      if (r < -kNegativeClampTolerance)
        throw Error(ErrorKind::NegativeReflectance,
                    "reflectance " + std::to_string(r) + " at sample " + std::to_string(i));
      if (std::signbit(r)) r = 0.0;
    }
  }

  std::vector<double> wavelengths_;
  std::vector<double> reflectance_;
  SpectrumMetadata metadata_;
};

}  // namespace irband
