#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "irband/irband.hpp"

namespace irband::testing {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("irband_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Averaged spectrum on a uniform grid straight from values.
inline AveragedSpectrum averaged(double start, double step, std::vector<double> values,
                                 std::string label = "a") {
  const WavelengthGrid grid{start, step, values.size()};
  return AveragedSpectrum{grid, std::move(values), std::move(label), 1};
}

/// Random nonnegative curve with smooth structure plus noise; some entries
/// are exactly zero so the zero-area paths get exercised.
inline std::vector<double> random_curve(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double a = unit(rng) * 2.0;
  const double f = 1.0 + unit(rng) * 8.0;
  const double ph = unit(rng) * 6.28;
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double base = a * (1.0 + std::sin(f * static_cast<double>(k) / static_cast<double>(n) + ph));
    v[k] = unit(rng) < 0.05 ? 0.0 : base * (0.5 + unit(rng));
  }
  return v;
}

/// CSV text of a spectrum sampled at the given wavelengths.
inline std::string spectrum_csv(const std::vector<double>& wl, const std::vector<double>& r) {
  std::ostringstream out;
  write_spectrum_csv(out, Spectrum(wl, r));
  return out.str();
}

/// Flat 1.0 vs the same curve with a Gaussian dip: depth 0.8, center 1.9 um,
/// sigma 0.05 um. Sampled every `resolution` um over [lo, hi].
struct DipPair {
  std::vector<double> wavelengths;
  std::vector<double> flat;
  std::vector<double> dipped;
};

inline DipPair gaussian_dip(double lo = 1.6, double hi = 3.2, double resolution = 0.01,
                            double center = 1.9, double depth = 0.8, double sigma = 0.05) {
  DipPair d;
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / resolution)) + 1;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = lo + resolution * static_cast<double>(k);
    d.wavelengths.push_back(x);
    d.flat.push_back(1.0);
    const double z = (x - center) / sigma;
    d.dipped.push_back(1.0 - depth * std::exp(-0.5 * z * z));
  }
  return d;
}

/// Writes a two-class dataset (one file per class) and returns the manifest path.
inline std::filesystem::path write_pair_dataset(const std::filesystem::path& dir, const std::string& a,
                                                const std::vector<double>& wl,
                                                const std::vector<double>& ra, const std::string& b,
                                                const std::vector<double>& rb) {
  write_file(dir / (a + ".csv"), spectrum_csv(wl, ra));
  write_file(dir / (b + ".csv"), spectrum_csv(wl, rb));
  write_file(dir / "manifest.json",
             "{\"default_unit\":\"micrometer\",\"classes\":[{\"label\":\"" + a + "\",\"files\":[\"" + a +
                 ".csv\"]},{\"label\":\"" + b + "\",\"files\":[\"" + b + ".csv\"]}]}\n");
  return dir / "manifest.json";
}

}  // namespace irband::testing
