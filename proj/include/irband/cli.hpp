#pragma once

#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "irband/bandsearch.hpp"
#include "irband/error.hpp"
#include "irband/report.hpp"
#include "irband/resample.hpp"
#include "irband/spectra_io.hpp"

namespace irband::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kAnalysisError = 3 };

/// Measured range the default scan window is clipped to.
inline constexpr double kDefaultWindowLo = 1.6;
inline constexpr double kDefaultWindowHi = 18.0;

struct AnalyzeOptions {
  std::string manifest;
  std::string pair;
  std::string range;
  double step = 0.05;
  std::optional<double> max_width;
  double resolution = 0.01;
  double threshold = 0.8;
  std::size_t top = 5;
  std::string out_dir = ".";
  std::string scale = "absolute";
  unsigned threads = 1;
};

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::pair<std::string, std::string> split_pair(const std::string& text, const char* what) {
  const auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
    throw UsageError(std::string(what) + " must look like A:B, got '" + text + "'");
  return {text.substr(0, colon), text.substr(colon + 1)};
}

inline double to_number(const std::string& text, const char* what) {
  double v = 0.0;
  if (!irband::detail::parse_double(text, v))
    throw UsageError(std::string(what) + ": '" + text + "' is not a number");
  return v;
}

inline int exit_code_for(const Error& e) {
  return is_data_error(e.kind()) ? kDataError : kAnalysisError;
}

inline int run_validate(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  const DatasetManifest manifest = parse_manifest(manifest_path);
  bool ok = true;
  for (const auto& cls : manifest.classes) {
    for (const auto& file : cls.files) {
      try {
        const Spectrum s = parse_spectrum_file(file, manifest.default_unit);
        out << "ok    " << cls.label << "  " << file.string() << "  " << s.size() << " points, "
            << format_sig6(s.min_wavelength()) << "-" << format_sig6(s.max_wavelength()) << " um\n";
      } catch (const Error& e) {
        ok = false;
        out << "FAIL  " << cls.label << "  " << file.string() << '\n';
        err << e.what() << '\n';
      }
    }
  }
  if (!ok) return kDataError;
  const ClassedDataset dataset = load_dataset(manifest);
  for (const auto& w : scale_warnings(dataset)) err << "warning: " << w << '\n';
  out << dataset.groups().size() << " classes, " << dataset.spectrum_count() << " spectra\n";
  return kOk;
}

inline int run_pairs(const std::string& manifest_path, std::ostream& out) {
  const ClassedDataset dataset = load_dataset(parse_manifest(manifest_path));
  const auto labels = dataset.labels();
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j) out << labels[i] << ':' << labels[j] << '\n';
  return kOk;
}

inline int run_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
  // Flag checks come first so usage mistakes never depend on the data.
  const auto [label_a, label_b] = split_pair(opt.pair, "--pair");
  if (label_a == label_b) throw UsageError("--pair needs two different labels");
  std::optional<std::pair<double, double>> range;
  if (!opt.range.empty()) {
    const auto [lo, hi] = split_pair(opt.range, "--range");
    range.emplace(to_number(lo, "--range"), to_number(hi, "--range"));
    if (!(range->first < range->second)) throw UsageError("--range must satisfy LO < HI");
    if (!(range->first > 0.0)) throw UsageError("--range must start above 0");
  }
  if (!(opt.step > 0.0)) throw UsageError("--step must be positive");
  if (!(opt.resolution > 0.0)) throw UsageError("--resolution must be positive");
  if (!(opt.threshold > 0.0 && opt.threshold <= 1.0)) throw UsageError("--threshold must lie in (0, 1]");
  if (opt.top == 0) throw UsageError("--top must be at least 1");
  if (opt.max_width && !(*opt.max_width >= opt.step)) throw UsageError("--max-width must be >= --step");
  if (opt.scale != "absolute" && opt.scale != "relative")
    throw UsageError("--scale must be 'absolute' or 'relative'");

  const ClassedDataset dataset = load_dataset(parse_manifest(opt.manifest));
  const auto& group_a = dataset.group(label_a);
  const auto& group_b = dataset.group(label_b);

  const WavelengthGrid grid = common_grid(group_a, group_b, opt.resolution);
  const AveragedSpectrum avg_a = average_class(group_a, label_a, grid);
  const AveragedSpectrum avg_b = average_class(group_b, label_b, grid);

  BandScanConfig config;
  config.scan_step = opt.step;
  config.max_width = opt.max_width;
  config.region_threshold_fraction = opt.threshold;
  if (range) {
    config.range_lo = range->first;
    config.range_hi = range->second;
  } else {
    double lo = std::max(grid.at(0), kDefaultWindowLo);
    const double first = std::ceil((lo - grid.at(0)) / grid.step - 1e-9);
    config.range_lo = grid.at(static_cast<std::size_t>(first));
    config.range_hi = std::min(grid.last(), kDefaultWindowHi);
    if (!(config.range_lo < config.range_hi))
      throw Error(ErrorKind::DegenerateOverlap, "common range does not meet the default window");
  }

  const CoefficientGrid coefs = scan_grid(avg_a, avg_b, config, ScanOptions{opt.threads});
  const BandReport report = make_band_report(coefs, opt.top);

  const std::filesystem::path dir = opt.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory: " + ec.message(), dir.string());
  export_heatmap_csv(coefs, dir / "heatmap.csv");
  export_heatmap_pgm(coefs, opt.scale == "relative" ? HeatmapScale::Relative : HeatmapScale::Absolute,
                     dir / "heatmap.pgm");
  export_band_report_json(report, dir / "report.json");

  for (const auto& w : scale_warnings(dataset)) err << "warning: " << w << '\n';
  const RankedBand& top = report.best.front();
  out << label_a << ':' << label_b << " best band " << format_sig6(top.band.start) << '-'
      << format_sig6(top.band.end()) << " um (start " << format_sig6(top.band.start) << ", width "
      << format_sig6(top.band.width) << ") coefficient " << format_sig6(top.coefficient) << '\n';
  return kOk;
}

}  // namespace detail

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Waveband selection for discriminating classes of infrared reflectance spectra",
               "irband"};
  app.require_subcommand(1);

  std::string validate_manifest;
  auto* validate = app.add_subcommand("validate", "Load a dataset and report per-file diagnostics");
  validate->add_option("manifest", validate_manifest, "Dataset manifest (JSON)")->required();

  std::string pairs_manifest;
  auto* pairs = app.add_subcommand("pairs", "List the class pairs available in a dataset");
  pairs->add_option("manifest", pairs_manifest, "Dataset manifest (JSON)")->required();

  AnalyzeOptions opt;
  auto* analyze = app.add_subcommand("analyze", "Scan all wavebands for one class pair");
  analyze->add_option("manifest", opt.manifest, "Dataset manifest (JSON)")->required();
  analyze->add_option("--pair", opt.pair, "Class pair A:B")->required();
  analyze->add_option("--range", opt.range, "Scan window LO:HI in um (default: common range within 1.6-18)");
  analyze->add_option("--step", opt.step, "Scan step in um")->capture_default_str();
  analyze->add_option("--max-width", opt.max_width, "Widest band in um (default: whole window)");
  analyze->add_option("--resolution", opt.resolution, "Internal grid resolution in um")->capture_default_str();
  analyze->add_option("--threshold", opt.threshold, "Selective-region threshold as a fraction of the grid max")
      ->capture_default_str();
  analyze->add_option("--top", opt.top, "Number of best bands to report")->capture_default_str();
  analyze->add_option("--out-dir", opt.out_dir, "Output directory")->capture_default_str();
  analyze->add_option("--scale", opt.scale, "Heatmap gray scale: absolute or relative")->capture_default_str();
  analyze->add_option("--threads", opt.threads, "Scan worker threads (0 = all cores)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return detail::run_validate(validate_manifest, out, err);
    if (*pairs) return detail::run_pairs(pairs_manifest, out);
    return detail::run_analyze(opt, out, err);
  } catch (const detail::UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return detail::exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kAnalysisError;
  }
}

}  // namespace irband::cli
