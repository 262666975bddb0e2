#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "irband/error.hpp"
#include "irband/spectrum.hpp"

namespace irband {

struct ManifestClass {
  std::string label;
  std::vector<std::filesystem::path> files;
};

struct DatasetManifest {
  std::vector<ManifestClass> classes;
  WavelengthUnit default_unit = WavelengthUnit::Micrometer;
};

/// Spectra grouped by class label. Every group is non-empty and its members
/// share a wavelength range of positive width.
class ClassedDataset {
 public:
  using Groups = std::map<std::string, std::vector<Spectrum>>;

  explicit ClassedDataset(Groups groups);

  const Groups& groups() const noexcept { return groups_; }
  bool contains(const std::string& label) const { return groups_.count(label) != 0; }
  const std::vector<Spectrum>& group(const std::string& label) const;
  std::vector<std::string> labels() const;
  std::size_t spectrum_count() const;

 private:
  Groups groups_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    cells.push_back(trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return cells;
}

/// Strict decimal parse: the whole cell must be a finite number.
inline bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  // from_chars accepts "inf"/"nan" spellings; those are not measurements.
  for (char c : cell) {
    const bool ok = (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '+' || c == 'e' || c == 'E';
    if (!ok) return false;
  }
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

/// Parses a nanometer cell as micrometers by shifting the decimal exponent in
/// the text, so the result is the correctly rounded micrometer value and is
/// bitwise equal to parsing the same quantity written in micrometers.
inline bool parse_nanometers_as_um(std::string_view cell, double& out) {
  const auto epos = cell.find_first_of("eE");
  std::string_view mantissa = cell.substr(0, epos);
  long exponent = 0;
  if (epos != std::string_view::npos) {
    std::string_view exp_text = cell.substr(epos + 1);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    const auto [ptr, ec] =
        std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    if (exp_text.empty() || ec != std::errc{} || ptr != exp_text.data() + exp_text.size())
      return false;
  }
  if (mantissa.find_first_of("eE") != std::string_view::npos) return false;
  std::string shifted(mantissa);
  shifted += 'e';
  shifted += std::to_string(exponent - 3);
  return parse_double(shifted, out);
}

inline std::string to_shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Parses spectrum CSV text. Header is `wavelength_um,reflectance`,
/// `wavelength_nm,reflectance`, or bare `wavelength,reflectance` (which uses
/// `default_unit`). Lines starting with `#` are comments; `# key: value`
/// comments set sample_id, disease, stage, or subregion metadata.
inline Spectrum parse_spectrum_text(std::string_view text, WavelengthUnit default_unit,
                                    const std::string& source = {}) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  SpectrumMetadata meta;
  meta.source = source;
  std::vector<double> wavelengths;
  std::vector<double> reflectance;
  std::optional<WavelengthUnit> unit;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string_view trimmed = detail::trim(line);
    if (trimmed.empty()) continue;

    if (trimmed.front() == '#') {
      const std::string_view body = detail::trim(trimmed.substr(1));
      const auto colon = body.find(':');
      if (colon == std::string_view::npos) continue;
      const std::string key(detail::trim(body.substr(0, colon)));
      const std::string value(detail::trim(body.substr(colon + 1)));
      if (value.empty()) continue;
      if (key == "sample_id") meta.sample_id = value;
      else if (key == "disease") meta.disease = value;
      else if (key == "stage") meta.stage = value;
      else if (key == "subregion" || key == "subregion_id") meta.subregion_id = value;
      continue;
    }

    const auto cells = detail::split_commas(trimmed);
    if (!unit) {
      if (cells.size() != 2 || cells[1] != "reflectance")
        throw Error(ErrorKind::MalformedHeader,
                    "expected header 'wavelength_um,reflectance' or 'wavelength_nm,reflectance'",
                    source, line_no);
      if (cells[0] == "wavelength_um") unit = WavelengthUnit::Micrometer;
      else if (cells[0] == "wavelength_nm") unit = WavelengthUnit::Nanometer;
      else if (cells[0] == "wavelength") unit = default_unit;
      else
        throw Error(ErrorKind::MalformedHeader,
                    "unknown wavelength column '" + std::string(cells[0]) + "'", source, line_no);
      continue;
    }

    if (cells.size() != 2)
      throw Error(ErrorKind::MalformedRow,
                  "expected 2 columns, got " + std::to_string(cells.size()), source, line_no);
    double w = 0.0;
    double r = 0.0;
    const bool w_ok = *unit == WavelengthUnit::Nanometer ? detail::parse_nanometers_as_um(cells[0], w)
                                                         : detail::parse_double(cells[0], w);
    if (!w_ok)
      throw Error(ErrorKind::MalformedRow,
                  "non-numeric wavelength '" + std::string(cells[0]) + "'", source, line_no);
    if (!detail::parse_double(cells[1], r))
      throw Error(ErrorKind::MalformedRow,
                  "non-numeric reflectance '" + std::string(cells[1]) + "'", source, line_no);
    if (w < kMinWavelengthUm || w > kMaxWavelengthUm)
      throw Error(ErrorKind::WavelengthOutOfRange,
                  "wavelength " + detail::to_shortest(w) + " um outside [0.1, 100] um", source,
                  line_no);
    if (!wavelengths.empty() && !(w > wavelengths.back()))
      throw Error(ErrorKind::NonMonotonicWavelengths,
                  "wavelength " + detail::to_shortest(w) + " um does not exceed previous " +
                      detail::to_shortest(wavelengths.back()) + " um",
                  source, line_no);
    if (r < -kNegativeClampTolerance)
      throw Error(ErrorKind::NegativeReflectance, "reflectance " + detail::to_shortest(r), source,
                  line_no);
    wavelengths.push_back(w);
    reflectance.push_back(r);
  }

  if (!unit) throw Error(ErrorKind::MalformedHeader, "missing header", source);
  if (wavelengths.size() < 2)
    throw Error(ErrorKind::TooFewPoints,
                "need at least 2 data rows, got " + std::to_string(wavelengths.size()), source);

  if (meta.sample_id.empty())
    meta.sample_id = source.empty() ? std::string("spectrum")
                                    : std::filesystem::path(source).stem().string();
  return Spectrum(std::move(wavelengths), std::move(reflectance), std::move(meta));
}

inline Spectrum parse_spectrum_file(const std::filesystem::path& path, WavelengthUnit default_unit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open file", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "read failed", path.string());
  return parse_spectrum_text(buf.str(), default_unit, path.string());
}

/// Writes a spectrum as micrometer CSV using shortest round-trip formatting,
/// so re-parsing reproduces every value exactly.
inline void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  const auto& m = s.metadata();
  if (!m.sample_id.empty()) out << "# sample_id: " << m.sample_id << '\n';
  if (!m.disease.empty()) out << "# disease: " << m.disease << '\n';
  if (m.stage) out << "# stage: " << *m.stage << '\n';
  if (m.subregion_id) out << "# subregion: " << *m.subregion_id << '\n';
  out << "wavelength_um,reflectance\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out << detail::to_shortest(s.wavelengths()[i]) << ','
        << detail::to_shortest(s.reflectance()[i]) << '\n';
}

inline DatasetManifest parse_manifest_json(std::string_view text,
                                           const std::filesystem::path& base_dir = {},
                                           const std::string& source = {}) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SchemaViolation, std::string("invalid JSON: ") + e.what(), source);
  }
  const auto violation = [&](const std::string& what) {
    return Error(ErrorKind::SchemaViolation, what, source);
  };
  if (!doc.is_object()) throw violation("top level must be an object");

  DatasetManifest manifest;
  const auto unit_it = doc.find("default_unit");
  if (unit_it == doc.end()) throw violation("missing key 'default_unit'");
  if (!unit_it->is_string()) throw violation("'default_unit' must be a string");
  const auto unit = unit_it->get<std::string>();
  if (unit == "micrometer") manifest.default_unit = WavelengthUnit::Micrometer;
  else if (unit == "nanometer") manifest.default_unit = WavelengthUnit::Nanometer;
  else throw violation("'default_unit' must be \"micrometer\" or \"nanometer\", got \"" + unit + "\"");

  const auto classes_it = doc.find("classes");
  if (classes_it == doc.end()) throw violation("missing key 'classes'");
  if (!classes_it->is_array()) throw violation("'classes' must be an array");

  std::set<std::string> seen_labels;
  std::set<std::filesystem::path> seen_files;
  for (const auto& entry : *classes_it) {
    if (!entry.is_object()) throw violation("class entry must be an object");
    const auto label_it = entry.find("label");
    if (label_it == entry.end()) throw violation("class entry missing key 'label'");
    if (!label_it->is_string()) throw violation("'label' must be a string");
    const auto files_it = entry.find("files");
    if (files_it == entry.end()) throw violation("class entry missing key 'files'");
    if (!files_it->is_array()) throw violation("'files' must be an array");

    ManifestClass cls;
    cls.label = label_it->get<std::string>();
    if (cls.label.empty()) throw violation("'label' must be non-empty");
    if (!seen_labels.insert(cls.label).second)
      throw Error(ErrorKind::DuplicateClassLabel, "label '" + cls.label + "' appears twice", source);
    if (files_it->empty())
      throw Error(ErrorKind::EmptyClass, "class '" + cls.label + "' lists no files", source);
    for (const auto& f : *files_it) {
      if (!f.is_string() || f.get<std::string>().empty())
        throw violation("entries of 'files' must be non-empty strings");
      std::filesystem::path p = f.get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      p = p.lexically_normal();
      if (!seen_files.insert(p).second)
        throw Error(ErrorKind::DuplicateFile, "file '" + p.string() + "' listed twice", source);
      cls.files.push_back(std::move(p));
    }
    manifest.classes.push_back(std::move(cls));
  }
  if (manifest.classes.size() < 2)
    throw Error(ErrorKind::TooFewClasses,
                "need at least 2 classes, got " + std::to_string(manifest.classes.size()), source);
  return manifest;
}

inline DatasetManifest parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open manifest", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest_json(buf.str(), path.parent_path(), path.string());
}

/// Common wavelength range [lo, hi] of a set of spectra; lo >= hi when empty.
inline std::pair<double, double> common_range(std::span<const Spectrum> spectra) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& s : spectra) {
    lo = std::max(lo, s.min_wavelength());
    hi = std::min(hi, s.max_wavelength());
  }
  return {lo, hi};
}

inline ClassedDataset::ClassedDataset(Groups groups) : groups_(std::move(groups)) {
  for (const auto& [label, members] : groups_) {
    if (label.empty()) throw Error(ErrorKind::SchemaViolation, "empty class label");
    if (members.empty()) throw Error(ErrorKind::EmptyClass, "class '" + label + "' has no spectra");
    const auto [lo, hi] = common_range(members);
    if (!(hi > lo))
      throw Error(ErrorKind::DegenerateOverlap,
                  "spectra of class '" + label + "' share no wavelength range");
  }
}

inline const std::vector<Spectrum>& ClassedDataset::group(const std::string& label) const {
  const auto it = groups_.find(label);
  if (it == groups_.end())
    throw Error(ErrorKind::UnknownClassLabel, "no class labelled '" + label + "'");
  return it->second;
}

inline std::vector<std::string> ClassedDataset::labels() const {
  std::vector<std::string> out;
  for (const auto& [label, members] : groups_) out.push_back(label);
  return out;
}

inline std::size_t ClassedDataset::spectrum_count() const {
  std::size_t n = 0;
  for (const auto& [label, members] : groups_) n += members.size();
  return n;
}

/// Parses every file of the manifest. Parse errors carry the offending path.
/// Members of each group are ordered by source path.
inline ClassedDataset load_dataset(const DatasetManifest& manifest) {
  ClassedDataset::Groups groups;
  for (const auto& cls : manifest.classes) {
    auto& members = groups[cls.label];
    for (const auto& file : cls.files) {
      Spectrum s = [&] {
        try {
          return parse_spectrum_file(file, manifest.default_unit);
        } catch (const Error& e) {
          if (e.path().empty()) throw e.with_path(file.string());
          throw;
        }
      }();
      SpectrumMetadata meta = s.metadata();
      meta.class_label = cls.label;
      if (meta.disease.empty()) meta.disease = cls.label;
      members.push_back(s.with_metadata(std::move(meta)));
    }
    std::sort(members.begin(), members.end(), [](const Spectrum& a, const Spectrum& b) {
      return a.metadata().source < b.metadata().source;
    });
  }
  return ClassedDataset(std::move(groups));
}

/// Flags likely mixed reflectance scales (fraction vs percent) between classes.
inline std::vector<std::string> scale_warnings(const ClassedDataset& dataset) {
  std::vector<std::pair<std::string, double>> maxima;
  for (const auto& [label, members] : dataset.groups()) {
    double m = 0.0;
    for (const auto& s : members) m = std::max(m, s.max_reflectance());
    maxima.emplace_back(label, m);
  }
  std::vector<std::string> out;
  for (const auto& [big_label, big] : maxima) {
    if (big <= 2.0) continue;
    for (const auto& [small_label, small] : maxima) {
      if (small < 1.0)
        out.push_back("class '" + big_label + "' peaks at " + detail::to_shortest(big) +
                      " while class '" + small_label + "' stays below 1; mixed reflectance scales?");
    }
  }
  return out;
}

}  // namespace irband
