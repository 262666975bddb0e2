#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace irband {

enum class ErrorKind {
  // ingestion
  Io,
  MalformedHeader,
  MalformedRow,
  NonMonotonicWavelengths,
  NegativeReflectance,
  TooFewPoints,
  WavelengthOutOfRange,
  // manifest
  SchemaViolation,
  DuplicateClassLabel,
  DuplicateFile,
  EmptyClass,
  TooFewClasses,
  UnknownClassLabel,
  // resampling / search
  DegenerateOverlap,
  GridOutOfRange,
  BandOutOfRange,
  BandNotOnGrid,
  NegativeAUC,
  IncompatibleGrids,
  StepMismatch,
  InvalidConfig,
  EmptyGrid,
};

inline constexpr std::string_view to_string(ErrorKind k) noexcept {
  switch (k) {
    case ErrorKind::Io: return "IoFailure";
    case ErrorKind::MalformedHeader: return "MalformedHeader";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::NonMonotonicWavelengths: return "NonMonotonicWavelengths";
    case ErrorKind::NegativeReflectance: return "NegativeReflectance";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::WavelengthOutOfRange: return "WavelengthOutOfRange";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::DuplicateClassLabel: return "DuplicateClassLabel";
    case ErrorKind::DuplicateFile: return "DuplicateFile";
    case ErrorKind::EmptyClass: return "EmptyClass";
    case ErrorKind::TooFewClasses: return "TooFewClasses";
    case ErrorKind::UnknownClassLabel: return "UnknownClassLabel";
    case ErrorKind::DegenerateOverlap: return "DegenerateOverlap";
    case ErrorKind::GridOutOfRange: return "GridOutOfRange";
    case ErrorKind::BandOutOfRange: return "BandOutOfRange";
    case ErrorKind::BandNotOnGrid: return "BandNotOnGrid";
    case ErrorKind::NegativeAUC: return "NegativeAUC";
    case ErrorKind::IncompatibleGrids: return "IncompatibleGrids";
    case ErrorKind::StepMismatch: return "StepMismatch";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
  }
  return "Unknown";
}

/// Data errors come from the inputs (files, manifest, labels); analysis errors
/// come from asking for a scan the loaded data cannot support.
inline constexpr bool is_data_error(ErrorKind k) noexcept {
  switch (k) {
    case ErrorKind::Io:
    case ErrorKind::MalformedHeader:
    case ErrorKind::MalformedRow:
    case ErrorKind::NonMonotonicWavelengths:
    case ErrorKind::NegativeReflectance:
    case ErrorKind::TooFewPoints:
    case ErrorKind::WavelengthOutOfRange:
    case ErrorKind::SchemaViolation:
    case ErrorKind::DuplicateClassLabel:
    case ErrorKind::DuplicateFile:
    case ErrorKind::EmptyClass:
    case ErrorKind::TooFewClasses:
    case ErrorKind::UnknownClassLabel:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string path = {}, std::size_t line = 0)
      : std::runtime_error(compose(kind, message, path, line)),
        kind_(kind),
        path_(std::move(path)),
        line_(line),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& path() const noexcept { return path_; }
  /// 1-based line number, 0 when not tied to a line.
  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

  /// Same error, attributed to a file.
  Error with_path(std::string path) const { return Error(kind_, detail_, std::move(path), line_); }

 private:
  static std::string compose(ErrorKind kind, const std::string& message, const std::string& path,
                             std::size_t line) {
    std::string out(to_string(kind));
    if (!path.empty()) {
      out += " in ";
      out += path;
      if (line > 0) out += ":" + std::to_string(line);
    } else if (line > 0) {
      out += " at line " + std::to_string(line);
    }
    out += ": ";
    out += message;
    return out;
  }

  ErrorKind kind_;
  std::string path_;
  std::size_t line_;
  std::string detail_;
};

}  // namespace irband
