#pragma once

// Brute-force reference scanner used only by the tests. It shares no code with
// the library: band areas are integrated directly per cell from the sampled
// curve, with no prefix sums and its own index bookkeeping.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace oracle {

struct Sampled {
  std::vector<double> x;
  std::vector<double> y;
};

inline Sampled sample(double start, double step, const std::vector<double>& values) {
  Sampled s;
  for (std::size_t k = 0; k < values.size(); ++k) {
    s.x.push_back(start + step * static_cast<double>(k));
    s.y.push_back(values[k]);
  }
  return s;
}

/// Index of the sample nearest to `at`; -1 if none lies within 1e-9.
inline long locate(const Sampled& s, double at) {
  long best = -1;
  double best_d = 1e-9;
  for (std::size_t k = 0; k < s.x.size(); ++k) {
    const double d = std::fabs(s.x[k] - at);
    if (d <= best_d) {
      best = static_cast<long>(k);
      best_d = d;
    }
  }
  return best;
}

/// Direct trapezoid area between samples a and b.
inline double area(const Sampled& s, long a, long b) {
  double total = 0.0;
  for (long k = a; k < b; ++k) total += 0.5 * (s.x[k + 1] - s.x[k]) * (s.y[k] + s.y[k + 1]);
  return total;
}

struct Cell {
  long start_index;
  long width_index;
  double start;
  double width;
  double value;
  double area1;
  double area2;
};

struct Scan {
  std::vector<std::vector<std::optional<double>>> values;  // [start][width]
  std::vector<Cell> cells;
};

/// Every (start, width) band on the lattice lo + k*step inside [lo, hi].
inline Scan scan(const Sampled& s1, const Sampled& s2, double lo, double hi, double step,
                 double max_width) {
  Scan out;
  const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  const long nw = std::min(n, static_cast<long>(std::floor(max_width / step + 1e-9)));
  out.values.assign(n, std::vector<std::optional<double>>(nw));
  for (long i = 0; i < n; ++i) {
    const double start = lo + step * static_cast<double>(i);
    for (long j = 1; j <= nw; ++j) {
      const double end = lo + step * static_cast<double>(i + j);
      if (end > hi + 1e-9) continue;
      const long a1 = locate(s1, start), b1 = locate(s1, end);
      const long a2 = locate(s2, start), b2 = locate(s2, end);
      if (a1 < 0 || b1 < 0 || a2 < 0 || b2 < 0) continue;
      const double u = area(s1, a1, b1);
      const double v = area(s2, a2, b2);
      const double value = (u + v) == 0.0 ? 0.0 : std::fabs(u - v) / (u + v);
      out.values[i][j - 1] = value;
      out.cells.push_back(Cell{i, j - 1, start, step * static_cast<double>(j), value, u, v});
    }
  }
  return out;
}

/// Highest value; equal values (to 1e-12) prefer the narrower, then earlier band.
inline Cell argmax(const Scan& scan) {
  Cell best = scan.cells.front();
  for (const Cell& c : scan.cells) {
    const long long qc = std::llround(c.value * 1e12);
    const long long qb = std::llround(best.value * 1e12);
    if (qc > qb || (qc == qb && (c.width_index < best.width_index ||
                                 (c.width_index == best.width_index && c.start_index < best.start_index))))
      best = c;
  }
  return best;
}

/// Cells at or above fraction * max, labelled by 4-connected component via
/// repeated label relaxation. Returns component id per cell (-1 if below).
inline std::vector<std::vector<int>> components(const Scan& scan, double fraction) {
  double peak = 0.0;
  for (const Cell& c : scan.cells) peak = std::max(peak, c.value);
  const std::size_t rows = scan.values.size();
  const std::size_t cols = rows ? scan.values[0].size() : 0;
  std::vector<std::vector<int>> label(rows, std::vector<int>(cols, -1));
  if (peak == 0.0) return label;
  int next = 0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (scan.values[i][j] && *scan.values[i][j] >= fraction * peak) label[i][j] = next++;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        if (label[i][j] < 0) continue;
        const auto pull = [&](std::size_t a, std::size_t b) {
          if (label[a][b] >= 0 && label[a][b] < label[i][j]) {
            label[i][j] = label[a][b];
            changed = true;
          }
        };
        if (i > 0) pull(i - 1, j);
        if (i + 1 < rows) pull(i + 1, j);
        if (j > 0) pull(i, j - 1);
        if (j + 1 < cols) pull(i, j + 1);
      }
  }
  return label;
}

}  // namespace oracle
