#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "irband/report.hpp"
#include "support/fixtures.hpp"

using namespace irband;
using irband::testing::averaged;
using irband::testing::read_file;
using irband::testing::TempDir;

namespace {

BandScanConfig window(double lo, double hi, double step = 0.05) {
  BandScanConfig c;
  c.range_lo = lo;
  c.range_hi = hi;
  c.scan_step = step;
  return c;
}

CoefficientGrid two_by_two() {
  return CoefficientGrid(window(1.6, 1.7), {"a", "b"}, {{0.0, 0.5}, {1.0, std::nullopt}});
}

struct ImportedHeatmap {
  std::vector<double> widths;
  std::vector<double> starts;
  std::vector<std::vector<std::optional<double>>> values;
};

// Test-side reader for the matrix CSV.
ImportedHeatmap import_heatmap_csv(const std::string& text) {
  ImportedHeatmap h;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::istringstream header(line);
  std::string cell;
  std::getline(header, cell, ',');
  EXPECT_EQ(cell, "start_um\\width_um");
  while (std::getline(header, cell, ',')) h.widths.push_back(std::stod(cell));
  while (std::getline(in, line)) {
    std::vector<std::optional<double>> row;
    std::size_t pos = 0;
    bool first = true;
    while (true) {
      const auto comma = line.find(',', pos);
      const std::string field = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (first) h.starts.push_back(std::stod(field));
      else row.push_back(field.empty() ? std::nullopt : std::optional<double>(std::stod(field)));
      first = false;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    h.values.push_back(row);
  }
  return h;
}

}  // namespace

TEST(FormatSig6, Shapes) {
  EXPECT_EQ(format_sig6(2.0), "2.0");
  EXPECT_EQ(format_sig6(1.8 + 0.2), "2.0");
  EXPECT_EQ(format_sig6(0.5), "0.5");
  EXPECT_EQ(format_sig6(0.0), "0.0");
  EXPECT_EQ(format_sig6(-0.0), "0.0");
  EXPECT_EQ(format_sig6(1.0 / 3.0), "0.333333");
  EXPECT_EQ(format_sig6(1.6 + 4 * 0.05), "1.8");
  EXPECT_EQ(format_sig6(123456789.0), "1.23457e+08");
  EXPECT_EQ(format_sig6(1.5e-7), "1.5e-07");
}

TEST(HeatmapCsv, TwoByTwo) {
  std::ostringstream out;
  write_heatmap_csv(out, two_by_two());
  EXPECT_EQ(out.str(), "start_um\\width_um,0.05,0.1\n1.6,0.0,0.5\n1.65,1.0,\n");
}

TEST(HeatmapCsv, ScabWindowLineCount) {
  const auto a = averaged(1.6, 0.01, std::vector<double>(161, 1.0));
  const auto b = averaged(1.6, 0.01, std::vector<double>(161, 0.7));
  std::ostringstream out;
  write_heatmap_csv(out, scan_grid(a, b, window(1.6, 3.2)));
  const std::string s = out.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 33);
}

TEST(HeatmapCsv, RoundTripToSixDigits) {
  std::mt19937_64 rng(8);
  const auto r1 = irband::testing::random_curve(rng, 161);
  const auto r2 = irband::testing::random_curve(rng, 161);
  const auto g = scan_grid(averaged(1.6, 0.01, r1), averaged(1.6, 0.01, r2), window(1.6, 3.2));
  std::ostringstream out;
  write_heatmap_csv(out, g);
  const auto h = import_heatmap_csv(out.str());
  ASSERT_EQ(h.starts.size(), g.rows());
  ASSERT_EQ(h.widths.size(), g.cols());
  for (std::size_t s = 0; s < g.rows(); ++s) {
    EXPECT_NEAR(h.starts[s], g.start(s), 1e-9);
    for (std::size_t w = 0; w < g.cols(); ++w) {
      ASSERT_EQ(h.values[s][w].has_value(), g.value(s, w).has_value());
      if (const auto v = g.value(s, w)) {
        EXPECT_LE(std::abs(*h.values[s][w] - *v), 5e-6 * std::max(*v, 1e-300) + 1e-300);
      }
    }
  }
}

TEST(HeatmapPgm, Layout) {
  std::ostringstream out;
  write_heatmap_pgm(out, two_by_two(), HeatmapScale::Absolute);
  EXPECT_EQ(out.str(), "P2\n2 2\n255\n0 128\n255 0\n");
}

TEST(HeatmapPgm, AllZeroAndSingleCell) {
  const auto zero = CoefficientGrid(window(1.6, 1.7), {"a", "b"}, {{0.0, 0.0}, {0.0, std::nullopt}});
  std::ostringstream z;
  write_heatmap_pgm(z, zero, HeatmapScale::Absolute);
  EXPECT_EQ(z.str(), "P2\n2 2\n255\n0 0\n0 0\n");
  std::ostringstream zr;
  write_heatmap_pgm(zr, zero, HeatmapScale::Relative);
  EXPECT_EQ(zr.str(), z.str());

  const auto one = CoefficientGrid(window(1.6, 1.65), {"a", "b"}, {{1.0}});
  std::ostringstream o;
  write_heatmap_pgm(o, one, HeatmapScale::Absolute);
  EXPECT_EQ(o.str(), "P2\n1 1\n255\n255\n");
}

TEST(HeatmapPgm, RoundingAndRelativeScale) {
  EXPECT_EQ(heatmap_pixel(0.5, 0, 1, HeatmapScale::Absolute), 128);
  EXPECT_EQ(heatmap_pixel(1.0, 0, 1, HeatmapScale::Absolute), 255);
  EXPECT_EQ(heatmap_pixel(0.0, 0, 1, HeatmapScale::Absolute), 0);
  EXPECT_EQ(heatmap_pixel(0.5, 0.25, 0.75, HeatmapScale::Relative), 128);
  EXPECT_EQ(heatmap_pixel(0.75, 0.25, 0.75, HeatmapScale::Relative), 255);
  EXPECT_EQ(heatmap_pixel(0.3, 0.3, 0.3, HeatmapScale::Relative), 0);
  const auto g = CoefficientGrid(window(1.6, 1.7), {"a", "b"}, {{0.25, 0.75}, {0.5, std::nullopt}});
  std::ostringstream out;
  write_heatmap_pgm(out, g, HeatmapScale::Relative);
  EXPECT_EQ(out.str(), "P2\n2 2\n255\n0 255\n128 0\n");
}

TEST(HeatmapPgm, DimensionsMatchGrid) {
  const auto a = averaged(1.6, 0.01, std::vector<double>(161, 1.0));
  auto c = window(1.6, 3.2);
  c.max_width = 0.5;
  const auto g = scan_grid(a, a, c);
  std::ostringstream out;
  write_heatmap_pgm(out, g, HeatmapScale::Absolute);
  std::istringstream in(out.str());
  std::string magic;
  std::size_t w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  EXPECT_EQ(magic, "P2");
  EXPECT_EQ(w, g.cols());
  EXPECT_EQ(h, g.rows());
  EXPECT_EQ(maxval, 255u);
  std::size_t pixels = 0;
  int px = 0;
  while (in >> px) ++pixels;
  EXPECT_EQ(pixels, w * h);
}

TEST(BandReportJson, OneBandNoRegions) {
  BandReport r;
  r.pair = {"healthy", "infected"};
  r.best.push_back(RankedBand{Band{1.8, 0.2}, 0.5, 4, 3});
  std::ostringstream out;
  write_band_report_json(out, r);
  const std::string expected =
      "{\n"
      "  \"pair\":[\"healthy\",\"infected\"],\n"
      "  \"best\":[\n"
      "    {\"start_um\":1.8,\"width_um\":0.2,\"end_um\":2.0,\"coefficient\":0.5}\n"
      "  ],\n"
      "  \"regions\":[]\n"
      "}\n";
  EXPECT_EQ(out.str(), expected);
  EXPECT_TRUE(nlohmann::json::accept(out.str()));
}

TEST(BandReportJson, RegionsAndEscapingParse) {
  const auto d = irband::testing::gaussian_dip();
  const auto g = scan_grid(averaged(1.6, 0.01, d.flat, "flat \"A\""), averaged(1.6, 0.01, d.dipped, "dip"),
                           window(1.6, 3.2));
  const BandReport r = make_band_report(g, 3);
  std::ostringstream out;
  write_band_report_json(out, r);
  const auto doc = nlohmann::json::parse(out.str());
  EXPECT_EQ(doc["pair"][0], "flat \"A\"");
  ASSERT_EQ(doc["best"].size(), 3u);
  ASSERT_EQ(doc["regions"].size(), 1u);
  const auto& region = doc["regions"][0];
  EXPECT_DOUBLE_EQ(region["start_lo_um"].get<double>(), 1.85);
  EXPECT_DOUBLE_EQ(region["start_hi_um"].get<double>(), 1.9);
  EXPECT_DOUBLE_EQ(region["width_hi_um"].get<double>(), 0.1);
  EXPECT_DOUBLE_EQ(region["max_coefficient"].get<double>(), 0.518464);
  EXPECT_DOUBLE_EQ(region["argmax_band"]["end_um"].get<double>(), 1.9);
  // key order is fixed
  const std::string text = out.str();
  EXPECT_LT(text.find("\"pair\""), text.find("\"best\""));
  EXPECT_LT(text.find("\"best\""), text.find("\"regions\""));
  EXPECT_LT(text.find("\"start_lo_um\""), text.find("\"argmax_band\""));
}

TEST(Export, FilesAndIoFailure) {
  TempDir dir("export");
  const auto g = two_by_two();
  export_heatmap_csv(g, dir / "h.csv");
  export_heatmap_pgm(g, HeatmapScale::Absolute, dir / "h.pgm");
  export_band_report_json(make_band_report(g, 2), dir / "r.json");
  EXPECT_EQ(read_file(dir / "h.csv"), "start_um\\width_um,0.05,0.1\n1.6,0.0,0.5\n1.65,1.0,\n");
  EXPECT_EQ(read_file(dir / "h.pgm"), "P2\n2 2\n255\n0 128\n255 0\n");
  EXPECT_FALSE(read_file(dir / "r.json").empty());
  try {
    export_heatmap_csv(g, dir / "no" / "such" / "dir" / "h.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}
