#pragma once

#include "evblur/raster.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace evblur {

/// PSNR returned for identical images.
inline constexpr double kPsnrCap = 100.0;

struct MetricReport {
  double psnr = 0.0;  // dB
  double ssim = 0.0;
};

double psnr(const Raster& a, const Raster& b, double peak = 1.0);
inline double psnr(const Frame& a, const Frame& b, double peak = 1.0) {
  return psnr(a.raster(), b.raster(), peak);
}

/// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5) over valid positions,
/// K1 = 0.01, K2 = 0.03, mean-pooled. Needs images of at least 11x11.
double ssim(const Raster& a, const Raster& b, double peak = 1.0);
inline double ssim(const Frame& a, const Frame& b, double peak = 1.0) {
  return ssim(a.raster(), b.raster(), peak);
}

struct EvaluationItem {
  std::size_t record = 0;
  double timestamp = 0.0;
  const Frame* ground_truth = nullptr;
  const Frame* reconstruction = nullptr;  // null when missing
};

struct EvaluationRow {
  std::size_t record;
  double timestamp;
  MetricReport metrics;
};

struct EvaluationTable {
  std::vector<EvaluationRow> rows;
  std::vector<EvaluationItem> missing;

  MetricReport aggregate() const;
};

/// Scores every item with a reconstruction; the rest are listed as missing.
EvaluationTable evaluate(const std::vector<EvaluationItem>& items, double peak = 1.0);

/// `timestamp,psnr_db,ssim` header, one row per frame, then a `mean` row when
/// the table is non-empty.
void write_csv(std::ostream& out, const EvaluationTable& table);

} // namespace evblur
