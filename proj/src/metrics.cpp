#include "evblur/metrics.hpp"

#include "evblur/error.hpp"

#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace evblur {

double psnr(const Raster& a, const Raster& b, double peak) {
  require_same_shape(a, b, "psnr");
  if (!(peak > 0.0)) {
    throw DomainError("psnr peak must be positive");
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sse += d * d;
  }
  const double mse = sse / static_cast<double>(a.size());
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

namespace {

constexpr std::size_t kWindow = 11;

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double sum = 0.0;
  for (std::size_t i = 0; i < kWindow; ++i) {
    const double d = static_cast<double>(i) - 5.0;
    taps[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable Gaussian filter over valid positions only.
Raster filter_valid(const Raster& in, const std::array<double, kWindow>& taps) {
  const std::size_t out_w = in.width() - kWindow + 1;
  const std::size_t out_h = in.height() - kWindow + 1;
  Raster rows(in.height(), out_w);
  for (std::size_t y = 0; y < in.height(); ++y) {
    for (std::size_t x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) acc += taps[k] * in(y, x + k);
      rows(y, x) = acc;
    }
  }
  Raster out(out_h, out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    for (std::size_t x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) acc += taps[k] * rows(y + k, x);
      out(y, x) = acc;
    }
  }
  return out;
}

Raster product(const Raster& a, const Raster& b) {
  Raster out(a.height(), a.width());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

} // namespace

double ssim(const Raster& a, const Raster& b, double peak) {
  require_same_shape(a, b, "ssim");
  if (a.height() < kWindow || a.width() < kWindow) {
    throw DomainError("ssim needs images of at least 11x11, got " + std::to_string(a.height()) +
                      "x" + std::to_string(a.width()));
  }
  const auto taps = gaussian_taps();
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  const Raster mu_a = filter_valid(a, taps);
  const Raster mu_b = filter_valid(b, taps);
  const Raster aa = filter_valid(product(a, a), taps);
  const Raster bb = filter_valid(product(b, b), taps);
  const Raster ab = filter_valid(product(a, b), taps);
  double acc = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double var_a = aa[i] - ma * ma;
    const double var_b = bb[i] - mb * mb;
    const double cov = ab[i] - ma * mb;
    acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
           ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
  }
  return acc / static_cast<double>(mu_a.size());
}

MetricReport EvaluationTable::aggregate() const {
  MetricReport mean;
  if (rows.empty()) return mean;
  for (const auto& row : rows) {
    mean.psnr += row.metrics.psnr;
    mean.ssim += row.metrics.ssim;
  }
  mean.psnr /= static_cast<double>(rows.size());
  mean.ssim /= static_cast<double>(rows.size());
  return mean;
}

EvaluationTable evaluate(const std::vector<EvaluationItem>& items, double peak) {
  EvaluationTable table;
  for (const auto& item : items) {
    if (item.reconstruction == nullptr) {
      table.missing.push_back(item);
      continue;
    }
    table.rows.push_back({item.record, item.timestamp,
                          {psnr(*item.ground_truth, *item.reconstruction, peak),
                           ssim(*item.ground_truth, *item.reconstruction, peak)}});
  }
  return table;
}

void write_csv(std::ostream& out, const EvaluationTable& table) {
  out << "timestamp,psnr_db,ssim\n";
  out << std::setprecision(10);
  for (const auto& row : table.rows) {
    out << std::setprecision(17) << row.timestamp << std::setprecision(10) << ','
        << row.metrics.psnr << ',' << row.metrics.ssim << '\n';
  }
  if (!table.rows.empty()) {
    const MetricReport mean = table.aggregate();
    out << "mean," << mean.psnr << ',' << mean.ssim << '\n';
  }
}

} // namespace evblur
