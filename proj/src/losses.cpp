#include "evblur/losses.hpp"

#include "evblur/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace evblur {
namespace {

double mean_abs_diff(const Frame& a, const Frame& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

// Min/max normalization over the masked entries of `field`, in place.
void normalize_masked(std::vector<double>& field) {
  const auto [lo, hi] = std::minmax_element(field.begin(), field.end());
  const double min = *lo;
  const double range = *hi - min;
  const double magnitude = std::max({1.0, std::abs(*lo), std::abs(*hi)});
  if (!(range > 1e-9 * magnitude)) {
    std::fill(field.begin(), field.end(), 0.5);
    return;
  }
  for (double& v : field) v = (v - min) / range;
}

struct GridReconstruction {
  std::vector<double> times;  // combined, ascending
  std::vector<Frame> latents;
  Frame reblur_first;
  Frame reblur_second;
};

GridReconstruction reconstruct_grid(const InputPair& pair, std::size_t m, const ThresholdModel& c) {
  if (m == 0) {
    throw DomainError("blurry-sharp loss needs at least one latent per exposure");
  }
  GridReconstruction out;
  std::vector<Frame> first;
  for (double t : exposure_grid(pair.first().window, m)) {
    first.push_back(latent_from_blur(pair.first(), edi_map(pair.index(), t, pair.first().window, c)));
    out.times.push_back(t);
  }
  std::vector<Frame> second;
  for (double t : exposure_grid(pair.second().window, m)) {
    second.push_back(
        latent_from_blur(pair.second(), edi_map(pair.index(), t, pair.second().window, c)));
    out.times.push_back(t);
  }
  out.reblur_first = reblur(first);
  out.reblur_second = reblur(second);
  out.latents = std::move(first);
  out.latents.insert(out.latents.end(), second.begin(), second.end());
  return out;
}

} // namespace

LossWeights::LossWeights(double a, double b, double g) : alpha(a), beta(b), gamma(g) {
  if (!(a >= 0.0) || !(b >= 0.0) || !(g >= 0.0)) {
    throw DomainError("loss weights must be nonnegative");
  }
}

double blurry_event_loss(const InputPair& pair, double f, const ThresholdModel& c) {
  const auto e_first = edi_map(pair.index(), f, pair.first().window, c);
  const auto e_second = edi_map(pair.index(), f, pair.second().window, c);
  const Frame& b_first = pair.first().frame;
  const Frame& b_second = pair.second().frame;
  double acc = 0.0;
  for (std::size_t i = 0; i < b_first.size(); ++i) {
    const double blur_diff = std::log(b_second[i]) - std::log(b_first[i]);
    const double edi_diff = std::log(e_second.values[i]) - std::log(e_first.values[i]);
    acc += std::abs(blur_diff - edi_diff);
  }
  return acc / static_cast<double>(b_first.size());
}

double blurry_sharp_loss(const InputPair& pair, std::size_t m_per_window, const ThresholdModel& c) {
  const auto grid = reconstruct_grid(pair, m_per_window, c);
  return mean_abs_diff(grid.reblur_first, pair.first().frame) +
         mean_abs_diff(grid.reblur_second, pair.second().frame);
}

double sharp_event_loss(const Frame& l_f, const Frame& l_t, const PixelEventIndex& events, double f,
                        double t) {
  if (f == t) {
    throw DomainError("sharp-event loss needs distinct timestamps");
  }
  require_same_shape(l_f.raster(), l_t.raster(), "sharp_event_loss");
  if (events.width() != l_f.width() || events.height() != l_f.height()) {
    throw DomainError("sharp_event_loss: event sensor does not match frame geometry");
  }
  const double lo = std::min(f, t);
  const double hi = std::max(f, t);
  std::vector<double> log_change;
  std::vector<double> counts;
  for (std::size_t y = 0; y < l_f.height(); ++y) {
    for (std::size_t x = 0; x < l_f.width(); ++x) {
      const auto ts = events.times(x, y);
      const auto first = std::upper_bound(ts.begin(), ts.end(), lo);
      if (first == ts.end() || *first > hi) continue;
      log_change.push_back(std::log(l_t(y, x)) - std::log(l_f(y, x)));
      counts.push_back(static_cast<double>(inner_integral(events, f, t, x, y)));
    }
  }
  if (log_change.empty()) return 0.0;
  normalize_masked(log_change);
  normalize_masked(counts);
  double acc = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) acc += std::abs(log_change[i] - counts[i]);
  return acc / static_cast<double>(counts.size());
}

double sharp_event_loss(const Frame& l_f, const Frame& l_t, const EventStream& events, double f,
                        double t) {
  return sharp_event_loss(l_f, l_t, PixelEventIndex(events), f, t);
}

GridLosses grid_losses(const InputPair& pair, std::size_t m_per_window, const ThresholdModel& c) {
  const auto grid = reconstruct_grid(pair, m_per_window, c);
  GridLosses out;
  out.l_bs = mean_abs_diff(grid.reblur_first, pair.first().frame) +
             mean_abs_diff(grid.reblur_second, pair.second().frame);
  double acc = 0.0;
  std::size_t pairs = 0;
  for (std::size_t k = 0; k + 1 < grid.times.size(); ++k) {
    if (grid.times[k] == grid.times[k + 1]) continue;
    acc += sharp_event_loss(grid.latents[k], grid.latents[k + 1], pair.index(), grid.times[k],
                            grid.times[k + 1]);
    ++pairs;
  }
  out.l_se = pairs > 0 ? acc / static_cast<double>(pairs) : 0.0;
  return out;
}

LossReport total_loss(const InputPair& pair, double f, const ThresholdModel& c,
                      const LossWeights& weights, std::size_t m_per_window) {
  LossReport report;
  report.l_be = blurry_event_loss(pair, f, c);
  const GridLosses grid = grid_losses(pair, m_per_window, c);
  report.l_bs = grid.l_bs;
  report.l_se = grid.l_se;
  report.total = weights.alpha * report.l_be + weights.beta * report.l_bs +
                 weights.gamma * report.l_se;
  return report;
}

std::string format_report(const LossReport& report) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "l_be=" << report.l_be << '\n'
      << "l_bs=" << report.l_bs << '\n'
      << "l_se=" << report.l_se << '\n'
      << "total=" << report.total << '\n';
  return out.str();
}

} // namespace evblur
