#include "evblur/integral.hpp"

#include "evblur/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace evblur {
namespace {

// Slack for comparing derived window endpoints against stream spans.
bool within(const TimeSpan& span, double t) {
  const double slack = 1e-12 * std::max({1.0, std::abs(span.begin), std::abs(span.end)});
  return std::isfinite(t) && t >= span.begin - slack && t <= span.end + slack;
}

void require_time(const TimeSpan& span, double t, const char* name) {
  if (!within(span, t)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << name << " = " << t << " outside event span [" << span.begin << ", " << span.end << "]";
    throw DomainError(msg.str());
  }
}

void require_window(const TimeSpan& span, const ExposureWindow& window) {
  if (!within(span, window.start()) || !within(span, window.end())) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "exposure window [" << window.start() << ", " << window.end()
        << "] not covered by event span [" << span.begin << ", " << span.end << "]";
    throw DomainError(msg.str());
  }
}

std::size_t upper_index(std::span<const double> ts, double t) {
  return static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
}

// (1/(b - a)) * int_a^b exp(c * (N(t) - base)) dt for one pixel, where N is the
// right-continuous running polarity sum. A pixel whose level stays at zero is
// exactly 1.
double piecewise_mean(std::span<const double> ts, std::span<const std::int8_t> ps,
                      std::span<const std::int32_t> cumulative, double a, double b,
                      std::int32_t base, double c) {
  std::size_t i = upper_index(ts, a);
  std::int32_t level = cumulative[i] - base;
  bool flat = level == 0;
  double prev = a;
  double acc = 0.0;
  for (; i < ts.size() && ts[i] < b; ++i) {
    acc += (ts[i] - prev) * std::exp(c * level);
    prev = ts[i];
    level += ps[i];
    flat = flat && level == 0;
  }
  if (flat) return 1.0;
  acc += (b - prev) * std::exp(c * level);
  return acc / (b - a);
}

struct AnchoredMean {
  long double value = 1.0L;
  bool flat = true;  // no event between f and t_r
};

// G(f, t_r) for one pixel in long double: the events between f and t_r
// re-anchored at zero (shifted, or flipped with negated polarity when t_r < f)
// and integrated exactly.
AnchoredMean anchored_mean(std::span<const double> ts, std::span<const std::int8_t> ps, double f,
                           double t_r, double c) {
  AnchoredMean out;
  if (t_r == f) return out;
  const long double length = std::abs(static_cast<long double>(t_r) - f);
  long double acc = 0.0L;
  long double prev = 0.0L;
  std::int32_t level = 0;
  auto step = [&](long double u, std::int32_t q) {
    out.flat = false;
    if (u > prev) {
      acc += (u - prev) * std::exp(static_cast<long double>(c) * level);
      prev = u;
    }
    level += q;
  };
  if (t_r > f) {
    for (std::size_t i = upper_index(ts, f); i < ts.size() && ts[i] <= t_r; ++i) {
      step(static_cast<long double>(ts[i]) - f, ps[i]);
    }
  } else {
    const std::size_t lo = upper_index(ts, t_r);
    for (std::size_t i = upper_index(ts, f); i > lo; --i) {
      step(static_cast<long double>(f) - ts[i - 1], -ps[i - 1]);
    }
  }
  if (out.flat) return out;
  acc += (length - prev) * std::exp(static_cast<long double>(c) * level);
  out.value = acc / length;
  return out;
}

} // namespace

ExposureWindow::ExposureWindow(double start, double duration) : start_(start), duration_(duration) {
  if (!std::isfinite(start) || !std::isfinite(duration) || !(duration > 0.0)) {
    std::ostringstream msg;
    msg << "exposure window needs a positive finite duration (start " << start << ", duration "
        << duration << ")";
    throw DomainError(msg.str());
  }
}

ThresholdModel::ThresholdModel(double c) : c_(c) {
  if (!std::isfinite(c) || !(c > 0.0)) {
    std::ostringstream msg;
    msg << "contrast threshold must be positive, got " << c;
    throw DomainError(msg.str());
  }
}

std::int32_t inner_integral(const PixelEventIndex& index, double f, double t, std::size_t x,
                            std::size_t y) {
  if (t == f) return 0;
  return index.count_up_to(x, y, t) - index.count_up_to(x, y, f);
}

std::int32_t inner_integral(const EventStream& stream, double f, double t, std::size_t x,
                            std::size_t y) {
  if (t == f) return 0;
  const double lo = std::min(f, t);
  const double hi = std::max(f, t);
  std::int32_t sum = 0;
  for (const Event& e : stream.events()) {
    if (e.t > hi) break;
    if (e.t > lo && e.x == x && e.y == y) sum += e.p;
  }
  return t > f ? sum : -sum;
}

DoubleIntegralMap edi_map(const PixelEventIndex& index, double f, const ExposureWindow& window,
                          const ThresholdModel& threshold) {
  require_time(index.span(), f, "anchor f");
  require_window(index.span(), window);
  const double a = window.start();
  const double b = window.end();
  const double c = threshold.c();
  Raster values(index.height(), index.width(), 1.0);
  for (std::size_t y = 0; y < index.height(); ++y) {
    for (std::size_t x = 0; x < index.width(); ++x) {
      const auto ts = index.times(x, y);
      if (ts.empty()) continue;
      const auto cumulative = index.cumulative(x, y);
      const std::int32_t base = cumulative[upper_index(ts, f)];
      values(y, x) = piecewise_mean(ts, index.polarities(x, y), cumulative, a, b, base, c);
    }
  }
  return {std::move(values), f, window};
}

DoubleIntegralMap edi_map(const EventStream& stream, double f, const ExposureWindow& window,
                          const ThresholdModel& c) {
  return edi_map(PixelEventIndex(stream), f, window, c);
}

Raster canonical_integral(const EventStream& anchored, const ThresholdModel& threshold) {
  Raster values(anchored.height(), anchored.width(), 1.0);
  const double length = anchored.span().end;
  if (!(length > 0.0) || anchored.empty()) {
    return values;
  }
  const PixelEventIndex index(anchored);
  for (std::size_t y = 0; y < index.height(); ++y) {
    for (std::size_t x = 0; x < index.width(); ++x) {
      const auto ts = index.times(x, y);
      if (ts.empty()) continue;
      // Events at u = 0 (reversed anchor events) already count at the start.
      values(y, x) =
          piecewise_mean(ts, index.polarities(x, y), index.cumulative(x, y), 0.0, length, 0,
                         threshold.c());
    }
  }
  return values;
}

Raster g_general(const EventStream& stream, double f, double t_r, const ThresholdModel& c) {
  return canonical_integral(preprocess(stream, f, t_r), c);
}

DecompositionWeights decompose_weights(double f, const ExposureWindow& window) {
  const double T = window.duration();
  return {(f - window.start()) / T, (window.end() - f) / T};
}

DoubleIntegralMap edi_via_decomposition(const EventStream& stream, double f,
                                        const ExposureWindow& window, const ThresholdModel& c) {
  require_time(stream.span(), f, "anchor f");
  require_window(stream.span(), window);
  const double t_s = std::clamp(window.start(), stream.span().begin, stream.span().end);
  const double t_e = std::clamp(window.end(), stream.span().begin, stream.span().end);
  const long double T = window.duration();
  const long double w1 = (static_cast<long double>(f) - window.start()) / T;
  const long double w2 = (static_cast<long double>(window.end()) - f) / T;
  const PixelEventIndex index(stream);
  Raster values(stream.height(), stream.width(), 1.0);
  // The two G terms are accumulated in long double: their weighted sum cancels
  // when f lies outside the window.
  for (std::size_t y = 0; y < stream.height(); ++y) {
    for (std::size_t x = 0; x < stream.width(); ++x) {
      const auto ts = index.times(x, y);
      if (ts.empty()) continue;
      const auto ps = index.polarities(x, y);
      const AnchoredMean g_start = anchored_mean(ts, ps, f, t_s, c.c());
      const AnchoredMean g_end = anchored_mean(ts, ps, f, t_e, c.c());
      if (g_start.flat && g_end.flat) continue;
      values(y, x) = static_cast<double>(w1 * g_start.value + w2 * g_end.value);
    }
  }
  return {std::move(values), f, window};
}

} // namespace evblur
