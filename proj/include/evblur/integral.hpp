#pragma once

#include "evblur/event.hpp"
#include "evblur/raster.hpp"

#include <cstdint>
#include <utility>

namespace evblur {

/// Exposure interval [start, start + duration], duration > 0.
class ExposureWindow {
public:
  ExposureWindow(double start, double duration);

  double start() const { return start_; }
  double duration() const { return duration_; }
  double end() const { return start_ + duration_; }
  bool contains(double t) const { return t >= start_ && t <= end(); }

  bool operator==(const ExposureWindow&) const = default;

private:
  double start_;
  double duration_;
};

/// Log-intensity contrast threshold c > 0, shared by both polarities.
class ThresholdModel {
public:
  explicit ThresholdModel(double c);
  double c() const { return c_; }

private:
  double c_;
};

/// Per-pixel E(f, T): the ratio between a blurry frame and the latent image at f.
struct DoubleIntegralMap {
  Raster values;
  double f = 0.0;
  ExposureWindow window;
};

/// Signed event count at (x, y) between f and t: sum over (f, t] for t > f,
/// minus the sum over (t, f] for t < f, zero when t == f.
std::int32_t inner_integral(const EventStream& stream, double f, double t, std::size_t x,
                            std::size_t y);
std::int32_t inner_integral(const PixelEventIndex& index, double f, double t, std::size_t x,
                            std::size_t y);

/// Exact (1/T) * integral over the window of exp(c * inner_integral(f, t)) dt.
/// The integrand is piecewise constant between events, so the integral is a
/// finite sum. f may lie inside, before, or after the window.
DoubleIntegralMap edi_map(const EventStream& stream, double f, const ExposureWindow& window,
                          const ThresholdModel& c);
DoubleIntegralMap edi_map(const PixelEventIndex& index, double f, const ExposureWindow& window,
                          const ThresholdModel& c);

/// Canonical double integral (1/D) * int_0^D exp(c * K(u)) du of a stream
/// already re-anchored at zero, where K(u) sums polarities of events with
/// time <= u and D is the stream span's end. D == 0 yields all ones.
Raster canonical_integral(const EventStream& anchored, const ThresholdModel& c);

/// G(E_[f, t_r]): preprocess(stream, f, t_r) followed by canonical_integral.
Raster g_general(const EventStream& stream, double f, double t_r, const ThresholdModel& c);

struct DecompositionWeights {
  double w1;  // weight of G over [f, start]
  double w2;  // weight of G over [f, end]
};

/// w1 = (f - t_s) / T, w2 = (t_s + T - f) / T. Either may be negative when f
/// lies outside the window.
DecompositionWeights decompose_weights(double f, const ExposureWindow& window);

/// w1 * G(f, t_s) + w2 * G(f, t_s + T); agrees with edi_map.
DoubleIntegralMap edi_via_decomposition(const EventStream& stream, double f,
                                        const ExposureWindow& window, const ThresholdModel& c);

} // namespace evblur
