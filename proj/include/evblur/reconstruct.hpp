#pragma once

#include "evblur/event.hpp"
#include "evblur/integral.hpp"
#include "evblur/raster.hpp"

#include <memory>
#include <vector>

namespace evblur {

struct BlurryObservation {
  Frame frame;
  ExposureWindow window;
};

/// Two exposure windows in time order; the first ends no later than the
/// second starts.
class PairTimeline {
public:
  PairTimeline(ExposureWindow first, ExposureWindow second);

  const ExposureWindow& first() const { return first_; }
  const ExposureWindow& second() const { return second_; }
  double begin() const { return first_.start(); }
  double end() const { return second_.end(); }
  double total_duration() const { return end() - begin(); }
  bool contains(double t) const { return t >= begin() && t <= end(); }

private:
  ExposureWindow first_;
  ExposureWindow second_;
};

/// Two blurry observations plus the events spanning both exposures.
class InputPair {
public:
  InputPair(BlurryObservation first, BlurryObservation second, EventStream events);

  const BlurryObservation& first() const { return first_; }
  const BlurryObservation& second() const { return second_; }
  const EventStream& events() const { return *events_; }
  const PixelEventIndex& index() const { return *index_; }
  const PairTimeline& timeline() const { return timeline_; }
  std::size_t height() const { return first_.frame.height(); }
  std::size_t width() const { return first_.frame.width(); }

private:
  BlurryObservation first_;
  BlurryObservation second_;
  std::shared_ptr<const EventStream> events_;
  std::shared_ptr<const PixelEventIndex> index_;
  PairTimeline timeline_;
};

/// L = B / E, floored at kIntensityFloor.
Frame latent_from_blur(const BlurryObservation& blurry, const DoubleIntegralMap& e_map);

/// Blend weight for the first observation: 1 inside the first exposure, 0
/// inside the second, 1 - (f - t_begin) / total in the gap.
double weight_omega(double f, const PairTimeline& timeline);

/// omega(f) * L_i(f) + (1 - omega(f)) * L_{i+1}(f).
Frame reconstruct_latent(const InputPair& pair, double f, const ThresholdModel& c);

/// reconstruct_latent at each timestamp, in input order. An invalid timestamp
/// fails the whole call, naming its index.
std::vector<Frame> reconstruct_video(const InputPair& pair, const std::vector<double>& timestamps,
                                     const ThresholdModel& c);

/// Per-pixel mean of the latents.
Frame reblur(const std::vector<Frame>& latents);

/// `count` uniformly spaced timestamps covering the window, endpoints
/// included; the midpoint when count == 1.
std::vector<double> exposure_grid(const ExposureWindow& window, std::size_t count);

} // namespace evblur
