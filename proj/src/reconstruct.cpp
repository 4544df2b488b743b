#include "evblur/reconstruct.hpp"

#include "evblur/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace evblur {

PairTimeline::PairTimeline(ExposureWindow first, ExposureWindow second)
    : first_(first), second_(second) {
  if (first_.end() > second_.start()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "first exposure ends at " << first_.end() << " after the second starts at "
        << second_.start();
    throw DomainError(msg.str());
  }
}

InputPair::InputPair(BlurryObservation first, BlurryObservation second, EventStream events)
    : first_(std::move(first)), second_(std::move(second)),
      events_(std::make_shared<const EventStream>(std::move(events))),
      index_(std::make_shared<const PixelEventIndex>(*events_)),
      timeline_(first_.window, second_.window) {
  require_same_shape(first_.frame.raster(), second_.frame.raster(), "blurry pair");
  if (events_->width() != width() || events_->height() != height()) {
    throw DomainError("event sensor " + std::to_string(events_->width()) + "x" +
                      std::to_string(events_->height()) + " does not match frames " +
                      std::to_string(width()) + "x" + std::to_string(height()));
  }
  const TimeSpan& span = events_->span();
  const double slack = 1e-12 * std::max({1.0, std::abs(span.begin), std::abs(span.end)});
  if (span.begin > timeline_.begin() + slack || span.end < timeline_.end() - slack) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "event span [" << span.begin << ", " << span.end << "] does not cover exposures ["
        << timeline_.begin() << ", " << timeline_.end() << "]";
    throw DomainError(msg.str());
  }
}

Frame latent_from_blur(const BlurryObservation& blurry, const DoubleIntegralMap& e_map) {
  require_same_shape(blurry.frame.raster(), e_map.values, "latent_from_blur");
  Raster latent(blurry.frame.height(), blurry.frame.width());
  for (std::size_t i = 0; i < latent.size(); ++i) {
    latent[i] = blurry.frame[i] / e_map.values[i];
  }
  return Frame(std::move(latent));
}

double weight_omega(double f, const PairTimeline& timeline) {
  if (!timeline.contains(f)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "timestamp " << f << " outside pair span [" << timeline.begin() << ", "
        << timeline.end() << "]";
    throw DomainError(msg.str());
  }
  if (timeline.first().contains(f)) return 1.0;
  if (timeline.second().contains(f)) return 0.0;
  return 1.0 - (f - timeline.begin()) / timeline.total_duration();
}

Frame reconstruct_latent(const InputPair& pair, double f, const ThresholdModel& c) {
  const double omega = weight_omega(f, pair.timeline());
  auto from = [&](const BlurryObservation& b) {
    return latent_from_blur(b, edi_map(pair.index(), f, b.window, c));
  };
  if (omega == 1.0) return from(pair.first());
  if (omega == 0.0) return from(pair.second());
  const Frame first = from(pair.first());
  const Frame second = from(pair.second());
  Raster blended(first.height(), first.width());
  for (std::size_t i = 0; i < blended.size(); ++i) {
    blended[i] = omega * first[i] + (1.0 - omega) * second[i];
  }
  return Frame(std::move(blended));
}

std::vector<Frame> reconstruct_video(const InputPair& pair, const std::vector<double>& timestamps,
                                     const ThresholdModel& c) {
  for (std::size_t k = 0; k < timestamps.size(); ++k) {
    if (!pair.timeline().contains(timestamps[k])) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "timestamp #" << k << " (" << timestamps[k] << ") outside pair span ["
          << pair.timeline().begin() << ", " << pair.timeline().end() << "]";
      throw DomainError(msg.str());
    }
  }
  std::vector<Frame> out;
  out.reserve(timestamps.size());
  for (double t : timestamps) {
    out.push_back(reconstruct_latent(pair, t, c));
  }
  return out;
}

Frame reblur(const std::vector<Frame>& latents) {
  if (latents.empty()) {
    throw DomainError("reblur needs at least one latent frame");
  }
  // Accumulated as offsets from the first latent so a constant stack is exact.
  const Raster& base = latents.front().raster();
  Raster offset(base.height(), base.width(), 0.0);
  for (const Frame& l : latents) {
    require_same_shape(offset, l.raster(), "reblur");
    for (std::size_t i = 0; i < offset.size(); ++i) offset[i] += l[i] - base[i];
  }
  const auto count = static_cast<double>(latents.size());
  for (std::size_t i = 0; i < offset.size(); ++i) offset[i] = base[i] + offset[i] / count;
  return Frame(std::move(offset));
}

std::vector<double> exposure_grid(const ExposureWindow& window, std::size_t count) {
  if (count == 0) {
    throw DomainError("exposure grid needs at least one timestamp");
  }
  if (count == 1) {
    return {window.start() + 0.5 * window.duration()};
  }
  std::vector<double> grid(count);
  const double steps = static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) {
    grid[k] = window.start() + window.duration() * (static_cast<double>(k) / steps);
  }
  grid.back() = window.end();
  return grid;
}

} // namespace evblur
