#include "evblur/event.hpp"

#include "evblur/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace evblur {

std::int8_t normalize_polarity(int raw) {
  switch (raw) {
    case 1: return 1;
    case 0:
    case -1: return -1;
    default:
      throw FormatError("invalid polarity " + std::to_string(raw) + " (expected 1, 0 or -1)");
  }
}

EventStream::EventStream(std::size_t width, std::size_t height, TimeSpan span,
                         std::vector<Event> events)
    : width_(width), height_(height), span_(span), events_(std::move(events)) {
  if (!std::isfinite(span_.begin) || !std::isfinite(span_.end) || span_.end < span_.begin) {
    std::ostringstream msg;
    msg << "invalid event stream span [" << span_.begin << ", " << span_.end << "]";
    throw DomainError(msg.str());
  }
  for (const Event& e : events_) {
    if (e.p != 1 && e.p != -1) {
      throw DomainError("event polarity must be +1 or -1, got " + std::to_string(e.p));
    }
    if (e.x >= width_ || e.y >= height_) {
      std::ostringstream msg;
      msg << "event at (" << e.x << ", " << e.y << ") outside " << width_ << "x" << height_
          << " sensor";
      throw DomainError(msg.str());
    }
    if (!std::isfinite(e.t) || !span_.contains(e.t)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "event time " << e.t << " outside stream span [" << span_.begin << ", " << span_.end
          << "]";
      throw DomainError(msg.str());
    }
  }
  if (!std::is_sorted(events_.begin(), events_.end(), event_less)) {
    std::sort(events_.begin(), events_.end(), event_less);
  }
}

namespace {

void require_in_span(const TimeSpan& span, double t, const char* name) {
  if (!std::isfinite(t) || !span.contains(t)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << name << " = " << t << " outside stream span [" << span.begin << ", " << span.end << "]";
    throw DomainError(msg.str());
  }
}

} // namespace

EventStream preprocess(const EventStream& stream, double f, double t_r) {
  require_in_span(stream.span(), f, "anchor f");
  require_in_span(stream.span(), t_r, "reference t_r");

  const auto events = stream.events();
  std::vector<Event> out;
  if (t_r >= f) {
    // Shift: (f, t_r] -> (0, t_r - f].
    auto first = std::upper_bound(events.begin(), events.end(), f,
                                  [](double t, const Event& e) { return t < e.t; });
    for (auto it = first; it != events.end() && it->t <= t_r; ++it) {
      out.push_back({it->t - f, it->x, it->y, it->p});
    }
    return EventStream(stream.width(), stream.height(), {0.0, t_r - f}, std::move(out));
  }
  // Shift, flip and polarity reversal: (t_r, f] -> [0, f - t_r).
  auto first = std::upper_bound(events.begin(), events.end(), t_r,
                                [](double t, const Event& e) { return t < e.t; });
  for (auto it = first; it != events.end() && it->t <= f; ++it) {
    out.push_back({f - it->t, it->x, it->y, static_cast<std::int8_t>(-it->p)});
  }
  return EventStream(stream.width(), stream.height(), {0.0, f - t_r}, std::move(out));
}

VoxelGrid::VoxelGrid(std::size_t bins, std::size_t height, std::size_t width, double span_duration)
    : bins_(bins), height_(height), width_(width), span_duration_(span_duration),
      counts_(2 * bins * height * width, 0) {}

std::uint64_t VoxelGrid::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

VoxelGrid voxelize(const EventStream& stream, std::size_t bins) {
  if (bins == 0) {
    throw DomainError("voxel grid needs at least one temporal bin");
  }
  const TimeSpan& span = stream.span();
  VoxelGrid grid(bins, stream.height(), stream.width(), span.duration());
  const bool instant = !(span.duration() > 0.0);
  const double scale = instant ? 0.0 : static_cast<double>(bins) / span.duration();
  for (const Event& e : stream.events()) {
    auto bin = static_cast<std::size_t>(std::floor((e.t - span.begin) * scale));
    bin = std::min(bin, bins - 1);
    const std::size_t channel = 2 * bin + (e.p > 0 ? 0 : 1);
    ++grid.at(channel, e.y, e.x);
  }
  return grid;
}

PixelEventIndex::PixelEventIndex(const EventStream& stream)
    : width_(stream.width()), height_(stream.height()), span_(stream.span()),
      offsets_(stream.width() * stream.height() + 1, 0) {
  const auto events = stream.events();
  for (const Event& e : events) {
    ++offsets_[static_cast<std::size_t>(e.y) * width_ + e.x + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());

  times_.resize(events.size());
  polarities_.resize(events.size());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  // Stream order is by time first, so each pixel's bucket stays time-sorted.
  for (const Event& e : events) {
    const std::size_t slot = fill[static_cast<std::size_t>(e.y) * width_ + e.x]++;
    times_[slot] = e.t;
    polarities_[slot] = e.p;
  }

  const std::size_t pixels = width_ * height_;
  cumulative_.resize(events.size() + pixels);
  for (std::size_t pix = 0; pix < pixels; ++pix) {
    std::int32_t running = 0;
    std::size_t out = offsets_[pix] + pix;
    cumulative_[out++] = 0;
    for (std::size_t k = offsets_[pix]; k < offsets_[pix + 1]; ++k) {
      running += polarities_[k];
      cumulative_[out++] = running;
    }
  }
}

std::span<const double> PixelEventIndex::times(std::size_t x, std::size_t y) const {
  const std::size_t pix = y * width_ + x;
  return {times_.data() + offsets_[pix], offsets_[pix + 1] - offsets_[pix]};
}

std::span<const std::int8_t> PixelEventIndex::polarities(std::size_t x, std::size_t y) const {
  const std::size_t pix = y * width_ + x;
  return {polarities_.data() + offsets_[pix], offsets_[pix + 1] - offsets_[pix]};
}

std::span<const std::int32_t> PixelEventIndex::cumulative(std::size_t x, std::size_t y) const {
  const std::size_t pix = y * width_ + x;
  return {cumulative_.data() + offsets_[pix] + pix, offsets_[pix + 1] - offsets_[pix] + 1};
}

std::int32_t PixelEventIndex::count_up_to(std::size_t x, std::size_t y, double t) const {
  const auto ts = times(x, y);
  const auto k = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
  return cumulative(x, y)[k];
}

} // namespace evblur
