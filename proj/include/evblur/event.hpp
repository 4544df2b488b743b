#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace evblur {

/// Closed time interval [begin, end] in seconds.
struct TimeSpan {
  double begin = 0.0;
  double end = 0.0;

  double duration() const { return end - begin; }
  bool contains(double t) const { return t >= begin && t <= end; }
  bool operator==(const TimeSpan&) const = default;
};

struct Event {
  double t = 0.0;       // seconds
  std::uint16_t x = 0;  // column
  std::uint16_t y = 0;  // row
  std::int8_t p = 1;    // +1 or -1

  bool operator==(const Event&) const = default;
};

/// Total order used everywhere events are sorted: (t, y, x, p).
inline bool event_less(const Event& a, const Event& b) {
  if (a.t != b.t) return a.t < b.t;
  if (a.y != b.y) return a.y < b.y;
  if (a.x != b.x) return a.x < b.x;
  return a.p < b.p;
}

/// Maps sensor polarity codes onto {+1, -1}. Accepts 1, -1 and 0 (as -1).
std::int8_t normalize_polarity(int raw);

/// Time-ordered polarity impulses from a width x height sensor.
///
/// The constructor validates every event against the geometry and span and
/// sorts by event_less. Instances are immutable afterwards.
class EventStream {
public:
  EventStream() = default;
  EventStream(std::size_t width, std::size_t height, TimeSpan span, std::vector<Event> events);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  const TimeSpan& span() const { return span_; }
  std::span<const Event> events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  bool operator==(const EventStream&) const = default;

private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  TimeSpan span_{};
  std::vector<Event> events_;
};

/// Re-anchors the sub-stream between f and t_r at time zero.
///
/// t_r >= f: events with t in (f, t_r], shifted to t - f, polarity kept.
/// t_r <  f: events with t in (t_r, f], mapped to f - t, polarity negated.
/// The result spans [0, |t_r - f|]. Throws DomainError when f or t_r lies
/// outside the stream span.
EventStream preprocess(const EventStream& stream, double f, double t_r);

/// 2N x H x W event counts; channel 2k positive, 2k+1 negative polarity of bin k.
class VoxelGrid {
public:
  VoxelGrid(std::size_t bins, std::size_t height, std::size_t width, double span_duration);

  std::size_t bins() const { return bins_; }
  std::size_t channels() const { return 2 * bins_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  double span_duration() const { return span_duration_; }

  std::uint32_t at(std::size_t channel, std::size_t y, std::size_t x) const {
    return counts_[(channel * height_ + y) * width_ + x];
  }
  std::uint32_t& at(std::size_t channel, std::size_t y, std::size_t x) {
    return counts_[(channel * height_ + y) * width_ + x];
  }
  std::span<const std::uint32_t> counts() const { return counts_; }
  std::uint64_t total() const;

private:
  std::size_t bins_;
  std::size_t height_;
  std::size_t width_;
  double span_duration_;
  std::vector<std::uint32_t> counts_;
};

inline constexpr std::size_t kDefaultVoxelBins = 16;

/// Accumulates events into `bins` equal temporal bins over the stream span.
/// Events at the span end fall in the last bin; a zero-length span uses bin 0.
VoxelGrid voxelize(const EventStream& stream, std::size_t bins = kDefaultVoxelBins);

/// Per-pixel view of a stream with running polarity sums, built once and
/// queried by the integral routines.
class PixelEventIndex {
public:
  explicit PixelEventIndex(const EventStream& stream);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  const TimeSpan& span() const { return span_; }

  /// Event times at pixel (x, y), ascending.
  std::span<const double> times(std::size_t x, std::size_t y) const;
  std::span<const std::int8_t> polarities(std::size_t x, std::size_t y) const;
  /// cumulative(x, y)[k] is the polarity sum of the first k events; size n + 1.
  std::span<const std::int32_t> cumulative(std::size_t x, std::size_t y) const;

  /// Polarity sum of events at (x, y) with time <= t.
  std::int32_t count_up_to(std::size_t x, std::size_t y, double t) const;

private:
  std::size_t width_;
  std::size_t height_;
  TimeSpan span_;
  std::vector<std::size_t> offsets_;
  std::vector<double> times_;
  std::vector<std::int8_t> polarities_;
  std::vector<std::int32_t> cumulative_;
};

} // namespace evblur
