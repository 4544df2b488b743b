#include "evblur/sim.hpp"

#include "evblur/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace evblur {

SharpSequence::SharpSequence(std::vector<Frame> frames, double frame_interval, double start_time)
    : frames_(std::move(frames)), frame_interval_(frame_interval) {
  if (frames_.size() < 2) {
    throw DomainError("sharp sequence needs at least 2 frames, got " +
                      std::to_string(frames_.size()));
  }
  if (!std::isfinite(frame_interval) || !(frame_interval > 0.0)) {
    throw DomainError("frame interval must be positive");
  }
  for (const Frame& f : frames_) {
    require_same_shape(frames_.front().raster(), f.raster(), "sharp sequence");
  }
  timestamps_.resize(frames_.size());
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    timestamps_[i] = start_time + static_cast<double>(i) * frame_interval;
  }
}

SharpSequence::SharpSequence(std::vector<Frame> frames, std::vector<double> timestamps,
                             double frame_interval)
    : frames_(std::move(frames)), timestamps_(std::move(timestamps)),
      frame_interval_(frame_interval) {}

SharpSequence SharpSequence::slice(std::size_t first, std::size_t count) const {
  if (count < 2 || first + count > frames_.size()) {
    throw DomainError("invalid sequence slice [" + std::to_string(first) + ", " +
                      std::to_string(first + count) + ") of " + std::to_string(frames_.size()) +
                      " frames");
  }
  std::vector<Frame> frames(frames_.begin() + first, frames_.begin() + first + count);
  std::vector<double> timestamps(timestamps_.begin() + first, timestamps_.begin() + first + count);
  return SharpSequence(std::move(frames), std::move(timestamps), frame_interval_);
}

void SimConfig::validate() const {
  ThresholdModel{c};
  if (!(refractory >= 0.0) || !std::isfinite(refractory)) {
    throw DomainError("refractory period must be nonnegative");
  }
  if (!(noise_rate >= 0.0) || !std::isfinite(noise_rate)) {
    throw DomainError("noise rate must be nonnegative");
  }
}

namespace {

// Crossing tolerance in log units; a level reached to within this counts.
constexpr double kLevelTolerance = 1e-9;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void append_noise(std::vector<Event>& events, const SharpSequence& seq, const SimConfig& config) {
  if (config.noise_rate <= 0.0) return;
  std::mt19937_64 rng(config.seed);
  const TimeSpan span = seq.span();
  for (std::size_t y = 0; y < seq.height(); ++y) {
    for (std::size_t x = 0; x < seq.width(); ++x) {
      double t = span.begin;
      while (true) {
        t += -std::log1p(-uniform01(rng)) / config.noise_rate;
        if (t > span.end) break;
        const std::int8_t p = (rng() >> 63) != 0 ? 1 : -1;
        events.push_back({t, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), p});
      }
    }
  }
}

} // namespace

EventStream simulate_events(const SharpSequence& seq, const SimConfig& config) {
  config.validate();
  const double c = config.c;
  std::vector<Event> events;
  const std::size_t n = seq.size();
  std::vector<double> log_values(n);
  for (std::size_t y = 0; y < seq.height(); ++y) {
    for (std::size_t x = 0; x < seq.width(); ++x) {
      for (std::size_t m = 0; m < n; ++m) log_values[m] = std::log(seq.frame(m)(y, x));
      const double origin = log_values[0];
      long level_index = 0;  // reference = origin + level_index * c
      double last_event = -std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m + 1 < n; ++m) {
        const double from = log_values[m];
        const double to = log_values[m + 1];
        if (from == to) continue;
        const int pol = to > from ? 1 : -1;
        const double t_from = seq.timestamp(m);
        const double t_to = seq.timestamp(m + 1);
        while (true) {
          const double level = origin + static_cast<double>(level_index + pol) * c;
          const bool crossed =
              pol > 0 ? level <= to + kLevelTolerance : level >= to - kLevelTolerance;
          if (!crossed) break;
          level_index += pol;
          const double fraction = (level - from) / (to - from);
          double t = t_to;
          if (fraction < 1.0 - 1e-9) {
            t = t_from + std::max(fraction, 0.0) * (t_to - t_from);
            t = std::clamp(t, std::nextafter(t_from, t_to), t_to);
          }
          if (t - last_event >= config.refractory) {
            events.push_back({t, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                              static_cast<std::int8_t>(pol)});
            last_event = t;
          }
        }
      }
    }
  }
  append_noise(events, seq, config);
  return EventStream(seq.width(), seq.height(), seq.span(), std::move(events));
}

BlurryObservation synthesize_blur(const SharpSequence& seq, const ExposureWindow& window) {
  const double slack = 1e-12 * std::max({1.0, std::abs(window.start()), std::abs(window.end())});
  Raster sum(seq.height(), seq.width(), 0.0);
  std::size_t count = 0;
  for (std::size_t m = 0; m < seq.size(); ++m) {
    const double t = seq.timestamp(m);
    if (t < window.start() - slack || t > window.end() + slack) continue;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += seq.frame(m)[i];
    ++count;
  }
  if (count == 0) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "exposure window [" << window.start() << ", " << window.end()
        << "] captures no frames";
    throw DomainError(msg.str());
  }
  for (double& v : sum.values()) v /= static_cast<double>(count);
  return {Frame(std::move(sum)), window};
}

BlurryObservation blur_frames(const SharpSequence& seq, std::size_t first, std::size_t count) {
  if (count == 0 || first + count > seq.size()) {
    throw DomainError("cannot blur frames [" + std::to_string(first) + ", " +
                      std::to_string(first + count) + ") of " + std::to_string(seq.size()));
  }
  Raster sum(seq.height(), seq.width());
  for (std::size_t i = first; i < first + count; ++i) {
    const Raster& frame = seq.frame(i).raster();
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += frame[k];
  }
  for (std::size_t k = 0; k < sum.size(); ++k) sum[k] /= static_cast<double>(count);
  return {Frame(std::move(sum)),
          ExposureWindow(seq.timestamp(first), static_cast<double>(count) * seq.frame_interval())};
}

std::string_view protocol_name(Protocol protocol) {
  switch (protocol) {
    case Protocol::Deblur: return "deblur";
    case Protocol::Skip1: return "skip1";
    case Protocol::Skip3: return "skip3";
  }
  return "deblur";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "deblur") return Protocol::Deblur;
  if (name == "skip1") return Protocol::Skip1;
  if (name == "skip3") return Protocol::Skip3;
  throw DomainError("unknown protocol '" + std::string(name) + "' (deblur, skip1, skip3)");
}

ProtocolLayout protocol_layout(Protocol protocol) {
  switch (protocol) {
    case Protocol::Deblur:
      return {98, 98, 49, {0, 49}, {0, 8, 16, 24, 32, 40, 48, 49, 57, 65, 73, 81, 89, 97}};
    case Protocol::Skip1:
      return {97, 48, 41, {0, 56}, {48}};
    case Protocol::Skip3:
      return {97, 48, 33, {0, 64}, {40, 48, 56}};
  }
  throw DomainError("unknown protocol");
}

InputPair DatasetRecord::pair() const {
  if (!has_pair()) {
    throw DomainError("record at frame " + std::to_string(first_frame) +
                      " holds a single exposure, not a pair");
  }
  return InputPair(blurs[0], blurs[1], events);
}

namespace {

DatasetRecord make_record(const SharpSequence& seq, Protocol protocol, std::size_t first,
                          std::size_t length, std::size_t blur_length,
                          const std::vector<std::size_t>& blur_starts,
                          const std::vector<std::size_t>& gt_offsets, const SimConfig& config) {
  const SharpSequence part = seq.slice(first, length);
  // Each frame is held for one interval, so the stream runs one interval past
  // the last frame to cover the final exposure.
  const EventStream simulated = simulate_events(part, config);
  const TimeSpan span{simulated.span().begin, simulated.span().end + seq.frame_interval()};
  DatasetRecord record{protocol, first, {},
                       EventStream(simulated.width(), simulated.height(), span,
                                   {simulated.events().begin(), simulated.events().end()}),
                       {}, seq.frame_interval()};
  for (std::size_t start : blur_starts) {
    record.blurs.push_back(blur_frames(part, start, blur_length));
  }
  for (std::size_t offset : gt_offsets) {
    record.ground_truth.push_back({part.timestamp(offset), first + offset, part.frame(offset)});
  }
  return record;
}

} // namespace

std::vector<DatasetRecord> make_dataset(const SharpSequence& seq, Protocol protocol,
                                        const SimConfig& config) {
  config.validate();
  const ProtocolLayout layout = protocol_layout(protocol);
  std::vector<DatasetRecord> records;

  if (protocol == Protocol::Deblur) {
    const std::size_t blur_count = seq.size() / layout.blur_length;
    if (blur_count == 0) {
      throw DomainError("deblur protocol needs " + std::to_string(layout.blur_length) +
                        " frames, got " + std::to_string(seq.size()) + " (short by " +
                        std::to_string(layout.blur_length - seq.size()) + ")");
    }
    const std::vector<std::size_t> single_gt(layout.gt_offsets.begin(),
                                             layout.gt_offsets.begin() + 7);
    for (std::size_t k = 0; k < blur_count; k += 2) {
      const std::size_t first = k * layout.blur_length;
      if (k + 1 < blur_count) {
        records.push_back(make_record(seq, protocol, first, layout.set_length, layout.blur_length,
                                      layout.blur_starts, layout.gt_offsets, config));
      } else {
        records.push_back(make_record(seq, protocol, first, layout.blur_length,
                                      layout.blur_length, {0}, single_gt, config));
      }
    }
    return records;
  }

  if (seq.size() < layout.set_length) {
    throw DomainError(std::string(protocol_name(protocol)) + " protocol needs " +
                      std::to_string(layout.set_length) + " frames, got " +
                      std::to_string(seq.size()) + " (short by " +
                      std::to_string(layout.set_length - seq.size()) + ")");
  }
  for (std::size_t first = 0; first + layout.set_length <= seq.size();
       first += layout.set_stride) {
    records.push_back(make_record(seq, protocol, first, layout.set_length, layout.blur_length,
                                  layout.blur_starts, layout.gt_offsets, config));
  }
  return records;
}

SharpSequence bundled_sequence(const BundledSequenceConfig& config) {
  const std::size_t n = config.size;
  const double side = static_cast<double>(n);
  const double radius = 0.2 * side;
  std::vector<Frame> frames;
  frames.reserve(config.frames);
  for (std::size_t i = 0; i < config.frames; ++i) {
    const double phase = static_cast<double>(i) / static_cast<double>(config.frames);
    const double cx = 0.5 * side + 0.22 * side * std::sin(2.0 * std::numbers::pi * phase);
    const double cy = 0.5 * side + 0.125 * side * std::sin(4.0 * std::numbers::pi * phase + 0.6);
    Raster image(n, n);
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t x = 0; x < n; ++x) {
        const double background = 0.16 + 0.10 * static_cast<double>(x) / (side - 1.0) +
                                  0.06 * static_cast<double>(y) / (side - 1.0);
        const double r = std::hypot(static_cast<double>(x) - cx, static_cast<double>(y) - cy);
        double ring = 0.0;
        if (r < radius) {
          ring = std::ceil(static_cast<double>(config.rings) * (1.0 - r / radius));
        }
        image(y, x) = background * std::exp(ring * config.contrast_step);
      }
    }
    frames.emplace_back(std::move(image));
  }
  return SharpSequence(std::move(frames), config.frame_interval);
}

} // namespace evblur
