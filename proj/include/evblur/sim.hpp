#pragma once

#include "evblur/event.hpp"
#include "evblur/integral.hpp"
#include "evblur/raster.hpp"
#include "evblur/reconstruct.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evblur {

/// Sharp frames sampled at uniform timestamps.
class SharpSequence {
public:
  SharpSequence(std::vector<Frame> frames, double frame_interval, double start_time = 0.0);

  std::size_t size() const { return frames_.size(); }
  std::size_t height() const { return frames_.front().height(); }
  std::size_t width() const { return frames_.front().width(); }
  double frame_interval() const { return frame_interval_; }
  const Frame& frame(std::size_t i) const { return frames_[i]; }
  double timestamp(std::size_t i) const { return timestamps_[i]; }
  const std::vector<double>& timestamps() const { return timestamps_; }
  TimeSpan span() const { return {timestamps_.front(), timestamps_.back()}; }

  /// Frames [first, first + count) with their original timestamps.
  SharpSequence slice(std::size_t first, std::size_t count) const;

private:
  SharpSequence(std::vector<Frame> frames, std::vector<double> timestamps, double frame_interval);

  std::vector<Frame> frames_;
  std::vector<double> timestamps_;
  double frame_interval_;
};

struct SimConfig {
  double c = 0.2;
  double refractory = 0.0;  // seconds
  double noise_rate = 0.0;  // spurious events per pixel per second
  std::uint64_t seed = 0;

  void validate() const;
};

/// Ideal event camera driven by log-linear interpolation between frames.
///
/// Each pixel's reference starts at the first frame's log intensity. When the
/// interpolated log intensity reaches reference +/- c an event of that sign is
/// emitted at the interpolated crossing time and the reference moves to the
/// crossed level. Events inside the refractory period after the pixel's last
/// event are dropped (the reference still moves). Uniform-polarity Poisson
/// noise is merged in from `seed`. The stream spans the sequence.
EventStream simulate_events(const SharpSequence& seq, const SimConfig& config);

/// Mean of the frames whose timestamps fall in the window.
BlurryObservation synthesize_blur(const SharpSequence& seq, const ExposureWindow& window);

/// Mean of `count` consecutive frames. Each frame is held for one frame
/// interval, so the window is [t_first, t_first + count * interval].
BlurryObservation blur_frames(const SharpSequence& seq, std::size_t first, std::size_t count);

enum class Protocol { Deblur, Skip1, Skip3 };

std::string_view protocol_name(Protocol protocol);
Protocol parse_protocol(std::string_view name);

/// Frame layout of one evaluation protocol, relative to the start of a set.
struct ProtocolLayout {
  std::size_t set_length;               // frames per evaluation set
  std::size_t set_stride;               // offset between consecutive sets
  std::size_t blur_length;              // frames averaged per blurry frame
  std::vector<std::size_t> blur_starts; // per blurry frame
  std::vector<std::size_t> gt_offsets;  // held-out ground-truth frames
};
ProtocolLayout protocol_layout(Protocol protocol);

struct GroundTruth {
  double timestamp;
  std::size_t frame_index;  // in the source sequence
  Frame frame;
};

struct DatasetRecord {
  Protocol protocol;
  std::size_t first_frame;  // in the source sequence
  std::vector<BlurryObservation> blurs;  // one or two, time ordered
  EventStream events;
  std::vector<GroundTruth> ground_truth;
  double frame_interval = 0.0;  // of the source frames; 0 when unknown

  bool has_pair() const { return blurs.size() == 2; }
  InputPair pair() const;
};

/// Slices `seq` into evaluation records.
///
/// deblur: consecutive 49-frame blurs, 7 ground-truth frames each (offsets
///         0, 8, ..., 48); blurs are paired two by two, a trailing odd blur
///         forms a single-exposure record.
/// skip1:  97-frame sets every 48 frames, 41-frame blurs at both ends, the
///         middle frame held out.
/// skip3:  97-frame sets every 48 frames, 33-frame blurs, the three middle
///         original frames held out.
/// Each record carries one event stream simulated over its frames.
std::vector<DatasetRecord> make_dataset(const SharpSequence& seq, Protocol protocol,
                                        const SimConfig& config);

/// Parameters of the procedural test sequence shipped with the tools.
struct BundledSequenceConfig {
  std::size_t size = 64;
  std::size_t frames = 200;
  double frame_interval = 1.0 / 1024.0;
  double contrast_step = 0.2;  // log-intensity step between disc rings
  std::size_t rings = 5;
};

/// A stepped radial-gradient disc over a smooth static background, moving on a
/// sinusoidal (non-linear) trajectory. Each ring multiplies the background by
/// exp(contrast_step), so every pixel takes values bg * exp(k * step).
SharpSequence bundled_sequence(const BundledSequenceConfig& config = {});

} // namespace evblur
