#include "evblur/error.hpp"
#include "evblur/sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace evblur;

namespace {

// Frames whose log intensity at pixel i follows logs[i][frame].
SharpSequence log_video(const std::vector<std::vector<double>>& logs, double dt = 0.1) {
  std::vector<Frame> frames;
  for (std::size_t k = 0; k < logs.front().size(); ++k) {
    Raster r(1, logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) r[i] = std::exp(logs[i][k]);
    frames.emplace_back(std::move(r));
  }
  return SharpSequence(std::move(frames), dt);
}

std::vector<double> ramp(double from, double to, std::size_t frames) {
  std::vector<double> out;
  for (std::size_t k = 0; k < frames; ++k) {
    out.push_back(from + (to - from) * static_cast<double>(k) / static_cast<double>(frames - 1));
  }
  return out;
}

// Crossing-count oracle for a piecewise-linear log trajectory.
int crossings(const std::vector<double>& logs, double c) {
  double ref = logs.front();
  int n = 0;
  for (std::size_t k = 1; k < logs.size(); ++k) {
    const double v = logs[k] + 1e-12 * (logs[k] > logs[k - 1] ? 1 : -1);
    while (v >= ref + c) { ref += c; ++n; }
    while (v <= ref - c) { ref -= c; ++n; }
  }
  return n;
}

std::size_t events_at(const EventStream& s, std::size_t x) {
  std::size_t n = 0;
  for (const auto& e : s.events()) n += e.x == x;
  return n;
}

SharpSequence constant_video(std::size_t frames, double value = 0.4) {
  return SharpSequence(std::vector<Frame>(frames, Frame(3, 3, value)), 0.1);
}

} // namespace

TEST(SharpSequenceTest, TimestampsAndValidation) {
  const SharpSequence seq = constant_video(5);
  EXPECT_DOUBLE_EQ(seq.timestamp(3), 0.30000000000000004);
  EXPECT_EQ(seq.span(), (TimeSpan{0.0, seq.timestamp(4)}));
  const SharpSequence part = seq.slice(2, 2);
  EXPECT_EQ(part.timestamp(0), seq.timestamp(2));
  EXPECT_THROW(constant_video(1), DomainError);
  EXPECT_THROW(SharpSequence({Frame(2, 2, 0.1), Frame(3, 2, 0.1)}, 0.1), DomainError);
  EXPECT_THROW(SharpSequence({Frame(2, 2, 0.1), Frame(2, 2, 0.1)}, 0.0), DomainError);
}

TEST(Simulate, ConstantVideoEmitsNothing) {
  EXPECT_TRUE(simulate_events(constant_video(10), SimConfig{}).empty());
}

TEST(Simulate, SingleThresholdStepEmitsOneEventAtFrameTime) {
  const double c = 0.2;
  const auto seq = log_video({{std::log(0.3), std::log(0.3) + c}});
  SimConfig config;
  config.c = c;
  const EventStream s = simulate_events(seq, config);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.events()[0].p, 1);
  EXPECT_EQ(s.events()[0].t, seq.timestamp(1));
}

TEST(Simulate, CrossingTimesAreInterpolated) {
  const double c = 0.25;
  const auto seq = log_video({{-1.0, -1.0 - 2 * c}}, 1.0);
  SimConfig config;
  config.c = c;
  const EventStream s = simulate_events(seq, config);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(s.events()[0].t, 0.5, 1e-12);
  EXPECT_EQ(s.events()[1].t, 1.0);
  EXPECT_EQ(s.events()[0].p, -1);
}

TEST(SimulateProperty, RampCrossingCountsAreExact) {
  for (int k : {1, 3, 10}) {
    for (double c : {0.1, 0.2, 0.37}) {
      std::vector<std::vector<double>> logs;
      for (double base : {std::log(0.05), std::log(0.2), std::log(0.5)}) {
        logs.push_back(ramp(base, base + k * c, 17));
        logs.push_back(ramp(base + k * c, base, 17));
      }
      SimConfig config;
      config.c = c;
      const EventStream s = simulate_events(log_video(logs), config);
      for (std::size_t i = 0; i < logs.size(); ++i) {
        EXPECT_EQ(events_at(s, i), static_cast<std::size_t>(k)) << "k=" << k << " c=" << c;
      }
    }
  }
}

TEST(SimulateProperty, RandomTrajectoriesMatchCrossingOracle) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> step(0.0, 0.3);
  const double c = 0.15;
  std::vector<std::vector<double>> logs(8);
  for (auto& l : logs) {
    l.push_back(-1.5);
    for (int k = 0; k < 40; ++k) l.push_back(std::clamp(l.back() + step(rng), -5.0, 0.0));
  }
  SimConfig config;
  config.c = c;
  const EventStream s = simulate_events(log_video(logs), config);
  for (std::size_t i = 0; i < logs.size(); ++i) {
    EXPECT_EQ(events_at(s, i), static_cast<std::size_t>(crossings(logs[i], c))) << i;
  }
}

TEST(Simulate, RefractoryDropsEventsButReferenceMoves) {
  const double c = 0.1;
  const auto seq = log_video({{-2.0, -2.0 + 10 * c}}, 1.0);
  SimConfig config;
  config.c = c;
  config.refractory = 0.15;
  const EventStream s = simulate_events(seq, config);
  ASSERT_EQ(s.size(), 5u);
  EXPECT_NEAR(s.events()[1].t, 0.3, 1e-12);
  EXPECT_NEAR(s.events()[4].t, 0.9, 1e-12);
}

TEST(Simulate, NoiseIsSeededAndRoughlyPoisson) {
  SimConfig config;
  config.noise_rate = 50.0;
  config.seed = 9;
  const SharpSequence seq(std::vector<Frame>(11, Frame(10, 10, 0.4)), 0.1);
  const EventStream a = simulate_events(seq, config);
  const EventStream b = simulate_events(seq, config);
  EXPECT_EQ(a, b);
  config.seed = 10;
  EXPECT_NE(simulate_events(seq, config), a);
  const double expected = 50.0 * 100 * 1.0;
  EXPECT_NEAR(static_cast<double>(a.size()), expected, 5 * std::sqrt(expected));
}

TEST(SimConfigTest, Validation) {
  SimConfig config;
  config.refractory = -1.0;
  EXPECT_THROW(config.validate(), DomainError);
  config = {};
  config.noise_rate = -1.0;
  EXPECT_THROW(config.validate(), DomainError);
  config = {};
  config.c = 0.0;
  EXPECT_THROW(config.validate(), DomainError);
}

TEST(SynthesizeBlur, SingleFrameAndStaticWindows) {
  const auto seq = log_video({ramp(-2.0, -1.0, 5)});
  const auto one = synthesize_blur(seq, ExposureWindow(seq.timestamp(2) - 0.01, 0.02));
  EXPECT_EQ(one.frame, seq.frame(2));
  const auto still = synthesize_blur(constant_video(6), ExposureWindow(0.1, 0.3));
  EXPECT_EQ(still.frame, Frame(3, 3, 0.4));
  EXPECT_THROW(synthesize_blur(seq, ExposureWindow(0.01, 0.02)), DomainError);
}

TEST(SynthesizeBlur, MeanOfCapturedFrames) {
  const auto seq = log_video({ramp(-2.0, -1.0, 60)}, 1.0 / 64.0);
  const auto b = synthesize_blur(seq, ExposureWindow(seq.timestamp(3), 48.0 / 64.0));
  double sum = 0.0;
  for (std::size_t k = 3; k < 52; ++k) sum += seq.frame(k)[0];
  EXPECT_NEAR(b.frame[0], sum / 49.0, 1e-15);
}

TEST(BlurFrames, HeldExposureWindow) {
  const auto seq = log_video({ramp(-2.0, -1.0, 60)}, 1.0 / 64.0);
  const auto b = blur_frames(seq, 3, 49);
  EXPECT_EQ(b.window.start(), seq.timestamp(3));
  EXPECT_EQ(b.window.duration(), 49.0 / 64.0);
  double sum = 0.0;
  for (std::size_t k = 3; k < 52; ++k) sum += seq.frame(k)[0];
  EXPECT_NEAR(b.frame[0], sum / 49.0, 1e-15);
}

TEST(Protocols, NamesRoundTrip) {
  for (Protocol p : {Protocol::Deblur, Protocol::Skip1, Protocol::Skip3}) {
    EXPECT_EQ(parse_protocol(protocol_name(p)), p);
  }
  EXPECT_THROW(parse_protocol("skip2"), DomainError);
}

TEST(MakeDataset, Skip1On97Frames) {
  const auto records = make_dataset(constant_video(97), Protocol::Skip1, SimConfig{});
  ASSERT_EQ(records.size(), 1u);
  ASSERT_TRUE(records[0].has_pair());
  ASSERT_EQ(records[0].ground_truth.size(), 1u);
  EXPECT_EQ(records[0].ground_truth[0].frame_index, 48u);
  const auto pair = records[0].pair();
  EXPECT_DOUBLE_EQ(pair.first().window.duration(), 41 * 0.1);
  EXPECT_DOUBLE_EQ(pair.second().window.start(), 56 * 0.1);
}

TEST(MakeDataset, Skip3HoldsOutThreeMiddleFrames) {
  const auto records = make_dataset(constant_video(145), Protocol::Skip3, SimConfig{});
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[1].first_frame, 48u);
  std::vector<std::size_t> idx;
  for (const auto& g : records[1].ground_truth) idx.push_back(g.frame_index);
  EXPECT_EQ(idx, (std::vector<std::size_t>{88, 96, 104}));
  EXPECT_DOUBLE_EQ(records[1].blurs[0].window.duration(), 33 * 0.1);
}

TEST(MakeDataset, DeblurOn49FramesGivesOneBlurAndSevenFrames) {
  const auto records = make_dataset(constant_video(49), Protocol::Deblur, SimConfig{});
  ASSERT_EQ(records.size(), 1u);
  EXPECT_FALSE(records[0].has_pair());
  EXPECT_EQ(records[0].ground_truth.size(), 7u);
  EXPECT_THROW(records[0].pair(), DomainError);
}

TEST(MakeDataset, DeblurPairsConsecutiveBlurs) {
  const auto records = make_dataset(constant_video(200), Protocol::Deblur, SimConfig{});
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].ground_truth.size(), 14u);
  EXPECT_EQ(records[1].first_frame, 98u);
  EXPECT_EQ(records[1].ground_truth.back().frame_index, 195u);
  const auto pair = records[0].pair();
  EXPECT_EQ(pair.first().window.end(), pair.second().window.start());
}

TEST(MakeDataset, ShortSequenceNamesShortfall) {
  try {
    make_dataset(constant_video(96), Protocol::Skip1, SimConfig{});
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("97"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("short by 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(make_dataset(constant_video(48), Protocol::Deblur, SimConfig{}), DomainError);
}

TEST(BundledSequence, ValuesSitOnContrastLattice) {
  BundledSequenceConfig config;
  const SharpSequence seq = bundled_sequence(config);
  EXPECT_EQ(seq.size(), 200u);
  EXPECT_EQ(seq.width(), 64u);
  const Frame& first = seq.frame(0);
  for (std::size_t i : {0u, 10u, 199u}) {
    const Frame& f = seq.frame(i);
    for (std::size_t k = 0; k < f.size(); k += 37) {
      const double steps = std::log(f[k] / first[k]) / config.contrast_step;
      EXPECT_NEAR(steps, std::round(steps), 1e-9);
    }
  }
  EXPECT_NE(seq.frame(0), seq.frame(50));
}
