#include "evblur/error.hpp"
#include "evblur/reconstruct.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace evblur;

namespace {

BlurryObservation flat_blur(double value, double start, double duration, std::size_t w = 1,
                            std::size_t h = 1) {
  return {Frame(h, w, value), ExposureWindow(start, duration)};
}

} // namespace

TEST(Latent, DividesBlurByDoubleIntegral) {
  const EventStream s = oracle::single_event_stream(0.25, 1);
  const auto blur = flat_blur(0.5, 0.0, 1.0);
  const ThresholdModel c(std::numbers::ln2);
  EXPECT_NEAR(latent_from_blur(blur, edi_map(s, 0.0, blur.window, c))[0], 0.5 / 1.75, 1e-12);
  EXPECT_NEAR(latent_from_blur(blur, edi_map(s, 1.0, blur.window, c))[0], 0.5 / 0.875, 1e-12);
}

TEST(Latent, FlooredAndNotClamped) {
  const EventStream s(2, 1, {0.0, 1.0}, {});
  Raster r(1, 2, std::vector<double>{0.0, 3.0});
  const BlurryObservation blur{Frame(r), ExposureWindow(0.0, 1.0)};
  const Frame l = latent_from_blur(blur, edi_map(s, 0.5, blur.window, ThresholdModel(0.2)));
  EXPECT_EQ(l[0], kIntensityFloor);
  EXPECT_EQ(l[1], 3.0);
}

TEST(Omega, PiecewiseWeight) {
  const PairTimeline tl(ExposureWindow(0.0, 1.0), ExposureWindow(2.0, 1.0));
  EXPECT_EQ(weight_omega(0.5, tl), 1.0);
  EXPECT_EQ(weight_omega(1.0, tl), 1.0);
  EXPECT_EQ(weight_omega(2.5, tl), 0.0);
  EXPECT_DOUBLE_EQ(weight_omega(1.5, tl), 0.5);
  EXPECT_THROW(weight_omega(3.5, tl), DomainError);
}

TEST(Timeline, RejectsOverlappingExposures) {
  EXPECT_THROW(PairTimeline(ExposureWindow(0.0, 1.0), ExposureWindow(0.5, 1.0)), DomainError);
  EXPECT_NO_THROW(PairTimeline(ExposureWindow(0.0, 1.0), ExposureWindow(1.0, 1.0)));
}

TEST(InputPairTest, ValidatesGeometryAndSpan) {
  const EventStream s(2, 2, {0.0, 3.0}, {});
  EXPECT_NO_THROW(InputPair(flat_blur(0.5, 0.0, 1.0, 2, 2), flat_blur(0.5, 2.0, 1.0, 2, 2), s));
  EXPECT_THROW(InputPair(flat_blur(0.5, 0.0, 1.0, 3, 2), flat_blur(0.5, 2.0, 1.0, 3, 2), s),
               DomainError);
  EXPECT_THROW(InputPair(flat_blur(0.5, 0.0, 1.0, 2, 2), flat_blur(0.5, 2.5, 1.0, 2, 2), s),
               DomainError);
}

TEST(Reconstruct, GapBlendsBothSides) {
  const EventStream s(1, 1, {0.0, 3.0}, {});
  const InputPair pair(flat_blur(0.2, 0.0, 1.0), flat_blur(0.6, 2.0, 1.0), s);
  const ThresholdModel c(0.3);
  EXPECT_NEAR(reconstruct_latent(pair, 0.5, c)[0], 0.2, 1e-15);
  EXPECT_NEAR(reconstruct_latent(pair, 2.5, c)[0], 0.6, 1e-15);
  EXPECT_NEAR(reconstruct_latent(pair, 1.5, c)[0], 0.4, 1e-15);
}

TEST(Reconstruct, VideoNamesOffendingTimestamp) {
  const EventStream s(1, 1, {0.0, 3.0}, {});
  const InputPair pair(flat_blur(0.2, 0.0, 1.0), flat_blur(0.6, 2.0, 1.0), s);
  try {
    reconstruct_video(pair, {0.5, 4.0}, ThresholdModel(0.2));
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("#1"), std::string::npos) << e.what();
  }
  EXPECT_EQ(reconstruct_video(pair, {0.5, 1.5, 2.5}, ThresholdModel(0.2)).size(), 3u);
}

TEST(Reblur, MeanOfLatents) {
  const std::vector<Frame> frames{Frame(1, 2, 0.2), Frame(1, 2, 0.4), Frame(1, 2, 0.9)};
  const Frame b = reblur(frames);
  EXPECT_DOUBLE_EQ(b[0], 0.5);
  EXPECT_EQ(reblur({Frame(1, 1, 0.3)})[0], 0.3);
  EXPECT_THROW(reblur({}), DomainError);
}

TEST(ExposureGrid, EndpointsIncluded) {
  const auto g = exposure_grid(ExposureWindow(1.0, 2.0), 5);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g.front(), 1.0);
  EXPECT_EQ(g[2], 2.0);
  EXPECT_EQ(g.back(), 3.0);
  EXPECT_EQ(exposure_grid(ExposureWindow(1.0, 2.0), 1), std::vector<double>{2.0});
  EXPECT_THROW(exposure_grid(ExposureWindow(1.0, 2.0), 0), DomainError);
}

TEST(ReconstructProperty, ReblurOfExactLatentsRecoversBlur) {
  // A latent that steps at known times; the blur is its exact time average.
  const double c = 0.3;
  const EventStream s(1, 1, {0.0, 1.0}, {{0.25, 0, 0, 1}, {0.5, 0, 0, 1}, {0.75, 0, 0, -1}});
  const double l0 = 0.2;
  const double blur = l0 * (0.25 + 0.25 * std::exp(c) + 0.25 * std::exp(2 * c) + 0.25 * std::exp(c));
  const BlurryObservation b{Frame(1, 1, blur), ExposureWindow(0.0, 1.0)};
  const ThresholdModel tm(c);
  std::vector<Frame> latents;
  for (double t : exposure_grid(b.window, 4001)) {
    latents.push_back(latent_from_blur(b, edi_map(s, t, b.window, tm)));
  }
  EXPECT_NEAR(latents.front()[0], l0, 1e-12);
  EXPECT_NEAR(reblur(latents)[0], blur, 1e-3 * blur);
}
