#pragma once

#include "evblur/event.hpp"
#include "evblur/raster.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace evblur::oracle {

struct RawEvent {
  double t;
  int p;
};

// Signed count at one pixel between f and t, straight from the definition.
inline int signed_count(const std::vector<RawEvent>& events, double f, double t) {
  int n = 0;
  for (const auto& e : events) {
    if (t > f && e.t > f && e.t <= t) n += e.p;
    if (t < f && e.t > t && e.t <= f) n -= e.p;
  }
  return n;
}

// Midpoint Riemann sum of (1/(b-a)) * int_a^b exp(c * n(f, t)) dt with step dt.
inline double riemann_mean(const std::vector<RawEvent>& events, double f, double a, double b,
                           double c, double dt) {
  const auto steps = static_cast<std::size_t>(std::llround((b - a) / dt));
  const double h = (b - a) / static_cast<double>(steps);
  long double sum = 0.0L;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = a + (static_cast<double>(k) + 0.5) * h;
    sum += std::exp(c * signed_count(events, f, t));
  }
  return static_cast<double>(sum / static_cast<long double>(steps));
}

inline std::vector<RawEvent> pixel_events(const EventStream& s, std::size_t x, std::size_t y) {
  std::vector<RawEvent> out;
  for (const auto& e : s.events()) {
    if (e.x == x && e.y == y) out.push_back({e.t, e.p});
  }
  return out;
}

// Uniformly scattered events, up to max_per_pixel at every pixel.
inline EventStream random_stream(std::mt19937_64& rng, std::size_t width, std::size_t height,
                                 TimeSpan span, int max_per_pixel) {
  std::uniform_real_distribution<double> when(span.begin, span.end);
  std::uniform_int_distribution<int> count(0, max_per_pixel);
  std::bernoulli_distribution positive(0.5);
  std::vector<Event> events;
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const int n = count(rng);
      for (int k = 0; k < n; ++k) {
        events.push_back({when(rng), static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                          static_cast<std::int8_t>(positive(rng) ? 1 : -1)});
      }
    }
  }
  return EventStream(width, height, span, std::move(events));
}

inline EventStream single_event_stream(double t, int p, TimeSpan span = {0.0, 1.0}) {
  return EventStream(1, 1, span, {{t, 0, 0, static_cast<std::int8_t>(p)}});
}

inline double max_abs_diff(const Raster& a, const Raster& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

} // namespace evblur::oracle
