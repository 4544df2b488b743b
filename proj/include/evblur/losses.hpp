#pragma once

#include "evblur/reconstruct.hpp"

#include <iosfwd>
#include <string>

namespace evblur {

struct LossWeights {
  double alpha = 512.0;
  double beta = 1.0;
  double gamma = 0.1;

  LossWeights() = default;
  LossWeights(double alpha, double beta, double gamma);
};

struct LossReport {
  double l_be = 0.0;
  double l_bs = 0.0;
  double l_se = 0.0;
  double total = 0.0;
};

/// Mean over pixels of |(log B_{i+1} - log B_i) - (log E(f,T_{i+1}) - log E(f,T_i))|.
double blurry_event_loss(const InputPair& pair, double f, const ThresholdModel& c);

/// Reblurs `m_per_window` reconstructions per exposure (exposure_grid) and
/// returns mean|reblur_i - B_i| + mean|reblur_{i+1} - B_{i+1}|.
double blurry_sharp_loss(const InputPair& pair, std::size_t m_per_window, const ThresholdModel& c);

/// Masked min/max-normalized L1 between log(l_t) - log(l_f) and the raw signed
/// event count between f and t. Pixels without events in the interval are
/// masked out; an empty mask yields 0. A masked field whose range is below
/// 1e-9 of its magnitude normalizes to 0.5 everywhere.
double sharp_event_loss(const Frame& l_f, const Frame& l_t, const PixelEventIndex& events, double f,
                        double t);
double sharp_event_loss(const Frame& l_f, const Frame& l_t, const EventStream& events, double f,
                        double t);

/// The three losses at anchor f and their weighted sum. The sharp-event term
/// averages over consecutive pairs of the combined blurry-sharp grid (both
/// exposures, time-ordered, skipping coincident timestamps).
LossReport total_loss(const InputPair& pair, double f, const ThresholdModel& c,
                      const LossWeights& weights, std::size_t m_per_window);

/// Anchor-independent part of total_loss: blurry-sharp and sharp-event terms.
struct GridLosses {
  double l_bs = 0.0;
  double l_se = 0.0;
};
GridLosses grid_losses(const InputPair& pair, std::size_t m_per_window, const ThresholdModel& c);

/// `key=value` lines for l_be, l_bs, l_se, total.
std::string format_report(const LossReport& report);

} // namespace evblur
