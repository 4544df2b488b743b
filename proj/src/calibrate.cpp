#include "evblur/calibrate.hpp"

#include "evblur/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace evblur {

void CalibrationConfig::validate() const {
  if (!(c_min > 0.0) || !(c_max > c_min) || !std::isfinite(c_max)) {
    std::ostringstream msg;
    msg << "calibration bounds must satisfy 0 < c_min < c_max (got " << c_min << ", " << c_max
        << ")";
    throw DomainError(msg.str());
  }
  if (grid_points < 3) throw DomainError("calibration grid needs at least 3 points");
  if (!(tol > 0.0)) throw DomainError("calibration tolerance must be positive");
  if (sample_timestamps == 0) throw DomainError("calibration needs at least one anchor per pair");
  if (m_per_window == 0) throw DomainError("calibration needs at least one latent per exposure");
}

double calibration_objective(const std::vector<InputPair>& pairs, const CalibrationConfig& config,
                             double c) {
  const ThresholdModel threshold(c);
  const LossWeights& w = config.objective_weights;
  double acc = 0.0;
  std::size_t samples = 0;
  for (const InputPair& pair : pairs) {
    const GridLosses grid = grid_losses(pair, config.m_per_window, threshold);
    const PairTimeline& tl = pair.timeline();
    for (std::size_t k = 0; k < config.sample_timestamps; ++k) {
      const double f =
          config.sample_timestamps == 1
              ? tl.begin() + 0.5 * tl.total_duration()
              : (k + 1 == config.sample_timestamps
                     ? tl.end()
                     : tl.begin() + tl.total_duration() * (static_cast<double>(k) /
                                                           (config.sample_timestamps - 1)));
      const double l_be = blurry_event_loss(pair, f, threshold);
      acc += w.alpha * l_be + w.beta * grid.l_bs + w.gamma * grid.l_se;
      ++samples;
    }
  }
  return acc / static_cast<double>(samples);
}

CalibrationResult calibrate_threshold(const std::vector<InputPair>& pairs,
                                      const CalibrationConfig& config) {
  if (pairs.empty()) throw DomainError("calibration needs at least one input pair");
  config.validate();

  CalibrationResult result;
  auto evaluate = [&](double c) {
    ++result.evaluations;
    const double value = calibration_objective(pairs, config, c);
    return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
  };

  const std::size_t n = config.grid_points;
  const double log_lo = std::log(config.c_min);
  const double log_step = (std::log(config.c_max) - log_lo) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    double c = std::exp(log_lo + log_step * static_cast<double>(k));
    if (k == 0) c = config.c_min;
    if (k + 1 == n) c = config.c_max;
    result.grid.push_back({c, evaluate(c)});
  }

  const auto best_it = std::min_element(
      result.grid.begin(), result.grid.end(),
      [](const GridSample& a, const GridSample& b) { return a.objective < b.objective; });
  const auto worst_it = std::max_element(
      result.grid.begin(), result.grid.end(),
      [](const GridSample& a, const GridSample& b) { return a.objective < b.objective; });
  if (!std::isfinite(best_it->objective)) {
    throw CalibrationError("calibration objective is non-finite at every grid point");
  }
  if (std::isfinite(worst_it->objective) &&
      worst_it->objective - best_it->objective <=
          1e-12 * std::max(1.0, std::abs(worst_it->objective))) {
    const GridSample& middle = result.grid[(n - 1) / 2];
    result.c_star = middle.c;
    result.objective = middle.objective;
    result.identifiable = false;
    return result;
  }

  const auto best_index = static_cast<std::size_t>(best_it - result.grid.begin());
  GridSample best = *best_it;
  double lo = result.grid[best_index == 0 ? 0 : best_index - 1].c;
  double hi = result.grid[std::min(best_index + 1, n - 1)].c;

  // Golden-section search; keeps the best point seen so the answer never
  // regresses past the scan.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = evaluate(x1);
  double f2 = evaluate(x2);
  auto consider = [&](double c, double value) {
    if (value < best.objective) best = {c, value};
  };
  consider(x1, f1);
  consider(x2, f2);
  while (hi - lo > config.tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = evaluate(x1);
      consider(x1, f1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = evaluate(x2);
      consider(x2, f2);
    }
  }
  result.c_star = best.c;
  result.objective = best.objective;
  return result;
}

} // namespace evblur
