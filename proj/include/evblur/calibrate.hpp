#pragma once

#include "evblur/losses.hpp"
#include "evblur/reconstruct.hpp"

#include <vector>

namespace evblur {

struct CalibrationConfig {
  double c_min = 0.05;
  double c_max = 1.0;
  std::size_t grid_points = 25;
  double tol = 1e-3;
  LossWeights objective_weights{};
  std::size_t sample_timestamps = 5;  // anchors per pair
  std::size_t m_per_window = 7;       // latents per exposure for the grid losses

  void validate() const;
};

struct GridSample {
  double c;
  double objective;
};

struct CalibrationResult {
  double c_star = 0.0;
  double objective = 0.0;
  bool identifiable = true;
  std::vector<GridSample> grid;  // coarse scan, ascending c
  std::size_t evaluations = 0;
};

/// Mean total_loss over the pairs and `sample_timestamps` uniformly spaced
/// anchors per pair (endpoints included).
double calibration_objective(const std::vector<InputPair>& pairs, const CalibrationConfig& config,
                             double c);

/// Log-spaced coarse scan over [c_min, c_max] followed by golden-section
/// refinement on the bracket around the scan minimum, until the bracket is no
/// wider than tol. Returns the best evaluated point. A flat scan returns the
/// middle grid point and marks the result non-identifiable.
CalibrationResult calibrate_threshold(const std::vector<InputPair>& pairs,
                                      const CalibrationConfig& config);

} // namespace evblur
