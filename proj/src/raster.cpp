#include "evblur/raster.hpp"

#include "evblur/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace evblur {

Raster::Raster(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), values_(height * width, fill) {}

Raster::Raster(std::size_t height, std::size_t width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (values_.size() != height_ * width_) {
    throw DomainError("raster of " + std::to_string(height_) + "x" + std::to_string(width_) +
                      " given " + std::to_string(values_.size()) + " values");
  }
}

Frame::Frame(Raster linear) : pixels_(std::move(linear)) {
  for (double& v : pixels_.values()) {
    if (!std::isfinite(v)) {
      throw DomainError("frame contains a non-finite intensity");
    }
    v = std::max(v, kIntensityFloor);
  }
}

Frame::Frame(std::size_t height, std::size_t width, double fill)
    : Frame(Raster(height, width, fill)) {}

void require_same_shape(const Raster& a, const Raster& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DomainError(std::string(what) + ": geometry mismatch (" + std::to_string(a.height()) +
                      "x" + std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                      std::to_string(b.width()) + ")");
  }
}

} // namespace evblur
