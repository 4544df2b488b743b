#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace evblur {

/// Lowest admissible linear intensity. Applied before every log or division.
inline constexpr double kIntensityFloor = 1.0 / 255.0;

/// Dense H x W field of doubles, row-major.
class Raster {
public:
  Raster() = default;
  Raster(std::size_t height, std::size_t width, double fill = 0.0);
  Raster(std::size_t height, std::size_t width, std::vector<double> values);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t y, std::size_t x) { return values_[y * width_ + x]; }
  double operator()(std::size_t y, std::size_t x) const { return values_[y * width_ + x]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool same_shape(const Raster& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  bool operator==(const Raster&) const = default;

private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> values_;
};

/// Linear-intensity image. Values are clamped below at kIntensityFloor on
/// construction and stay finite; there is no upper clamp.
class Frame {
public:
  Frame() = default;
  explicit Frame(Raster linear);
  Frame(std::size_t height, std::size_t width, double fill);

  std::size_t height() const { return pixels_.height(); }
  std::size_t width() const { return pixels_.width(); }
  std::size_t size() const { return pixels_.size(); }

  double operator()(std::size_t y, std::size_t x) const { return pixels_(y, x); }
  double operator[](std::size_t i) const { return pixels_[i]; }

  const Raster& raster() const { return pixels_; }
  std::span<const double> values() const { return pixels_.values(); }

  bool same_shape(const Frame& other) const { return pixels_.same_shape(other.pixels_); }
  bool operator==(const Frame&) const = default;

private:
  Raster pixels_;
};

/// Throws DomainError naming `what` unless both rasters share a shape.
void require_same_shape(const Raster& a, const Raster& b, const char* what);

} // namespace evblur
