#include "rbcscan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rbcscan/errors.hpp"

namespace rbcscan::geometry {

void CameraModel::validate() const {
  if (!(focal_px > 0.0) || !std::isfinite(focal_px)) {
    throw InvariantError("camera focal_px must be positive, got " + std::to_string(focal_px));
  }
  if (ref_width <= 0 || ref_height <= 0) {
    throw InvariantError("camera reference resolution must be positive");
  }
}

CameraModel CameraModel::rescaled(int width, int height) const {
  validate();
  if (width <= 0 || height <= 0) {
    throw ConfigError("output resolution must be positive");
  }
  // w / ref_w == h / ref_h, compared exactly in integers.
  if (static_cast<long long>(width) * ref_height != static_cast<long long>(height) * ref_width) {
    throw ConfigError("output resolution " + std::to_string(width) + "x" + std::to_string(height) +
                      " does not share the aspect ratio of " + std::to_string(ref_width) + "x" +
                      std::to_string(ref_height));
  }
  return {focal_px * (static_cast<double>(width) / ref_width), width, height};
}

void ReceiverSpec::validate() const {
  if (!(width_cm > 0.0) || !(height_cm > 0.0)) {
    throw InvariantError("receiver dimensions must be positive");
  }
}

void CellGrid::validate() const {
  if (rows < 1 || cols < 1) throw InvariantError("grid rows and cols must be >= 1");
  if (image_width < 1 || image_height < 1) throw InvariantError("grid image size must be >= 1");
}

double calibrate_focal(double object_cm, double distance_cm, double observed_px) {
  if (!(object_cm > 0.0) || !(distance_cm > 0.0) || !(observed_px > 0.0)) {
    throw DomainError("calibrate_focal: all inputs must be positive");
  }
  return observed_px * distance_cm / object_cm;
}

PixelSize project_size(const CameraModel& cam, const ReceiverSpec& spec, double distance_cm,
                       int out_width, int out_height) {
  spec.validate();
  if (!(distance_cm > 0.0)) {
    throw DomainError("project_size: distance must be positive");
  }
  const CameraModel scaled = cam.rescaled(out_width, out_height);
  return {scaled.focal_px * spec.width_cm / distance_cm,
          scaled.focal_px * spec.height_cm / distance_cm};
}

bool is_detectable(PixelSize p, double min_w, double min_h) {
  const double long_side = std::max(p.w_px, p.h_px);
  const double short_side = std::min(p.w_px, p.h_px);
  return long_side >= std::max(min_w, min_h) && short_side >= std::min(min_w, min_h);
}

std::size_t cell_of_point(const CellGrid& grid, double x, double y) {
  grid.validate();
  if (!(x >= 0.0 && x < grid.image_width && y >= 0.0 && y < grid.image_height)) {
    throw DomainError("point (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") lies outside the image");
  }
  const auto col = std::min(static_cast<long long>(std::floor(x * grid.cols / grid.image_width)),
                            static_cast<long long>(grid.cols - 1));
  const auto row = std::min(static_cast<long long>(std::floor(y * grid.rows / grid.image_height)),
                            static_cast<long long>(grid.rows - 1));
  return static_cast<std::size_t>(row * grid.cols + col);
}

namespace {

// First integer pixel p with p * parts >= index * extent.
long long boundary(long long index, long long extent, long long parts) {
  return (index * extent + parts - 1) / parts;
}

}  // namespace

BBox cell_rect(const CellGrid& grid, std::size_t cell) {
  grid.validate();
  if (cell >= grid.n_cells()) throw DomainError("cell index out of range");
  const auto row = static_cast<long long>(cell / grid.cols);
  const auto col = static_cast<long long>(cell % grid.cols);
  const long long x0 = boundary(col, grid.image_width, grid.cols);
  const long long x1 = boundary(col + 1, grid.image_width, grid.cols);
  const long long y0 = boundary(row, grid.image_height, grid.rows);
  const long long y1 = boundary(row + 1, grid.image_height, grid.rows);
  return {static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x1 - x0),
          static_cast<double>(y1 - y0)};
}

Point cell_center(const CellGrid& grid, std::size_t cell) {
  grid.validate();
  if (cell >= grid.n_cells()) throw DomainError("cell index out of range");
  const double row = static_cast<double>(cell / grid.cols);
  const double col = static_cast<double>(cell % grid.cols);
  return {(col + 0.5) * grid.image_width / grid.cols, (row + 0.5) * grid.image_height / grid.rows};
}

Point bbox_center(const BBox& b) noexcept { return {b.x + b.w / 2.0, b.y + b.h / 2.0}; }

}  // namespace rbcscan::geometry
