#pragma once

#include <cstddef>

#include "rbcscan/box.hpp"

namespace rbcscan::geometry {

/// Single-parameter pinhole camera. `focal_px` is expressed in pixels at the
/// reference resolution; at any other resolution with the same aspect ratio
/// it scales linearly with the image width.
struct CameraModel {
  double focal_px = 0.0;
  int ref_width = 0;
  int ref_height = 0;

  void validate() const;
  /// Same camera saved at (width, height). Throws ConfigError on aspect mismatch.
  CameraModel rescaled(int width, int height) const;
};

struct ReceiverSpec {
  double width_cm = 0.0;
  double height_cm = 0.0;
  ReceiverClass class_label = ReceiverClass::kSmartphone;

  void validate() const;
};

struct PixelSize {
  double w_px = 0.0;
  double h_px = 0.0;
};

/// Image partition into rows x cols scan cells, indexed row-major.
struct CellGrid {
  int rows = 0;
  int cols = 0;
  int image_width = 0;
  int image_height = 0;

  void validate() const;
  std::size_t n_cells() const noexcept {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }
};

inline constexpr double kMinDetectableLongPx = 30.0;
inline constexpr double kMinDetectableShortPx = 15.0;

/// focal = observed_px * distance_cm / object_cm.
double calibrate_focal(double object_cm, double distance_cm, double observed_px);

PixelSize project_size(const CameraModel& cam, const ReceiverSpec& spec, double distance_cm,
                       int out_width, int out_height);

// Long side is compared against the long threshold, short side against the
// short one. Inclusive at the boundary.
bool is_detectable(PixelSize p, double min_w = kMinDetectableLongPx,
                   double min_h = kMinDetectableShortPx);

std::size_t cell_of_point(const CellGrid& grid, double x, double y);

/// Integer pixel rectangle covered by a cell. Column c owns the pixels x with
/// c*W/cols <= x < (c+1)*W/cols, which matches cell_of_point on pixel corners.
BBox cell_rect(const CellGrid& grid, std::size_t cell);

/// Center of the continuous region of a cell; always maps back to `cell`.
Point cell_center(const CellGrid& grid, std::size_t cell);

Point bbox_center(const BBox& b) noexcept;

}  // namespace rbcscan::geometry
