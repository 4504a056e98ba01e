#pragma once

#include <string>
#include <string_view>

namespace rbcscan {

/// Axis-aligned box in pixel coordinates. Origin top-left, y grows downward.
/// Annotated boxes are the minimum enclosing rectangle of the object mask.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const noexcept { return w * h; }
  double right() const noexcept { return x + w; }
  double bottom() const noexcept { return y + h; }
  bool valid() const noexcept { return w >= 0.0 && h >= 0.0; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

enum class ReceiverClass { kSmartphone, kLaptop, kLamp, kIotDevice };

std::string_view to_string(ReceiverClass c) noexcept;
// Throws SchemaError for unknown names.
ReceiverClass receiver_class_from_string(std::string_view name);

struct Detection {
  std::string image_id;
  BBox bbox;
  double score = 0.0;
  ReceiverClass class_label = ReceiverClass::kSmartphone;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct GroundTruthObject {
  std::string image_id;
  BBox bbox;
  ReceiverClass class_label = ReceiverClass::kSmartphone;

  friend bool operator==(const GroundTruthObject&, const GroundTruthObject&) = default;
};

}  // namespace rbcscan
