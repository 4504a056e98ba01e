#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "rbcscan/box.hpp"

namespace rbcscan::metrics {

inline constexpr std::size_t kRecallSamples = 101;
inline constexpr double kDefaultSmallCutoffPx = 32.0;

double iou(const BBox& a, const BBox& b) noexcept;

struct MatchResult {
  std::vector<bool> det_is_tp;      // indexed like the input detections
  std::vector<bool> gt_matched;     // indexed like the input ground truth
  std::vector<long> det_matched_gt; // -1 when unmatched
};

/// Greedy matching on a single image and class. Detections are visited in
/// descending score order, ties kept in input order; each one claims the
/// unmatched GT with the highest IoU if that IoU reaches the threshold.
MatchResult match_detections(std::span<const Detection> dets, std::span<const GroundTruthObject> gts,
                             double iou_threshold);

/// COCO-style AP. `tp_flags` must be ordered by descending score across the
/// whole dataset. Precision is replaced by its monotone non-increasing
/// envelope and sampled at recall 0.00, 0.01, ..., 1.00.
///
/// With total_gt == 0 the result is 1 for an empty flag list and 0 otherwise.
double average_precision(const std::vector<bool>& tp_flags, std::size_t total_gt);

/// Ten thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> default_iou_thresholds();

struct EvalResult {
  std::map<double, double> ap_per_threshold;
  double map_value = 0.0;
  double ap_small = 0.0;
};

struct EvalOptions {
  std::vector<double> thresholds = default_iou_thresholds();
  double small_cutoff_px = kDefaultSmallCutoffPx;
  double small_iou_threshold = 0.5;
  // Per-image matching is spread over this many threads; results do not depend on it.
  std::size_t workers = 1;
};

/// Dataset evaluation. AP at each threshold is the mean over classes that
/// have ground truth. AP_S uses only GT with area < cutoff^2; detections
/// matched to larger GT are dropped instead of counted as false positives.
EvalResult evaluate(std::span<const Detection> dets, std::span<const GroundTruthObject> gts,
                    const EvalOptions& options = {});

/// Horizontal mirror: x' = image_width - x - w.
GroundTruthObject flip_augment(const GroundTruthObject& gt, int image_width);

}  // namespace rbcscan::metrics
