#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rbcscan/box.hpp"
#include "rbcscan/geometry.hpp"
#include "rbcscan/scanning.hpp"

namespace rbcscan::detector {

struct IouKnot {
  double iou_threshold = 0.0;
  double ap = 0.0;
  friend bool operator==(const IouKnot&, const IouKnot&) = default;
};

struct DistanceKnot {
  double distance_cm = 0.0;
  std::string image_size;  // e.g. "1280x720"
  double ap = 0.0;
  friend bool operator==(const DistanceKnot&, const DistanceKnot&) = default;
};

/// Empirical behavior of a detector: latency per image plus AP as a function
/// of IoU threshold and of capture distance at a given image size.
struct DetectorProfile {
  std::string name;
  double per_image_latency_s = 0.0;
  std::vector<IouKnot> ap_vs_iou;
  std::vector<DistanceKnot> ap_vs_distance;
  bool approximate = false;
  std::string note;

  void validate() const;
  friend bool operator==(const DetectorProfile&, const DetectorProfile&) = default;
};

/// Published framework comparison on COCO (percent / milliseconds).
struct FrameworkReference {
  std::string_view name;
  std::string_view backbone;
  double map_pct;
  double ap_small_pct;
  double time_ms;
};

inline constexpr std::array<FrameworkReference, 4> kFrameworkReferences{{
    {"Faster R-CNN", "ResNet-101-FPN", 36.2, 18.2, 175.0},
    {"Mask R-CNN", "ResNet-101-FPN", 38.2, 20.1, 195.0},
    {"SSD513", "ResNet-101", 31.2, 10.2, 125.0},
    {"YOLOv3", "Darknet-53", 33.0, 18.3, 51.0},
}};

/// Piecewise-linear in the threshold, exact at knots. A single-knot profile
/// is constant; otherwise thresholds outside the knot range are a DomainError.
double ap_at(const DetectorProfile& profile, double iou_threshold);

/// Same interpolation over the distance knots recorded for `image_size`.
double ap_at_distance(const DetectorProfile& profile, double distance_cm, std::string_view image_size);

struct SceneReceiver {
  GroundTruthObject object;
  double distance_cm = 0.0;
};

struct SyntheticScene {
  geometry::CellGrid grid;
  std::vector<SceneReceiver> receivers;

  void validate() const;
};

/// Score distributions for sampled detections. Both are uniform.
struct SamplerOptions {
  double correct_score_min = 0.8;
  double correct_score_max = 1.0;
  double wrong_score_min = 0.5;
  double wrong_score_max = 0.8;
};

/// One detection per receiver. With probability ap_at(profile, threshold) it
/// is the receiver's own box; otherwise a box of the same size centered in a
/// uniformly chosen different cell. Receiver i draws from stream_seed(seed, i).
std::vector<Detection> sample_detections(const SyntheticScene& scene, const DetectorProfile& profile,
                                         double iou_threshold, std::uint64_t rng_seed,
                                         const SamplerOptions& options = {});

/// Cells holding detection centers, highest score first, without repeats.
std::vector<std::size_t> detections_to_candidates(std::span<const Detection> dets,
                                                  const geometry::CellGrid& grid);

struct PipelineOptions {
  double receiver_w_px = 124.0;
  double receiver_h_px = 62.0;
  SamplerOptions sampler;
  scanning::RunOptions run;
};

/// End-to-end episodes: a single receiver placed in a uniform cell, detections
/// from sample_detections, candidates from detections_to_candidates, then the
/// multi-candidate scan. `cfg.ap` is ignored in favor of the profile's AP;
/// the reported analytic time is t2_analytic at that AP.
scanning::SimulationSummary simulate_detection_pipeline(const geometry::CellGrid& grid,
                                                        const DetectorProfile& profile,
                                                        double iou_threshold,
                                                        const scanning::ScanConfig& cfg,
                                                        std::uint64_t rng_seed, std::size_t trials,
                                                        const PipelineOptions& options = {});

}  // namespace rbcscan::detector
