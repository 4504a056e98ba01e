#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rbcscan/geometry.hpp"
#include "rbcscan/io.hpp"
#include "rbcscan/metrics.hpp"
#include "rbcscan/scanning.hpp"

// Batch operations behind the command-line subcommands. Each returns data or
// CSV text and leaves printing to the caller.
namespace rbcscan::commands {

/// Evaluates detections against annotations. Detections on images the
/// annotation file does not list are rejected.
metrics::EvalResult run_eval(const io::AnnotationFile& gt, const io::DetectionFile& dets,
                             const metrics::EvalOptions& options);
std::string eval_csv(const metrics::EvalResult& result, const metrics::EvalOptions& options);

/// `points` evenly spaced AP values from ap_min to ap_max inclusive
/// (a single point uses ap_min).
io::AnalyticTable analytic_table(const scanning::ScanConfig& base, double ap_min, double ap_max,
                                 std::size_t points);
io::AnalyticTable analytic_table(const scanning::ScanConfig& base, const std::vector<double>& aps);

/// Traditional and guided rows; a third "pipeline" row when the scenario
/// carries a detector profile.
std::vector<io::SimulationRow> run_scenario(const io::ScenarioFile& scenario, std::size_t workers = 1);

struct GeometryRow {
  double distance_cm = 0.0;
  int width = 0;
  int height = 0;
  geometry::PixelSize size;
  bool detectable = false;
};

struct GeometryRequest {
  geometry::CameraModel camera;
  geometry::ReceiverSpec receiver;
  std::vector<double> distances_cm;
  std::vector<std::pair<int, int>> resolutions;
  double min_long_px = geometry::kMinDetectableLongPx;
  double min_short_px = geometry::kMinDetectableShortPx;
};

/// Smartphone (14 x 7 cm) seen by the camera calibrated at 120 cm / 124 px on
/// 1280x720, at 120, 200, 250 and 350 cm, saved at 1280x720 and 640x360.
GeometryRequest default_geometry_request();

std::vector<GeometryRow> geometry_table(const GeometryRequest& request);
std::string geometry_csv(const std::vector<GeometryRow>& rows);

/// Originals followed by mirrored copies of every image and object. Mirrored
/// image ids get the first suffix "_flip", "_flip2", ... that collides with
/// no existing id. Split metadata is copied unchanged.
io::AnnotationFile augment(const io::AnnotationFile& file);

}  // namespace rbcscan::commands
