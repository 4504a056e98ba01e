#include "rbcscan/commands.hpp"

#include <set>

#include "rbcscan/detector_model.hpp"
#include "rbcscan/errors.hpp"

namespace rbcscan::commands {

metrics::EvalResult run_eval(const io::AnnotationFile& gt, const io::DetectionFile& dets,
                             const metrics::EvalOptions& options) {
  for (std::size_t i = 0; i < dets.detections.size(); ++i) {
    const auto& d = dets.detections[i];
    if (gt.find_image(d.image_id) == nullptr) {
      throw InvariantError("detections[" + std::to_string(i) + "].image_id: '" + d.image_id +
                           "' is not in the annotation file");
    }
  }
  return metrics::evaluate(dets.detections, gt.objects, options);
}

std::string eval_csv(const metrics::EvalResult& result, const metrics::EvalOptions& options) {
  std::string out = "metric,iou_threshold,value\n";
  for (const auto& [t, ap] : result.ap_per_threshold) {
    out += "ap," + io::format_number(t) + ',' + io::format_number(ap) + '\n';
  }
  out += "map,," + io::format_number(result.map_value) + '\n';
  out += "ap_small," + io::format_number(options.small_iou_threshold) + ',' +
         io::format_number(result.ap_small) + '\n';
  return out;
}

io::AnalyticTable analytic_table(const scanning::ScanConfig& base, const std::vector<double>& aps) {
  if (aps.empty()) throw UsageError("analytic: AP grid is empty");
  io::AnalyticTable table;
  for (double ap : aps) {
    scanning::ScanConfig cfg = base;
    cfg.ap = ap;
    table.rows.push_back({ap, scanning::t1_analytic(cfg), scanning::t2_analytic(cfg)});
  }
  table.breakeven = scanning::breakeven_ap(base);
  return table;
}

io::AnalyticTable analytic_table(const scanning::ScanConfig& base, double ap_min, double ap_max,
                                 std::size_t points) {
  if (points == 0) throw UsageError("analytic: need at least one AP point");
  if (!(ap_min >= 0.0 && ap_max <= 1.0 && ap_min <= ap_max)) {
    throw UsageError("analytic: AP range must satisfy 0 <= min <= max <= 1");
  }
  std::vector<double> aps;
  if (points == 1) {
    aps.push_back(ap_min);
  } else {
    // i * span / (points - 1) keeps grid values like 0.7 exactly representable
    const double span = ap_max - ap_min;
    for (std::size_t i = 0; i < points; ++i) {
      aps.push_back(ap_min + span * static_cast<double>(i) / static_cast<double>(points - 1));
    }
  }
  return analytic_table(base, aps);
}

std::vector<io::SimulationRow> run_scenario(const io::ScenarioFile& scenario, std::size_t workers) {
  const scanning::RunOptions run{workers};
  std::vector<io::SimulationRow> rows;
  rows.push_back({"traditional", scanning::simulate_traditional(scenario.scan, scenario.seed, scenario.trials, run)});
  rows.push_back({"guided", scanning::simulate_guided(scenario.scan, scenario.seed, scenario.trials, run)});
  if (scenario.profile) {
    detector::PipelineOptions options;
    options.run = run;
    rows.push_back({"pipeline", detector::simulate_detection_pipeline(scenario.grid, *scenario.profile,
                                                                      scenario.iou_threshold, scenario.scan,
                                                                      scenario.seed, scenario.trials, options)});
  }
  return rows;
}

GeometryRequest default_geometry_request() {
  GeometryRequest r;
  r.camera = {geometry::calibrate_focal(14.0, 120.0, 124.0), 1280, 720};
  r.receiver = {14.0, 7.0, ReceiverClass::kSmartphone};
  r.distances_cm = {120.0, 200.0, 250.0, 350.0};
  r.resolutions = {{1280, 720}, {640, 360}};
  return r;
}

std::vector<GeometryRow> geometry_table(const GeometryRequest& request) {
  std::vector<GeometryRow> rows;
  for (double d : request.distances_cm) {
    for (const auto& [w, h] : request.resolutions) {
      const auto size = geometry::project_size(request.camera, request.receiver, d, w, h);
      rows.push_back({d, w, h, size, geometry::is_detectable(size, request.min_long_px, request.min_short_px)});
    }
  }
  return rows;
}

std::string geometry_csv(const std::vector<GeometryRow>& rows) {
  std::string out = "distance_cm,image_width,image_height,w_px,h_px,detectable\n";
  for (const auto& r : rows) {
    out += io::format_number(r.distance_cm) + ',' + std::to_string(r.width) + ',' + std::to_string(r.height) + ',' +
           io::format_number(r.size.w_px) + ',' + io::format_number(r.size.h_px) + ',' +
           (r.detectable ? "1" : "0") + '\n';
  }
  return out;
}

io::AnnotationFile augment(const io::AnnotationFile& file) {
  std::set<std::string> existing;
  for (const auto& img : file.images) existing.insert(img.id);

  std::string suffix;
  for (int k = 1;; ++k) {
    suffix = k == 1 ? "_flip" : "_flip" + std::to_string(k);
    bool clash = false;
    for (const auto& img : file.images) clash = clash || existing.count(img.id + suffix) > 0;
    if (!clash) break;
  }

  io::AnnotationFile out = file;
  for (const auto& img : file.images) out.images.push_back({img.id + suffix, img.width, img.height});
  for (const auto& obj : file.objects) {
    const io::ImageInfo* img = file.find_image(obj.image_id);
    if (img == nullptr) throw InvariantError("object refers to unknown image '" + obj.image_id + "'");
    auto flipped = metrics::flip_augment(obj, img->width);
    flipped.image_id += suffix;
    out.objects.push_back(std::move(flipped));
  }
  return out;
}

}  // namespace rbcscan::commands
