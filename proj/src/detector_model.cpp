#include "rbcscan/detector_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rbcscan/errors.hpp"

namespace rbcscan::detector {

void DetectorProfile::validate() const {
  if (!(per_image_latency_s >= 0.0)) throw InvariantError("profile latency must be non-negative");
  if (ap_vs_iou.empty()) throw InvariantError("profile '" + name + "' has no ap_vs_iou knots");
  for (std::size_t i = 0; i < ap_vs_iou.size(); ++i) {
    const auto& k = ap_vs_iou[i];
    if (!(k.ap >= 0.0 && k.ap <= 1.0)) throw InvariantError("ap_vs_iou ap outside [0, 1]");
    if (!(k.iou_threshold > 0.0 && k.iou_threshold <= 1.0)) {
      throw InvariantError("ap_vs_iou threshold outside (0, 1]");
    }
    if (i > 0) {
      if (!(k.iou_threshold > ap_vs_iou[i - 1].iou_threshold)) {
        throw InvariantError("ap_vs_iou thresholds must be strictly increasing");
      }
      if (k.ap > ap_vs_iou[i - 1].ap) throw InvariantError("ap_vs_iou must be non-increasing");
    }
  }
  for (const auto& k : ap_vs_distance) {
    if (!(k.ap >= 0.0 && k.ap <= 1.0)) throw InvariantError("ap_vs_distance ap outside [0, 1]");
    if (!(k.distance_cm > 0.0)) throw InvariantError("ap_vs_distance distance must be positive");
  }
}

namespace {

template <typename Knots, typename X>
double interpolate(const Knots& knots, double at, X x_of, const char* what) {
  if (knots.size() == 1) return knots.front().ap;
  if (at < x_of(knots.front()) || at > x_of(knots.back())) {
    throw DomainError(std::string(what) + " " + std::to_string(at) + " outside the profile range");
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double x0 = x_of(knots[i - 1]);
    const double x1 = x_of(knots[i]);
    if (at == x0) return knots[i - 1].ap;
    if (at == x1) return knots[i].ap;
    if (at < x1) {
      const double f = (at - x0) / (x1 - x0);
      return knots[i - 1].ap + f * (knots[i].ap - knots[i - 1].ap);
    }
  }
  return knots.back().ap;
}

}  // namespace

double ap_at(const DetectorProfile& profile, double iou_threshold) {
  if (profile.ap_vs_iou.empty()) throw InvariantError("profile has no ap_vs_iou knots");
  return interpolate(profile.ap_vs_iou, iou_threshold,
                     [](const IouKnot& k) { return k.iou_threshold; }, "IoU threshold");
}

double ap_at_distance(const DetectorProfile& profile, double distance_cm, std::string_view image_size) {
  std::vector<DistanceKnot> knots;
  for (const auto& k : profile.ap_vs_distance) {
    if (k.image_size == image_size) knots.push_back(k);
  }
  if (knots.empty()) {
    throw DomainError("profile has no distance data for image size " + std::string(image_size));
  }
  std::stable_sort(knots.begin(), knots.end(),
                   [](const auto& a, const auto& b) { return a.distance_cm < b.distance_cm; });
  return interpolate(knots, distance_cm, [](const DistanceKnot& k) { return k.distance_cm; }, "distance");
}

void SyntheticScene::validate() const {
  grid.validate();
  for (const auto& r : receivers) {
    const BBox& b = r.object.bbox;
    if (!b.valid() || b.x < 0.0 || b.y < 0.0 || b.right() > grid.image_width ||
        b.bottom() > grid.image_height) {
      throw InvariantError("scene receiver box lies outside the image");
    }
  }
}

std::vector<Detection> sample_detections(const SyntheticScene& scene, const DetectorProfile& profile,
                                         double iou_threshold, std::uint64_t rng_seed,
                                         const SamplerOptions& options) {
  scene.validate();
  const double p_correct = ap_at(profile, iou_threshold);
  const std::size_t n_cells = scene.grid.n_cells();

  std::vector<Detection> out;
  out.reserve(scene.receivers.size());
  for (std::size_t i = 0; i < scene.receivers.size(); ++i) {
    const GroundTruthObject& gt = scene.receivers[i].object;
    Rng rng(stream_seed(rng_seed, i));
    Detection d{gt.image_id, gt.bbox, 0.0, gt.class_label};
    const bool correct = rng.bernoulli(p_correct) || n_cells < 2;
    if (correct) {
      d.score = rng.uniform(options.correct_score_min, options.correct_score_max);
    } else {
      const auto center = geometry::bbox_center(gt.bbox);
      const std::size_t true_cell = geometry::cell_of_point(scene.grid, center.x, center.y);
      auto cell = static_cast<std::size_t>(rng.below(n_cells - 1));
      if (cell >= true_cell) ++cell;
      const auto c = geometry::cell_center(scene.grid, cell);
      d.bbox.x = c.x - gt.bbox.w / 2.0;
      d.bbox.y = c.y - gt.bbox.h / 2.0;
      d.score = rng.uniform(options.wrong_score_min, options.wrong_score_max);
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<std::size_t> detections_to_candidates(std::span<const Detection> dets,
                                                  const geometry::CellGrid& grid) {
  for (const auto& d : dets) {
    if (d.image_id != dets.front().image_id) {
      throw UsageError("detections_to_candidates: detections span several images");
    }
  }
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });

  std::vector<std::size_t> cells;
  for (std::size_t i : order) {
    const auto c = geometry::bbox_center(dets[i].bbox);
    const std::size_t cell = geometry::cell_of_point(grid, c.x, c.y);
    if (std::find(cells.begin(), cells.end(), cell) == cells.end()) cells.push_back(cell);
  }
  return cells;
}

scanning::SimulationSummary simulate_detection_pipeline(const geometry::CellGrid& grid,
                                                        const DetectorProfile& profile,
                                                        double iou_threshold,
                                                        const scanning::ScanConfig& cfg,
                                                        std::uint64_t rng_seed, std::size_t trials,
                                                        const PipelineOptions& options) {
  grid.validate();
  profile.validate();
  scanning::ScanConfig scan = cfg;
  scan.n_cells = grid.n_cells();
  scan.ap = ap_at(profile, iou_threshold);
  scan.validate();
  if (scan.n_cells < 2) throw UsageError("pipeline simulation needs at least two cells");

  auto sampler = [&](Rng& rng) {
    const auto cell = static_cast<std::size_t>(rng.below(scan.n_cells));
    const auto rect = geometry::cell_rect(grid, cell);
    const double w = std::min(options.receiver_w_px, rect.w);
    const double h = std::min(options.receiver_h_px, rect.h);
    const auto c = geometry::cell_center(grid, cell);

    SyntheticScene scene{grid, {}};
    GroundTruthObject gt{"episode", {c.x - w / 2.0, c.y - h / 2.0, w, h}, ReceiverClass::kSmartphone};
    scene.receivers.push_back({gt, 0.0});

    const auto center = geometry::bbox_center(gt.bbox);
    const std::size_t true_cell = geometry::cell_of_point(grid, center.x, center.y);
    const auto dets = sample_detections(scene, profile, iou_threshold, rng.next(), options.sampler);
    const auto candidates = detections_to_candidates(dets, grid);
    const std::array<std::size_t, 1> truth{true_cell};
    return scanning::run_episode(scan, candidates, truth, scanning::Strategy::kGuided);
  };

  auto summary = scanning::simulate(scan, rng_seed, trials, scanning::Strategy::kGuided, sampler, options.run);
  summary.analytic_time_s = scanning::t2_analytic(scan);
  return summary;
}

}  // namespace rbcscan::detector
