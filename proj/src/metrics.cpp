#include "rbcscan/metrics.hpp"

#include <algorithm>
#include <future>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "rbcscan/errors.hpp"

namespace rbcscan::metrics {

double iou(const BBox& a, const BBox& b) noexcept {
  const double iw = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const double ih = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const double inter = iw * ih;
  // areas from the same edge differences, so iou(a, a) is exactly 1
  const double area_a = (a.right() - a.x) * (a.bottom() - a.y);
  const double area_b = (b.right() - b.x) * (b.bottom() - b.y);
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

namespace {

// Indices sorted by descending score, stable so ties keep input order.
std::vector<std::size_t> score_order(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  return order;
}

}  // namespace

MatchResult match_detections(std::span<const Detection> dets, std::span<const GroundTruthObject> gts,
                             double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw UsageError("iou_threshold must lie in (0, 1]");
  }
  const std::string* image = nullptr;
  const ReceiverClass* label = nullptr;
  auto check = [&](const std::string& id, const ReceiverClass& c) {
    if (image == nullptr) {
      image = &id;
      label = &c;
    } else if (*image != id) {
      throw UsageError("match_detections: mixed image ids '" + *image + "' and '" + id + "'");
    } else if (*label != c) {
      throw UsageError("match_detections: mixed class labels on image '" + id + "'");
    }
  };
  for (const auto& d : dets) check(d.image_id, d.class_label);
  for (const auto& g : gts) check(g.image_id, g.class_label);

  MatchResult result;
  result.det_is_tp.assign(dets.size(), false);
  result.det_matched_gt.assign(dets.size(), -1);
  result.gt_matched.assign(gts.size(), false);

  for (std::size_t di : score_order(dets)) {
    double best = -1.0;
    long best_gt = -1;
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      if (result.gt_matched[gi]) continue;
      const double overlap = iou(dets[di].bbox, gts[gi].bbox);
      if (overlap > best) {
        best = overlap;
        best_gt = static_cast<long>(gi);
      }
    }
    if (best_gt >= 0 && best >= iou_threshold) {
      result.det_is_tp[di] = true;
      result.det_matched_gt[di] = best_gt;
      result.gt_matched[static_cast<std::size_t>(best_gt)] = true;
    }
  }
  return result;
}

double average_precision(const std::vector<bool>& tp_flags, std::size_t total_gt) {
  if (total_gt == 0) return tp_flags.empty() ? 1.0 : 0.0;
  if (tp_flags.empty()) return 0.0;

  const std::size_t n = tp_flags.size();
  std::vector<double> recall(n);
  std::vector<double> precision(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (tp_flags[i]) ++tp;
    recall[i] = static_cast<double>(tp) / static_cast<double>(total_gt);
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  for (std::size_t i = n - 1; i > 0; --i) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }

  double sum = 0.0;
  std::size_t idx = 0;
  for (std::size_t r = 0; r < kRecallSamples; ++r) {
    const double level = static_cast<double>(r) / static_cast<double>(kRecallSamples - 1);
    // recall is non-decreasing, so the search pointer only moves forward
    while (idx < n && recall[idx] < level) ++idx;
    if (idx == n) break;
    sum += precision[idx];
  }
  return sum / static_cast<double>(kRecallSamples);
}

std::vector<double> default_iou_thresholds() {
  std::vector<double> out;
  for (int i = 0; i < 10; ++i) out.push_back(static_cast<double>(50 + 5 * i) / 100.0);
  return out;
}

namespace {

struct Group {
  std::vector<std::size_t> det_idx;
  std::vector<std::size_t> gt_idx;
};

using GroupKey = std::pair<std::string, ReceiverClass>;

struct Grouped {
  std::map<GroupKey, Group> groups;
  std::set<ReceiverClass> classes_with_gt;
};

Grouped group_by_image_and_class(std::span<const Detection> dets,
                                 std::span<const GroundTruthObject> gts) {
  Grouped g;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    g.groups[{dets[i].image_id, dets[i].class_label}].det_idx.push_back(i);
  }
  for (std::size_t i = 0; i < gts.size(); ++i) {
    g.groups[{gts[i].image_id, gts[i].class_label}].gt_idx.push_back(i);
    g.classes_with_gt.insert(gts[i].class_label);
  }
  return g;
}

enum class Outcome : unsigned char { kFalsePositive, kTruePositive, kIgnored };

// Per-detection outcome (indexed like `dets`) for one threshold. `counts`
// marks which GT participate; detections matched to other GT are ignored.
template <typename GtFilter>
std::vector<Outcome> match_all(std::span<const Detection> dets, std::span<const GroundTruthObject> gts,
                               const Grouped& grouped, double threshold, std::size_t workers,
                               GtFilter&& counts) {
  std::vector<Outcome> outcome(dets.size(), Outcome::kFalsePositive);
  std::vector<const Group*> jobs;
  for (const auto& [key, group] : grouped.groups) jobs.push_back(&group);

  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const Group& group = *jobs[j];
      std::vector<Detection> d;
      std::vector<GroundTruthObject> g;
      for (auto i : group.det_idx) d.push_back(dets[i]);
      for (auto i : group.gt_idx) g.push_back(gts[i]);
      const MatchResult m = match_detections(d, g, threshold);
      for (std::size_t k = 0; k < d.size(); ++k) {
        Outcome o = Outcome::kFalsePositive;
        if (m.det_is_tp[k]) {
          const auto gt_index = group.gt_idx[static_cast<std::size_t>(m.det_matched_gt[k])];
          o = counts(gts[gt_index]) ? Outcome::kTruePositive : Outcome::kIgnored;
        }
        // each detection belongs to exactly one group, so writes never collide
        outcome[group.det_idx[k]] = o;
      }
    }
  };

  const std::size_t n_workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(jobs.size(), 1));
  if (n_workers == 1) {
    run(0, jobs.size());
  } else {
    std::vector<std::future<void>> futures;
    const std::size_t chunk = (jobs.size() + n_workers - 1) / n_workers;
    for (std::size_t begin = 0; begin < jobs.size(); begin += chunk) {
      futures.push_back(std::async(std::launch::async, run, begin, std::min(jobs.size(), begin + chunk)));
    }
    for (auto& f : futures) f.get();
  }
  return outcome;
}

double class_ap(std::span<const Detection> dets, const std::vector<std::size_t>& global_order,
                const std::vector<Outcome>& outcome, ReceiverClass label, std::size_t total_gt) {
  std::vector<bool> flags;
  for (auto i : global_order) {
    if (dets[i].class_label != label || outcome[i] == Outcome::kIgnored) continue;
    flags.push_back(outcome[i] == Outcome::kTruePositive);
  }
  return average_precision(flags, total_gt);
}

double dataset_ap(std::span<const Detection> dets, std::span<const GroundTruthObject> gts,
                  const std::vector<std::size_t>& global_order, const std::vector<Outcome>& outcome,
                  const auto& counts) {
  std::map<ReceiverClass, std::size_t> gt_per_class;
  for (const auto& g : gts) {
    if (counts(g)) ++gt_per_class[g.class_label];
  }
  if (gt_per_class.empty()) {
    std::vector<bool> flags;
    for (auto i : global_order) {
      if (outcome[i] != Outcome::kIgnored) flags.push_back(outcome[i] == Outcome::kTruePositive);
    }
    return average_precision(flags, 0);
  }
  double sum = 0.0;
  for (const auto& [label, n] : gt_per_class) sum += class_ap(dets, global_order, outcome, label, n);
  return sum / static_cast<double>(gt_per_class.size());
}

}  // namespace

EvalResult evaluate(std::span<const Detection> dets, std::span<const GroundTruthObject> gts,
                    const EvalOptions& options) {
  if (options.thresholds.empty()) throw UsageError("evaluate: threshold list is empty");
  for (double t : options.thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw UsageError("evaluate: thresholds must lie in (0, 1]");
  }
  if (!(options.small_cutoff_px > 0.0)) throw UsageError("evaluate: small cutoff must be positive");

  const Grouped grouped = group_by_image_and_class(dets, gts);
  const std::vector<std::size_t> order = score_order(dets);
  const auto all = [](const GroundTruthObject&) { return true; };

  EvalResult result;
  double sum = 0.0;
  for (double t : options.thresholds) {
    const auto outcome = match_all(dets, gts, grouped, t, options.workers, all);
    const double ap = dataset_ap(dets, gts, order, outcome, all);
    result.ap_per_threshold[t] = ap;
  }
  for (const auto& [t, ap] : result.ap_per_threshold) sum += ap;
  result.map_value = sum / static_cast<double>(result.ap_per_threshold.size());

  const double cutoff_area = options.small_cutoff_px * options.small_cutoff_px;
  const auto small = [cutoff_area](const GroundTruthObject& g) { return g.bbox.area() < cutoff_area; };
  const auto outcome = match_all(dets, gts, grouped, options.small_iou_threshold, options.workers, small);
  result.ap_small = dataset_ap(dets, gts, order, outcome, small);
  return result;
}

GroundTruthObject flip_augment(const GroundTruthObject& gt, int image_width) {
  if (!gt.bbox.valid() || gt.bbox.x < 0.0 || gt.bbox.right() > image_width) {
    throw DomainError("flip_augment: box exceeds image width " + std::to_string(image_width));
  }
  GroundTruthObject out = gt;
  out.bbox.x = image_width - gt.bbox.x - gt.bbox.w;
  return out;
}

}  // namespace rbcscan::metrics
