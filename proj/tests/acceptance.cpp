// Acceptance suite: one line per criterion, nonzero exit if any fails.
// `--only <name>` runs a single criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rbcscan/commands.hpp"
#include "rbcscan/detector_model.hpp"
#include "rbcscan/geometry.hpp"
#include "rbcscan/io.hpp"
#include "rbcscan/metrics.hpp"
#include "rbcscan/scanning.hpp"

using namespace rbcscan;

namespace {

const std::string kDataDir = RBCSCAN_DATA_DIR;
const scanning::ScanConfig kPaper{64, 2.0, 0.2, 0.70};
constexpr std::uint64_t kSeed = 20190601;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "FAILED " << what << "; ";
    }
  }
};

struct Criterion {
  std::string name;
  std::function<void(Outcome&)> run;
};

scanning::ScanConfig at_ap(double ap) {
  auto c = kPaper;
  c.ap = ap;
  return c;
}

void eq1(Outcome& o) {
  const double t1 = scanning::t1_analytic(kPaper);
  o.detail << "T1 = " << t1 << " s; ";
  o.require(std::abs(t1 - 65.0) <= 1e-12, "|T1 - 65| <= 1e-12");
}

void eq2(Outcome& o) {
  const double t1 = scanning::t1_analytic(kPaper);
  const double t2 = scanning::t2_analytic(kPaper);
  o.detail << "T2 = " << t2 << " s, T2/T1 = " << t2 / t1 << "; ";
  o.require(std::abs(t2 - 21.4) <= 1e-12, "|T2 - 21.4| <= 1e-12");
  o.require(t2 / t1 <= 1.0 / 3.0 + 0.01, "T2/T1 <= 1/3 + 0.01");
}

void monte_carlo(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto tr = scanning::simulate_traditional(kPaper, kSeed, 1'000'000);
  const auto gd = scanning::simulate_guided(kPaper, kSeed, 1'000'000);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double e1 = std::abs(tr.mean_time_s - 65.0) / 65.0;
  const double e2 = std::abs(gd.mean_time_s - 21.4) / 21.4;
  o.detail << "traditional mean " << tr.mean_time_s << " (rel err " << e1 << "), guided mean " << gd.mean_time_s
           << " (rel err " << e2 << "), " << secs << " s; ";
  o.require(e1 < 0.005, "traditional within 0.5% of 65.0");
  o.require(e2 < 0.005, "guided within 0.5% of 21.4");
  o.require(secs < 10.0, "runtime under 10 s");
}

void small_n(Outcome& o) {
  double worst = 0.0;
  for (std::size_t n = 2; n <= 5; ++n) {
    for (double ts : {0.5, 2.0}) {
      for (double td : {0.0, 0.2}) {
        for (int k = 0; k <= 10; ++k) {
          const scanning::ScanConfig cfg{n, ts, td, k / 10.0};
          worst = std::max(worst, std::abs(oracle::exhaustive_expected_scans(n) * ts - scanning::t1_analytic(cfg)));
          worst = std::max(worst, std::abs(td + oracle::guided_expected_scans(n, cfg.ap) * ts -
                                           scanning::t2_analytic(cfg)));
        }
      }
    }
  }
  o.detail << "max |enumeration - closed form| = " << worst << "; ";
  o.require(worst <= 1e-12, "agreement to 1e-12 for N in {2,3,4,5}");
}

void geometry_reproduction(Outcome& o) {
  const geometry::CameraModel cam{geometry::calibrate_focal(14.0, 120.0, 124.0), 1280, 720};
  const geometry::ReceiverSpec phone{14.0, 7.0};
  const auto full = geometry::project_size(cam, phone, 120.0, 1280, 720);
  const auto half = geometry::project_size(cam, phone, 120.0, 640, 360);
  o.detail << "1280x720: " << full.w_px << "x" << full.h_px << ", 640x360: " << half.w_px << "x" << half.h_px << "; ";
  o.require(std::abs(full.w_px - 124) <= 1 && std::abs(full.h_px - 62) <= 1, "124x62 within 1 px");
  o.require(std::abs(half.w_px - 62) <= 1 && std::abs(half.h_px - 31) <= 1, "62x31 within 1 px");
}

void metrics_oracle(Outcome& o) {
  std::mt19937_64 g(kSeed);
  std::uniform_int_distribution<int> n_det(0, 4), n_gt(0, 3);
  std::uniform_real_distribution<double> pos(0, 20), len(0, 10), score(0, 1), thr(0.05, 1.0);
  auto box = [&] { return BBox{pos(g), pos(g), len(g), len(g)}; };

  double worst = 0.0;
  const int instances = 50000;
  for (int i = 0; i < instances; ++i) {
    std::vector<Detection> dets;
    std::vector<GroundTruthObject> gts;
    for (int k = n_gt(g); k > 0; --k) gts.push_back({"img", box(), ReceiverClass::kSmartphone});
    for (int k = n_det(g); k > 0; --k) dets.push_back({"img", box(), score(g), ReceiverClass::kSmartphone});
    const double t = thr(g);
    const double want = oracle::pr_enumeration_ap(oracle::greedy_flags(dets, gts, t), gts.size());
    metrics::EvalOptions opts;
    opts.thresholds = {t};
    const double got = metrics::evaluate(dets, gts, opts).ap_per_threshold.at(t);
    worst = std::max(worst, std::abs(got - want));
  }
  o.detail << instances << " AP instances, max |AP - oracle| = " << worst << "; ";
  o.require(worst <= 1e-9, "AP equals PR-enumeration oracle to 1e-9");

  std::uniform_real_distribution<double> shift(-100, 100), scale(0.1, 10);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const BBox a{pos(g), pos(g), len(g), len(g)}, b{pos(g), pos(g), len(g), len(g)};
    const double v = metrics::iou(a, b);
    const double dx = shift(g), dy = shift(g), s = scale(g);
    const bool ok = v >= 0.0 && v <= 1.0 && v == metrics::iou(b, a) && (a.area() == 0.0 || metrics::iou(a, a) == 1.0) &&
                    std::abs(metrics::iou({a.x + dx, a.y + dy, a.w, a.h}, {b.x + dx, b.y + dy, b.w, b.h}) - v) <= 1e-9 &&
                    std::abs(metrics::iou({a.x * s, a.y * s, a.w * s, a.h * s}, {b.x * s, b.y * s, b.w * s, b.h * s}) - v) <= 1e-9;
    if (!ok) ++violations;
  }
  o.detail << "IoU axiom violations on 10^4 pairs: " << violations << "; ";
  o.require(violations == 0, "IoU axioms hold");
}

void default_thresholds(Outcome& o) {
  const auto t = metrics::default_iou_thresholds();
  bool exact = t.size() == 10;
  for (std::size_t i = 0; exact && i < t.size(); ++i) exact = std::abs(t[i] - (0.50 + 0.05 * static_cast<double>(i))) <= 1e-12;
  o.require(exact, "thresholds are 0.50, 0.55, ..., 0.95");

  const auto gt = io::load_annotations(kDataDir + "/fixtures/annotations_small.json");
  const auto det = io::load_detections(kDataDir + "/fixtures/detections_small.json");
  const auto r = commands::run_eval(gt, det, {});
  double sum = 0.0;
  for (const auto& [thr, ap] : r.ap_per_threshold) sum += ap;
  o.detail << r.ap_per_threshold.size() << " thresholds, mAP " << r.map_value << "; ";
  o.require(r.ap_per_threshold.size() == 10, "evaluation uses 10 thresholds by default");
  o.require(std::abs(r.map_value - sum / 10.0) <= 1e-12, "map_value is the mean");
}

void digitized_profile(Outcome& o) {
  const auto p = io::load_profile(kDataDir + "/profiles/digitized_from_figures/mask_rcnn_smartphone.json");
  double sum = 0.0;
  for (double t : metrics::default_iou_thresholds()) sum += detector::ap_at(p, t);
  bool monotone = true;
  for (std::size_t i = 1; i < p.ap_vs_iou.size(); ++i) monotone = monotone && p.ap_vs_iou[i].ap <= p.ap_vs_iou[i - 1].ap;
  o.detail << "profile mean AP " << sum / 10.0 << "; ";
  o.require(std::abs(sum / 10.0 - 0.5766) <= 1e-4, "mean AP 0.5766 +- 0.0001");
  o.require(monotone, "AP non-increasing in IoU threshold");

  const geometry::CellGrid grid{8, 8, 1280, 720};
  const auto pipeline = detector::simulate_detection_pipeline(grid, p, 0.5, kPaper, kSeed, 1'000'000);
  const auto guided = scanning::simulate_guided(at_ap(detector::ap_at(p, 0.5)), kSeed + 1, 1'000'000);
  const double rel = std::abs(pipeline.mean_time_s - guided.mean_time_s) / guided.mean_time_s;
  o.detail << "pipeline mean " << pipeline.mean_time_s << " vs guided " << guided.mean_time_s << " (rel " << rel << "); ";
  o.require(rel < 0.01, "end-to-end pipeline within 1% of simulate_guided");
}

void breakeven(Outcome& o) {
  const auto b = scanning::breakeven_ap(kPaper);
  const double t1 = scanning::t1_analytic(kPaper);
  const double t2_at_b = scanning::t2_analytic(at_ap(b.ap));
  const double t2_at_stated = scanning::t2_analytic(at_ap(0.05));
  o.detail << "breakeven_ap = " << b.ap << ", T2(breakeven) = " << t2_at_b << ", T1 = " << t1
           << ", T2(0.05) = " << t2_at_stated << "; ";
  o.require(std::abs(b.ap - 0.05) <= 1e-12, "breakeven_ap == 0.05 to 1e-12");
  o.require(std::abs(t2_at_b - t1) <= 1e-12, "T2(breakeven) == T1 to 1e-12");
}

void file_formats(Outcome& o) {
  const auto ann = io::load_annotations(kDataDir + "/fixtures/annotations_small.json");
  const auto det = io::load_detections(kDataDir + "/fixtures/detections_small.json");
  const auto prof = io::load_profile(kDataDir + "/profiles/digitized_from_figures/mask_rcnn_smartphone.json");
  const auto scen = io::load_scenario(kDataDir + "/scenarios/reference_setup.json");
  o.require(io::parse_annotations(io::emit_annotations(ann)) == ann, "annotation round trip");
  o.require(io::parse_detections(io::emit_detections(det)) == det, "detection round trip");
  o.require(io::parse_profile(io::emit_profile(prof)) == prof, "profile round trip");
  const auto scen2 = io::parse_scenario(io::emit_scenario(scen), kDataDir + "/scenarios");
  o.require(io::emit_scenario(scen2) == io::emit_scenario(scen) && scen2.scan == scen.scan, "scenario round trip");

  const std::vector<io::SimulationRow> sim{{"traditional", scanning::simulate_traditional(kPaper, 1, 1000)}};
  // parse . emit . parse == parse, compared through the emitted text
  const auto sim_text = io::emit_simulation_csv(io::parse_simulation_csv(io::emit_simulation_csv(sim)));
  o.require(io::emit_simulation_csv(io::parse_simulation_csv(sim_text)) == sim_text, "simulation CSV round trip");
  const auto an_text = io::emit_analytic_csv(commands::analytic_table(kPaper, 0.0, 1.0, 21));
  o.require(io::emit_analytic_csv(io::parse_analytic_csv(an_text)) == an_text, "analytic CSV round trip");

  const auto doubled = commands::augment(ann);
  const auto quadrupled = commands::augment(doubled);
  o.detail << "objects " << ann.objects.size() << " -> " << doubled.objects.size() << " -> " << quadrupled.objects.size()
           << "; ";
  o.require(doubled.objects.size() == 2 * ann.objects.size(), "augment doubles");
  o.require(quadrupled.objects.size() == 4 * ann.objects.size(), "re-augment quadruples");

  std::mt19937_64 g(kSeed);
  std::uniform_int_distribution<int> width(1, 4096);
  int failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const int w = width(g);
    std::uniform_int_distribution<int> q(0, 4 * w);
    int a = q(g), b = q(g);
    if (a > b) std::swap(a, b);
    const GroundTruthObject obj{"img", {a / 4.0, q(g) / 4.0, (b - a) / 4.0, q(g) / 4.0}, ReceiverClass::kSmartphone};
    const auto once = metrics::flip_augment(obj, w);
    if (!(metrics::flip_augment(once, w) == obj) || once.bbox.area() != obj.bbox.area()) ++failures;
  }
  o.detail << "flip involution failures on 10^4 boxes: " << failures << "; ";
  o.require(failures == 0, "flip_augment is an involution");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"eq1_exhaustive_scan_time", eq1},
      {"eq2_guided_scan_time", eq2},
      {"monte_carlo_convergence", monte_carlo},
      {"small_n_exact_oracle", small_n},
      {"geometry_reproduction", geometry_reproduction},
      {"metrics_oracle_suite", metrics_oracle},
      {"default_thresholds_and_map", default_thresholds},
      {"digitized_profile_and_pipeline", digitized_profile},
      {"breakeven_ap", breakeven},
      {"file_formats_and_augment", file_formats},
  };

  std::string only;
  if (argc == 3 && std::string(argv[1]) == "--only") only = argv[2];
  if (argc == 2 && std::string(argv[1]) == "--list") {
    for (const auto& c : criteria) std::printf("%s\n", c.name.c_str());
    return 0;
  }

  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && c.name != only) continue;
    Outcome o;
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    ++ran;
    if (!o.pass) ++failed;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.str().c_str());
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 3;
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
