// rbcscan: scan-time analysis, simulation, detection metrics and camera geometry.
//
// Exit status: 0 success, 1 file or schema error, 2 invariant violation,
// 3 usage error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rbcscan/commands.hpp"
#include "rbcscan/errors.hpp"
#include "rbcscan/io.hpp"

namespace {

using namespace rbcscan;

constexpr int kUsageExit = 3;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    io::write_file(out_path, text);
  }
}

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw UsageError(std::string(what) + " must look like AxB, got '" + text + "'");
  try {
    return {io::parse_number(text.substr(0, x)), io::parse_number(text.substr(x + 1))};
  } catch (const SchemaError&) {
    throw UsageError(std::string(what) + " must look like AxB, got '" + text + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detection-guided receiver scanning: analytic model, simulation, metrics, geometry"};
  app.require_subcommand(1);
  std::string out_path;

  // eval
  auto* eval = app.add_subcommand("eval", "COCO-style AP / mAP / AP_S of detections against annotations");
  std::string gt_path, det_path;
  std::vector<double> thresholds;
  metrics::EvalOptions eval_opts;
  eval->add_option("--gt", gt_path, "annotation file")->required()->check(CLI::ExistingFile);
  eval->add_option("--det", det_path, "detection file")->required()->check(CLI::ExistingFile);
  eval->add_option("--thresholds", thresholds, "IoU thresholds (default 0.50:0.05:0.95)")->delimiter(',');
  eval->add_option("--small-cutoff", eval_opts.small_cutoff_px, "AP_S area cutoff side, px")->capture_default_str();
  eval->add_option("--workers", eval_opts.workers, "matching threads")->capture_default_str();
  eval->add_option("-o,--output", out_path, "write CSV here instead of stdout");

  // analytic
  auto* analytic = app.add_subcommand("analytic", "T1 and T2 over an AP grid, with the breakeven AP");
  scanning::ScanConfig scan_cfg;
  double ap_min = 0.0, ap_max = 1.0;
  std::size_t points = 21;
  std::vector<double> ap_list;
  analytic->add_option("--n-cells", scan_cfg.n_cells, "number of scan cells N")->capture_default_str();
  analytic->add_option("--t-scan", scan_cfg.t_scan_s, "seconds per cell scan")->capture_default_str();
  analytic->add_option("--t-detect", scan_cfg.t_detect_s, "detector latency, seconds")->capture_default_str();
  auto* ap_min_opt = analytic->add_option("--ap-min", ap_min, "first AP of the grid")->capture_default_str();
  analytic->add_option("--ap-max", ap_max, "last AP of the grid")->capture_default_str();
  analytic->add_option("--points", points, "grid size")->capture_default_str();
  analytic->add_option("--ap", ap_list, "explicit AP values")->delimiter(',')->excludes(ap_min_opt);
  analytic->add_option("-o,--output", out_path, "write CSV here instead of stdout");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo traditional vs. guided scanning");
  std::string scenario_path;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  simulate->add_option("scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--trials", trials, "override the scenario's trial count");
  simulate->add_option("--seed", seed, "override the scenario's seed");
  simulate->add_option("--workers", workers, "simulation threads")->capture_default_str();
  simulate->add_option("-o,--output", out_path, "write CSV here instead of stdout");

  // geometry
  auto* geometry = app.add_subcommand("geometry", "projected receiver size and detectability");
  auto request = commands::default_geometry_request();
  std::optional<double> focal;
  std::string ref_res = "1280x720", receiver = "14x7", min_size = "30x15";
  std::vector<double> distances;
  std::vector<std::string> resolutions;
  geometry->add_option("--focal", focal, "focal length in px at the reference resolution (default: 120 cm / 124 px calibration)");
  geometry->add_option("--reference", ref_res, "reference resolution WxH")->capture_default_str();
  geometry->add_option("--receiver", receiver, "receiver size in cm, WxH")->capture_default_str();
  geometry->add_option("--distances", distances, "distances in cm")->delimiter(',');
  geometry->add_option("--resolutions", resolutions, "output resolutions WxH")->delimiter(',');
  geometry->add_option("--min-size", min_size, "detectability floor in px, LONGxSHORT")->capture_default_str();
  geometry->add_option("-o,--output", out_path, "write CSV here instead of stdout");

  // augment
  auto* augment = app.add_subcommand("augment", "double an annotation file with mirrored copies");
  std::string aug_in;
  augment->add_option("input", aug_in, "annotation file")->required()->check(CLI::ExistingFile);
  augment->add_option("-o,--output", out_path, "write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  try {
    if (eval->parsed()) {
      if (!thresholds.empty()) eval_opts.thresholds = thresholds;
      const auto gt = io::load_annotations(gt_path);
      const auto dets = io::load_detections(det_path);
      emit(commands::eval_csv(commands::run_eval(gt, dets, eval_opts), eval_opts), out_path);
    } else if (analytic->parsed()) {
      const auto table = ap_list.empty() ? commands::analytic_table(scan_cfg, ap_min, ap_max, points)
                                         : commands::analytic_table(scan_cfg, ap_list);
      emit(io::emit_analytic_csv(table), out_path);
    } else if (simulate->parsed()) {
      auto scenario = io::load_scenario(scenario_path);
      if (trials) scenario.trials = *trials;
      if (seed) scenario.seed = *seed;
      emit(io::emit_simulation_csv(commands::run_scenario(scenario, workers)), out_path);
    } else if (geometry->parsed()) {
      const auto [rw, rh] = parse_pair(ref_res, "--reference");
      request.camera.ref_width = static_cast<int>(rw);
      request.camera.ref_height = static_cast<int>(rh);
      if (focal) request.camera.focal_px = *focal;
      const auto [cw, ch] = parse_pair(receiver, "--receiver");
      request.receiver.width_cm = cw;
      request.receiver.height_cm = ch;
      const auto [ml, ms] = parse_pair(min_size, "--min-size");
      request.min_long_px = ml;
      request.min_short_px = ms;
      if (!distances.empty()) request.distances_cm = distances;
      if (!resolutions.empty()) {
        request.resolutions.clear();
        for (const auto& r : resolutions) {
          const auto [w, h] = parse_pair(r, "--resolutions");
          request.resolutions.emplace_back(static_cast<int>(w), static_cast<int>(h));
        }
      }
      emit(commands::geometry_csv(commands::geometry_table(request)), out_path);
    } else if (augment->parsed()) {
      emit(io::emit_annotations(commands::augment(io::load_annotations(aug_in))), out_path);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
