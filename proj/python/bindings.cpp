#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include "rbcscan/commands.hpp"
#include "rbcscan/detector_model.hpp"
#include "rbcscan/errors.hpp"
#include "rbcscan/geometry.hpp"
#include "rbcscan/io.hpp"
#include "rbcscan/metrics.hpp"
#include "rbcscan/scanning.hpp"

namespace py = pybind11;
using namespace rbcscan;

namespace {

void bind_types(py::module_& m) {
  py::enum_<ReceiverClass>(m, "ReceiverClass")
      .value("smartphone", ReceiverClass::kSmartphone)
      .value("laptop", ReceiverClass::kLaptop)
      .value("lamp", ReceiverClass::kLamp)
      .value("iot_device", ReceiverClass::kIotDevice);

  py::class_<BBox>(m, "BBox")
      .def(py::init<double, double, double, double>(), py::arg("x"), py::arg("y"), py::arg("w"), py::arg("h"))
      .def_readwrite("x", &BBox::x)
      .def_readwrite("y", &BBox::y)
      .def_readwrite("w", &BBox::w)
      .def_readwrite("h", &BBox::h)
      .def_property_readonly("area", &BBox::area)
      .def(py::self == py::self)
      .def("__repr__", [](const BBox& b) {
        return "BBox(" + io::format_number(b.x) + ", " + io::format_number(b.y) + ", " + io::format_number(b.w) +
               ", " + io::format_number(b.h) + ")";
      });

  py::class_<Detection>(m, "Detection")
      .def(py::init([](std::string image_id, BBox bbox, double score, ReceiverClass label) {
             return Detection{std::move(image_id), bbox, score, label};
           }),
           py::arg("image_id"), py::arg("bbox"), py::arg("score"),
           py::arg("class_label") = ReceiverClass::kSmartphone)
      .def_readwrite("image_id", &Detection::image_id)
      .def_readwrite("bbox", &Detection::bbox)
      .def_readwrite("score", &Detection::score)
      .def_readwrite("class_label", &Detection::class_label);

  py::class_<GroundTruthObject>(m, "GroundTruthObject")
      .def(py::init([](std::string image_id, BBox bbox, ReceiverClass label) {
             return GroundTruthObject{std::move(image_id), bbox, label};
           }),
           py::arg("image_id"), py::arg("bbox"), py::arg("class_label") = ReceiverClass::kSmartphone)
      .def_readwrite("image_id", &GroundTruthObject::image_id)
      .def_readwrite("bbox", &GroundTruthObject::bbox)
      .def_readwrite("class_label", &GroundTruthObject::class_label);
}

void bind_geometry(py::module_& m) {
  using namespace rbcscan::geometry;
  py::class_<CameraModel>(m, "CameraModel")
      .def(py::init<double, int, int>(), py::arg("focal_px"), py::arg("ref_width"), py::arg("ref_height"))
      .def_readwrite("focal_px", &CameraModel::focal_px)
      .def_readwrite("ref_width", &CameraModel::ref_width)
      .def_readwrite("ref_height", &CameraModel::ref_height);

  py::class_<CellGrid>(m, "CellGrid")
      .def(py::init<int, int, int, int>(), py::arg("rows"), py::arg("cols"), py::arg("image_width"),
           py::arg("image_height"))
      .def_readwrite("rows", &CellGrid::rows)
      .def_readwrite("cols", &CellGrid::cols)
      .def_readwrite("image_width", &CellGrid::image_width)
      .def_readwrite("image_height", &CellGrid::image_height)
      .def_property_readonly("n_cells", &CellGrid::n_cells);

  m.def("calibrate_focal", &calibrate_focal, py::arg("object_cm"), py::arg("distance_cm"), py::arg("observed_px"));
  m.def(
      "project_size",
      [](const CameraModel& cam, double width_cm, double height_cm, double distance_cm, int out_w, int out_h) {
        const auto p = project_size(cam, {width_cm, height_cm, ReceiverClass::kSmartphone}, distance_cm, out_w, out_h);
        return py::make_tuple(p.w_px, p.h_px);
      },
      py::arg("camera"), py::arg("width_cm"), py::arg("height_cm"), py::arg("distance_cm"), py::arg("out_width"),
      py::arg("out_height"), "Projected (w_px, h_px) of a receiver facing the lens.");
  m.def(
      "is_detectable", [](double w, double h, double min_w, double min_h) { return is_detectable({w, h}, min_w, min_h); },
      py::arg("w_px"), py::arg("h_px"), py::arg("min_w") = kMinDetectableLongPx,
      py::arg("min_h") = kMinDetectableShortPx);
  m.def("cell_of_point", &cell_of_point, py::arg("grid"), py::arg("x"), py::arg("y"));
  m.def(
      "bbox_center",
      [](const BBox& b) {
        const auto c = bbox_center(b);
        return py::make_tuple(c.x, c.y);
      },
      py::arg("bbox"));
}

py::dict to_dict(const metrics::EvalResult& r) {
  py::dict d;
  d["ap_per_threshold"] = r.ap_per_threshold;
  d["map"] = r.map_value;
  d["ap_small"] = r.ap_small;
  return d;
}

void bind_metrics(py::module_& m) {
  using namespace rbcscan::metrics;
  m.def("iou", &iou, py::arg("a"), py::arg("b"));
  m.def("average_precision", &average_precision, py::arg("tp_flags"), py::arg("total_gt"));
  m.def("default_iou_thresholds", &default_iou_thresholds);
  m.def(
      "match_detections",
      [](const std::vector<Detection>& dets, const std::vector<GroundTruthObject>& gts, double threshold) {
        const auto r = match_detections(dets, gts, threshold);
        return py::make_tuple(r.det_is_tp, r.gt_matched);
      },
      py::arg("detections"), py::arg("ground_truth"), py::arg("iou_threshold"),
      "Returns (per-detection TP flags, per-GT matched flags).");
  m.def(
      "evaluate",
      [](const std::vector<Detection>& dets, const std::vector<GroundTruthObject>& gts,
         std::optional<std::vector<double>> thresholds, double small_cutoff_px) {
        EvalOptions opts;
        if (thresholds) opts.thresholds = *thresholds;
        opts.small_cutoff_px = small_cutoff_px;
        return to_dict(evaluate(dets, gts, opts));
      },
      py::arg("detections"), py::arg("ground_truth"), py::arg("thresholds") = py::none(),
      py::arg("small_cutoff_px") = kDefaultSmallCutoffPx);
  m.def("flip_augment", &flip_augment, py::arg("gt"), py::arg("image_width"));
}

void bind_scanning(py::module_& m) {
  using namespace rbcscan::scanning;
  py::class_<ScanConfig>(m, "ScanConfig")
      .def(py::init([](std::size_t n, double ts, double td, double ap) { return ScanConfig{n, ts, td, ap}; }),
           py::arg("n_cells") = 64, py::arg("t_scan_s") = 2.0, py::arg("t_detect_s") = 0.2, py::arg("ap") = 0.70)
      .def_readwrite("n_cells", &ScanConfig::n_cells)
      .def_readwrite("t_scan_s", &ScanConfig::t_scan_s)
      .def_readwrite("t_detect_s", &ScanConfig::t_detect_s)
      .def_readwrite("ap", &ScanConfig::ap);

  py::class_<SimulationSummary>(m, "SimulationSummary")
      .def_readonly("trials", &SimulationSummary::trials)
      .def_readonly("mean_time_s", &SimulationSummary::mean_time_s)
      .def_readonly("stderr_s", &SimulationSummary::stderr_s)
      .def_readonly("analytic_time_s", &SimulationSummary::analytic_time_s)
      .def_property_readonly("relative_error", &SimulationSummary::relative_error);

  m.def("t1_analytic", &t1_analytic, py::arg("cfg"));
  m.def("t2_analytic", &t2_analytic, py::arg("cfg"));
  m.def(
      "breakeven_ap",
      [](const ScanConfig& cfg) {
        const auto b = breakeven_ap(cfg);
        return py::make_tuple(b.ap, b.in_range);
      },
      py::arg("cfg"), "Returns (clamped AP*, whether AP* fell inside [0, 1]).");

  const auto gil = py::call_guard<py::gil_scoped_release>();
  m.def(
      "simulate_traditional",
      [](const ScanConfig& cfg, std::uint64_t seed, std::size_t trials, std::size_t workers) {
        return simulate_traditional(cfg, seed, trials, {workers});
      },
      py::arg("cfg"), py::arg("seed"), py::arg("trials"), py::arg("workers") = 1, gil);
  m.def(
      "simulate_guided",
      [](const ScanConfig& cfg, std::uint64_t seed, std::size_t trials, std::size_t workers) {
        return simulate_guided(cfg, seed, trials, {workers});
      },
      py::arg("cfg"), py::arg("seed"), py::arg("trials"), py::arg("workers") = 1, gil);
  m.def(
      "simulate_guided_multi",
      [](const ScanConfig& cfg, const std::vector<std::size_t>& candidates, const std::vector<std::size_t>& truth,
         std::uint64_t seed, std::size_t trials) { return simulate_guided_multi(cfg, candidates, truth, seed, trials); },
      py::arg("cfg"), py::arg("candidate_cells"), py::arg("true_cells"), py::arg("seed"), py::arg("trials"), gil);
}

void bind_detector(py::module_& m) {
  using namespace rbcscan::detector;
  py::class_<DetectorProfile>(m, "DetectorProfile")
      .def_readonly("name", &DetectorProfile::name)
      .def_readonly("per_image_latency_s", &DetectorProfile::per_image_latency_s)
      .def_readonly("approximate", &DetectorProfile::approximate)
      .def_property_readonly("ap_vs_iou", [](const DetectorProfile& p) {
        std::vector<std::pair<double, double>> out;
        for (const auto& k : p.ap_vs_iou) out.emplace_back(k.iou_threshold, k.ap);
        return out;
      });

  m.def("load_profile", [](const std::string& path) { return io::load_profile(path); }, py::arg("path"));
  m.def("parse_profile", [](const std::string& text) { return io::parse_profile(text); }, py::arg("text"));
  m.def("ap_at", &ap_at, py::arg("profile"), py::arg("iou_threshold"));
  m.def("detections_to_candidates",
        [](const std::vector<Detection>& dets, const geometry::CellGrid& grid) {
          return detections_to_candidates(dets, grid);
        },
        py::arg("detections"), py::arg("grid"));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Detection-guided receiver scanning: metrics, geometry, analytic model and simulation";

  auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<UsageError>(m, "UsageError", base.ptr());

  bind_types(m);
  bind_geometry(m);
  bind_metrics(m);
  bind_scanning(m);
  bind_detector(m);
}
