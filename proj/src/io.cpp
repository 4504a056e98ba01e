#include "rbcscan/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rbcscan/errors.hpp"

namespace rbcscan::io {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Read-only cursor into a parsed document that remembers its JSON path.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

  // Requires an object whose keys are all in `allowed`.
  const Node& object(std::initializer_list<std::string_view> allowed) const {
    if (!value_.is_object()) fail("expected an object");
    for (const auto& [key, _] : value_.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        throw SchemaError(child_path(key) + ": unknown field");
      }
    }
    return *this;
  }

  bool has(std::string_view key) const { return value_.contains(key); }

  Node operator[](std::string_view key) const {
    if (!value_.contains(key)) throw SchemaError(child_path(key) + ": missing required field");
    return {value_.at(std::string(key)), child_path(key)};
  }

  std::vector<Node> array() const {
    if (!value_.is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < value_.size(); ++i) {
      out.emplace_back(value_[i], path_ + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    const double v = value_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  long long integer() const {
    if (!value_.is_number_integer()) fail("expected an integer");
    return value_.get<long long>();
  }

  std::uint64_t unsigned_integer() const {
    if (!value_.is_number_integer()) fail("expected an integer");
    if (value_.is_number_unsigned()) return value_.get<std::uint64_t>();
    const auto v = value_.get<long long>();
    if (v < 0) invalid("expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
  }

  int positive_int() const {
    const long long v = integer();
    if (v <= 0 || v > std::numeric_limits<int>::max()) invalid("expected a positive integer");
    return static_cast<int>(v);
  }

  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  bool boolean() const {
    if (!value_.is_boolean()) fail("expected true or false");
    return value_.get<bool>();
  }

  [[noreturn]] void fail(const std::string& msg) const { throw SchemaError(path_ + ": " + msg); }
  [[noreturn]] void invalid(const std::string& msg) const { throw InvariantError(path_ + ": " + msg); }

 private:
  std::string child_path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json& value_;
  std::string path_;
};

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // translate the byte offset into line:column
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SchemaError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": malformed JSON");
  }
}

BBox read_bbox(const Node& n) {
  const auto parts = n.array();
  if (parts.size() != 4) n.fail("bbox must be [x, y, w, h]");
  BBox b{parts[0].number(), parts[1].number(), parts[2].number(), parts[3].number()};
  if (!b.valid()) n.invalid("bbox width and height must be non-negative");
  return b;
}

ordered_json write_bbox(const BBox& b) { return ordered_json::array({b.x, b.y, b.w, b.h}); }

ReceiverClass read_class(const Node& n) {
  try {
    return receiver_class_from_string(n.string());
  } catch (const SchemaError& e) {
    n.fail(e.what());
  }
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

// ---- annotations ------------------------------------------------------------

const ImageInfo* AnnotationFile::find_image(std::string_view id) const {
  for (const auto& img : images) {
    if (img.id == id) return &img;
  }
  return nullptr;
}

AnnotationFile parse_annotations(std::string_view text) {
  const json doc = parse_json(text);
  const Node root(doc, "");
  root.object({"images", "objects", "split"});

  AnnotationFile file;
  std::set<std::string> ids;
  for (const Node& n : root["images"].array()) {
    n.object({"id", "width", "height"});
    ImageInfo img{n["id"].string(), n["width"].positive_int(), n["height"].positive_int()};
    if (!ids.insert(img.id).second) n["id"].invalid("duplicate image id '" + img.id + "'");
    file.images.push_back(std::move(img));
  }
  for (const Node& n : root["objects"].array()) {
    n.object({"image_id", "bbox", "class"});
    GroundTruthObject obj{n["image_id"].string(), read_bbox(n["bbox"]), read_class(n["class"])};
    const ImageInfo* img = file.find_image(obj.image_id);
    if (img == nullptr) n["image_id"].invalid("unknown image id '" + obj.image_id + "'");
    const BBox& b = obj.bbox;
    if (b.x < 0.0 || b.y < 0.0 || b.right() > img->width || b.bottom() > img->height) {
      n["bbox"].invalid("box exceeds the image bounds");
    }
    file.objects.push_back(std::move(obj));
  }
  if (root.has("split")) {
    const Node s = root["split"];
    s.object({"train", "dev", "test"});
    file.split = SplitInfo{s["train"].unsigned_integer(), s["dev"].unsigned_integer(),
                           s["test"].unsigned_integer()};
  }
  return file;
}

std::string emit_annotations(const AnnotationFile& file) {
  ordered_json root;
  root["images"] = ordered_json::array();
  for (const auto& img : file.images) {
    root["images"].push_back({{"id", img.id}, {"width", img.width}, {"height", img.height}});
  }
  root["objects"] = ordered_json::array();
  for (const auto& obj : file.objects) {
    root["objects"].push_back(
        {{"image_id", obj.image_id}, {"bbox", write_bbox(obj.bbox)}, {"class", to_string(obj.class_label)}});
  }
  if (file.split) {
    root["split"] = {{"train", file.split->train}, {"dev", file.split->dev}, {"test", file.split->test}};
  }
  return dump(root);
}

// ---- detections -------------------------------------------------------------

DetectionFile parse_detections(std::string_view text) {
  const json doc = parse_json(text);
  const Node root(doc, "");
  root.object({"detections"});
  DetectionFile file;
  for (const Node& n : root["detections"].array()) {
    n.object({"image_id", "bbox", "score", "class"});
    Detection d{n["image_id"].string(), read_bbox(n["bbox"]), n["score"].number(), read_class(n["class"])};
    if (!(d.score >= 0.0 && d.score <= 1.0)) n["score"].invalid("score must lie in [0, 1]");
    file.detections.push_back(std::move(d));
  }
  return file;
}

std::string emit_detections(const DetectionFile& file) {
  ordered_json root;
  root["detections"] = ordered_json::array();
  for (const auto& d : file.detections) {
    root["detections"].push_back({{"image_id", d.image_id},
                                  {"bbox", write_bbox(d.bbox)},
                                  {"score", d.score},
                                  {"class", to_string(d.class_label)}});
  }
  return dump(root);
}

// ---- profiles ---------------------------------------------------------------

detector::DetectorProfile parse_profile(std::string_view text) {
  const json doc = parse_json(text);
  const Node root(doc, "");
  root.object({"name", "approximate", "note", "per_image_latency_s", "ap_vs_iou", "ap_vs_distance"});

  detector::DetectorProfile p;
  p.name = root["name"].string();
  if (root.has("approximate")) p.approximate = root["approximate"].boolean();
  if (root.has("note")) p.note = root["note"].string();
  p.per_image_latency_s = root["per_image_latency_s"].number();
  for (const Node& n : root["ap_vs_iou"].array()) {
    n.object({"iou", "ap"});
    p.ap_vs_iou.push_back({n["iou"].number(), n["ap"].number()});
  }
  if (root.has("ap_vs_distance")) {
    for (const Node& n : root["ap_vs_distance"].array()) {
      n.object({"distance_cm", "image_size", "ap"});
      p.ap_vs_distance.push_back({n["distance_cm"].number(), n["image_size"].string(), n["ap"].number()});
    }
  }
  try {
    p.validate();
  } catch (const InvariantError& e) {
    throw InvariantError(std::string("profile: ") + e.what());
  }
  return p;
}

std::string emit_profile(const detector::DetectorProfile& p) {
  ordered_json root;
  root["name"] = p.name;
  root["approximate"] = p.approximate;
  if (!p.note.empty()) root["note"] = p.note;
  root["per_image_latency_s"] = p.per_image_latency_s;
  root["ap_vs_iou"] = ordered_json::array();
  for (const auto& k : p.ap_vs_iou) root["ap_vs_iou"].push_back({{"iou", k.iou_threshold}, {"ap", k.ap}});
  root["ap_vs_distance"] = ordered_json::array();
  for (const auto& k : p.ap_vs_distance) {
    root["ap_vs_distance"].push_back(
        {{"distance_cm", k.distance_cm}, {"image_size", k.image_size}, {"ap", k.ap}});
  }
  return dump(root);
}

// ---- scenarios --------------------------------------------------------------

ScenarioFile parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  const json doc = parse_json(text);
  const Node root(doc, "");
  root.object({"camera", "grid", "scan", "profile", "iou_threshold", "trials", "seed"});

  ScenarioFile s;
  {
    const Node cam = root["camera"];
    cam.object({"focal_px", "ref_width", "ref_height", "calibration"});
    s.camera.ref_width = cam["ref_width"].positive_int();
    s.camera.ref_height = cam["ref_height"].positive_int();
    if (cam.has("focal_px") == cam.has("calibration")) {
      cam.fail("give exactly one of focal_px or calibration");
    }
    if (cam.has("focal_px")) {
      s.camera.focal_px = cam["focal_px"].number();
      if (!(s.camera.focal_px > 0.0)) cam["focal_px"].invalid("must be positive");
    } else {
      const Node c = cam["calibration"];
      c.object({"object_cm", "distance_cm", "observed_px"});
      try {
        s.camera.focal_px =
            geometry::calibrate_focal(c["object_cm"].number(), c["distance_cm"].number(), c["observed_px"].number());
      } catch (const DomainError& e) {
        c.invalid(e.what());
      }
    }
  }
  {
    const Node g = root["grid"];
    g.object({"rows", "cols", "image_width", "image_height"});
    s.grid = {g["rows"].positive_int(), g["cols"].positive_int(), g["image_width"].positive_int(),
              g["image_height"].positive_int()};
  }
  if (root.has("profile")) {
    s.profile_ref = root["profile"].string();
    if (!base_dir.empty()) {
      const auto path = base_dir / s.profile_ref;
      try {
        s.profile = load_profile(path);
      } catch (const Error& e) {
        throw SchemaError("profile '" + path.string() + "': " + e.what());
      }
    }
  }
  if (root.has("iou_threshold")) {
    s.iou_threshold = root["iou_threshold"].number();
    if (!(s.iou_threshold > 0.0 && s.iou_threshold <= 1.0)) root["iou_threshold"].invalid("must lie in (0, 1]");
  }
  {
    const Node scan = root["scan"];
    scan.object({"n_cells", "t_scan_s", "t_detect_s", "ap"});
    s.scan.n_cells = s.grid.n_cells();
    if (scan.has("n_cells") && scan["n_cells"].unsigned_integer() != s.scan.n_cells) {
      scan["n_cells"].invalid("n_cells must equal grid rows * cols = " + std::to_string(s.scan.n_cells));
    }
    s.scan.t_scan_s = scan["t_scan_s"].number();
    if (scan.has("t_detect_s")) {
      s.scan.t_detect_s = scan["t_detect_s"].number();
    } else if (s.profile) {
      s.scan.t_detect_s = s.profile->per_image_latency_s;
    } else {
      scan.fail("t_detect_s is required when no profile is loaded");
    }
    if (scan.has("ap")) {
      s.scan.ap = scan["ap"].number();
    } else if (s.profile) {
      s.scan.ap = detector::ap_at(*s.profile, s.iou_threshold);
    } else {
      scan.fail("ap is required when no profile is loaded");
    }
    try {
      s.scan.validate();
    } catch (const InvariantError& e) {
      scan.invalid(e.what());
    }
  }
  if (root.has("trials")) {
    s.trials = root["trials"].unsigned_integer();
    if (s.trials == 0) root["trials"].invalid("must be >= 1");
  }
  if (root.has("seed")) s.seed = root["seed"].unsigned_integer();
  return s;
}

std::string emit_scenario(const ScenarioFile& s) {
  ordered_json root;
  root["camera"] = {{"focal_px", s.camera.focal_px},
                    {"ref_width", s.camera.ref_width},
                    {"ref_height", s.camera.ref_height}};
  root["grid"] = {{"rows", s.grid.rows},
                  {"cols", s.grid.cols},
                  {"image_width", s.grid.image_width},
                  {"image_height", s.grid.image_height}};
  root["scan"] = {{"n_cells", s.scan.n_cells},
                  {"t_scan_s", s.scan.t_scan_s},
                  {"t_detect_s", s.scan.t_detect_s},
                  {"ap", s.scan.ap}};
  if (!s.profile_ref.empty()) root["profile"] = s.profile_ref;
  root["iou_threshold"] = s.iou_threshold;
  root["trials"] = s.trials;
  root["seed"] = s.seed;
  return dump(root);
}

// ---- files ------------------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw SchemaError("write failed for '" + path.string() + "'");
}

namespace {

template <typename F>
auto with_file_context(const std::filesystem::path& path, F&& parse) {
  const std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  } catch (const InvariantError& e) {
    throw InvariantError(path.string() + ": " + e.what());
  }
}

}  // namespace

AnnotationFile load_annotations(const std::filesystem::path& path) {
  return with_file_context(path, [](std::string_view t) { return parse_annotations(t); });
}

DetectionFile load_detections(const std::filesystem::path& path) {
  return with_file_context(path, [](std::string_view t) { return parse_detections(t); });
}

detector::DetectorProfile load_profile(const std::filesystem::path& path) {
  return with_file_context(path, [](std::string_view t) { return parse_profile(t); });
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  const auto base = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
  return with_file_context(path, [&](std::string_view t) { return parse_scenario(t, base); });
}

// ---- CSV --------------------------------------------------------------------

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return {buf, res.ptr};
}

double parse_number(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw SchemaError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

namespace {

std::vector<std::vector<std::string>> split_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      std::vector<std::string> cells;
      std::size_t p = 0;
      while (true) {
        const std::size_t comma = line.find(',', p);
        cells.emplace_back(line.substr(p, comma == std::string_view::npos ? line.npos : comma - p));
        if (comma == std::string_view::npos) break;
        p = comma + 1;
      }
      rows.push_back(std::move(cells));
    }
    start = end + 1;
  }
  return rows;
}

constexpr std::string_view kSimulationHeader = "strategy,trials,mean_s,stderr_s,analytic_s,relative_error";
constexpr std::string_view kAnalyticHeader = "ap,t1_s,t2_s";

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace

std::string emit_simulation_csv(const std::vector<SimulationRow>& rows) {
  std::string out(kSimulationHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.strategy + ',' + std::to_string(r.summary.trials) + ',' + format_number(r.summary.mean_time_s) + ',' +
           format_number(r.summary.stderr_s) + ',' + optional_number(r.summary.analytic_time_s) + ',' +
           optional_number(r.summary.relative_error()) + '\n';
  }
  return out;
}

std::vector<SimulationRow> parse_simulation_csv(std::string_view text) {
  const auto rows = split_csv(text);
  if (rows.empty()) throw SchemaError("simulation CSV: missing header");
  std::string header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
  if (header != kSimulationHeader) throw SchemaError("simulation CSV: unexpected header '" + header + "'");

  std::vector<SimulationRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& c = rows[i];
    const std::string where = "simulation CSV line " + std::to_string(i + 1);
    if (c.size() != 6) throw SchemaError(where + ": expected 6 columns");
    try {
      SimulationRow r;
      r.strategy = c[0];
      const double trials = parse_number(c[1]);
      if (trials < 1.0 || trials != std::floor(trials)) throw InvariantError("trials must be a positive integer");
      r.summary.trials = static_cast<std::size_t>(trials);
      r.summary.mean_time_s = parse_number(c[2]);
      r.summary.stderr_s = parse_number(c[3]);
      if (r.summary.stderr_s < 0.0) throw InvariantError("stderr must be non-negative");
      if (!c[4].empty()) r.summary.analytic_time_s = parse_number(c[4]);
      out.push_back(std::move(r));
    } catch (const SchemaError& e) {
      throw SchemaError(where + ": " + e.what());
    } catch (const InvariantError& e) {
      throw InvariantError(where + ": " + e.what());
    }
  }
  return out;
}

std::string emit_analytic_csv(const AnalyticTable& table) {
  std::string out(kAnalyticHeader);
  out += '\n';
  for (const auto& r : table.rows) {
    out += format_number(r.ap) + ',' + format_number(r.t1_s) + ',' + format_number(r.t2_s) + '\n';
  }
  out += "breakeven_ap," + format_number(table.breakeven.ap) + ',' +
         (table.breakeven.in_range ? "in_range" : "clamped") + '\n';
  return out;
}

AnalyticTable parse_analytic_csv(std::string_view text) {
  const auto rows = split_csv(text);
  if (rows.size() < 2) throw SchemaError("analytic CSV: missing header or footer");
  if (rows[0] != std::vector<std::string>{"ap", "t1_s", "t2_s"}) throw SchemaError("analytic CSV: unexpected header");
  AnalyticTable t;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    if (rows[i].size() != 3) throw SchemaError("analytic CSV line " + std::to_string(i + 1) + ": expected 3 columns");
    t.rows.push_back({parse_number(rows[i][0]), parse_number(rows[i][1]), parse_number(rows[i][2])});
  }
  const auto& footer = rows.back();
  if (footer.size() != 3 || footer[0] != "breakeven_ap" || (footer[2] != "in_range" && footer[2] != "clamped")) {
    throw SchemaError("analytic CSV: malformed breakeven footer");
  }
  t.breakeven.ap = parse_number(footer[1]);
  t.breakeven.raw_ap = t.breakeven.ap;
  t.breakeven.in_range = footer[2] == "in_range";
  return t;
}

}  // namespace rbcscan::io
