#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rbcscan/box.hpp"
#include "rbcscan/detector_model.hpp"
#include "rbcscan/geometry.hpp"
#include "rbcscan/scanning.hpp"

// Structured inputs are JSON documents with a fixed set of keys per object.
// Unknown keys are rejected. Errors carry the JSON path of the offending
// field ("detections[3].score") or the line/column of a syntax error.
// Tabular outputs are CSV with '.' decimals and 12 significant digits.
namespace rbcscan::io {

struct ImageInfo {
  std::string id;
  int width = 0;
  int height = 0;
  friend bool operator==(const ImageInfo&, const ImageInfo&) = default;
};

/// Train/dev/test image counts, kept as metadata only.
struct SplitInfo {
  std::size_t train = 0;
  std::size_t dev = 0;
  std::size_t test = 0;
  friend bool operator==(const SplitInfo&, const SplitInfo&) = default;
};

struct AnnotationFile {
  std::vector<ImageInfo> images;
  std::vector<GroundTruthObject> objects;
  std::optional<SplitInfo> split;

  const ImageInfo* find_image(std::string_view id) const;
  friend bool operator==(const AnnotationFile&, const AnnotationFile&) = default;
};

struct DetectionFile {
  std::vector<Detection> detections;
  friend bool operator==(const DetectionFile&, const DetectionFile&) = default;
};

struct ScenarioFile {
  geometry::CameraModel camera;
  geometry::CellGrid grid;
  scanning::ScanConfig scan;
  std::string profile_ref;  // path as written, relative to the scenario file
  std::optional<detector::DetectorProfile> profile;
  double iou_threshold = 0.5;
  std::size_t trials = 1'000'000;
  std::uint64_t seed = 0;
};

AnnotationFile parse_annotations(std::string_view text);
std::string emit_annotations(const AnnotationFile& file);

DetectionFile parse_detections(std::string_view text);
std::string emit_detections(const DetectionFile& file);

detector::DetectorProfile parse_profile(std::string_view text);
std::string emit_profile(const detector::DetectorProfile& profile);

/// `base_dir` resolves the profile reference; pass an empty path to skip loading it.
ScenarioFile parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
std::string emit_scenario(const ScenarioFile& file);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

AnnotationFile load_annotations(const std::filesystem::path& path);
DetectionFile load_detections(const std::filesystem::path& path);
detector::DetectorProfile load_profile(const std::filesystem::path& path);
ScenarioFile load_scenario(const std::filesystem::path& path);

// ---- CSV --------------------------------------------------------------------

std::string format_number(double v);
double parse_number(std::string_view text);

struct SimulationRow {
  std::string strategy;
  scanning::SimulationSummary summary;
};

std::string emit_simulation_csv(const std::vector<SimulationRow>& rows);
std::vector<SimulationRow> parse_simulation_csv(std::string_view text);

struct AnalyticRow {
  double ap = 0.0;
  double t1_s = 0.0;
  double t2_s = 0.0;
};

struct AnalyticTable {
  std::vector<AnalyticRow> rows;
  scanning::Breakeven breakeven;
};

std::string emit_analytic_csv(const AnalyticTable& table);
AnalyticTable parse_analytic_csv(std::string_view text);

}  // namespace rbcscan::io
