#include <doctest.h>

#include <cmath>
#include <random>

#include "rbcscan/errors.hpp"
#include "rbcscan/geometry.hpp"

using namespace rbcscan;
using namespace rbcscan::geometry;

namespace {

CameraModel reference_camera() { return {calibrate_focal(14.0, 120.0, 124.0), 1280, 720}; }
const ReceiverSpec kPhone{14.0, 7.0, ReceiverClass::kSmartphone};
const CellGrid kGrid8x8{8, 8, 1280, 720};

}  // namespace

TEST_CASE("calibrate_focal inverts the pinhole relation") {
  // f = p * Z / X = 124 * 120 / 14
  CHECK(calibrate_focal(14.0, 120.0, 124.0) == doctest::Approx(1062.857142857143).epsilon(1e-12));
  CHECK(calibrate_focal(1.0, 1.0, 1.0) == 1.0);
  const double long_side = calibrate_focal(14.0, 120.0, 124.0);
  const double short_side = calibrate_focal(7.0, 120.0, 62.0);
  CHECK(std::abs(long_side - short_side) / long_side <= 1e-9);

  CHECK_THROWS_AS(calibrate_focal(0.0, 120.0, 124.0), DomainError);
  CHECK_THROWS_AS(calibrate_focal(14.0, -1.0, 124.0), DomainError);
  CHECK_THROWS_AS(calibrate_focal(14.0, 120.0, 0.0), DomainError);
}

TEST_CASE("project_size reproduces the 120 cm smartphone example") {
  const auto cam = reference_camera();
  const auto full = project_size(cam, kPhone, 120.0, 1280, 720);
  CHECK(std::lround(full.w_px) == 124);
  CHECK(std::lround(full.h_px) == 62);

  const auto half = project_size(cam, kPhone, 120.0, 640, 360);
  CHECK(std::lround(half.w_px) == 62);
  CHECK(std::lround(half.h_px) == 31);

  const auto far = project_size(cam, kPhone, 240.0, 1280, 720);
  CHECK(std::lround(far.w_px) == 62);
  CHECK(std::lround(far.h_px) == 31);
}

TEST_CASE("project_size errors") {
  const auto cam = reference_camera();
  CHECK_THROWS_AS(project_size(cam, kPhone, 120.0, 1280, 1024), ConfigError);
  CHECK_THROWS_AS(project_size(cam, kPhone, 0.0, 1280, 720), DomainError);
  CHECK_THROWS_AS(project_size(cam, kPhone, -5.0, 1280, 720), DomainError);
  CHECK_THROWS_AS(project_size(cam, {0.0, 7.0}, 120.0, 1280, 720), InvariantError);
  CHECK_THROWS_AS(project_size({0.0, 1280, 720}, kPhone, 120.0, 1280, 720), InvariantError);
}

TEST_CASE("350 cm: the pinhole model predicts about 42x21, not the reported 28x14") {
  const auto p = project_size(reference_camera(), kPhone, 350.0, 1280, 720);
  CHECK(p.w_px == doctest::Approx(42.514).epsilon(1e-3));
  CHECK(p.h_px == doctest::Approx(21.257).epsilon(1e-3));
}

TEST_CASE("is_detectable") {
  CHECK(is_detectable({124, 62}));
  CHECK_FALSE(is_detectable({28, 14}));
  CHECK(is_detectable({30, 15}));
  CHECK(is_detectable({15, 30}));  // portrait: long side still compared with 30
  CHECK_FALSE(is_detectable({29.999, 15}));
  CHECK_FALSE(is_detectable({40, 14.5}));
  CHECK(is_detectable({10, 10}, 5, 5));
}

TEST_CASE("cell_of_point on the 8x8 grid") {
  CHECK(cell_of_point(kGrid8x8, 10, 10) == 0);
  CHECK(cell_of_point(kGrid8x8, 1279, 719) == 63);
  CHECK(cell_of_point(kGrid8x8, 640, 360) == 36);
  CHECK(cell_of_point(kGrid8x8, 1279.999999, 0) == 7);

  CHECK_THROWS_AS(cell_of_point(kGrid8x8, 1280, 10), DomainError);
  CHECK_THROWS_AS(cell_of_point(kGrid8x8, 10, 720), DomainError);
  CHECK_THROWS_AS(cell_of_point(kGrid8x8, -0.1, 10), DomainError);
  CHECK_THROWS_AS(cell_of_point(kGrid8x8, std::nan(""), 10), DomainError);
  CHECK_THROWS_AS(cell_of_point({0, 8, 1280, 720}, 1, 1), InvariantError);
}

TEST_CASE("bbox_center") {
  CHECK(bbox_center({0, 0, 10, 10}) == Point{5, 5});
  CHECK(bbox_center({100, 200, 50, 30}) == Point{125, 215});
  CHECK(bbox_center({0, 0, 0, 0}) == Point{0, 0});
}

TEST_CASE("property: pinhole scale invariance and resolution linearity") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> dist(20.0, 800.0), size(1.0, 50.0), scale(0.1, 10.0);
  const auto cam = reference_camera();
  for (int i = 0; i < 2000; ++i) {
    const ReceiverSpec spec{size(gen), size(gen)};
    const double z = dist(gen);
    const auto base = project_size(cam, spec, z, 1280, 720);

    // powers of two scale exactly
    const double k2 = std::ldexp(1.0, static_cast<int>(i % 7) - 3);
    const auto scaled2 = project_size(cam, spec, k2 * z, 1280, 720);
    CHECK(scaled2.w_px == base.w_px / k2);
    CHECK(scaled2.h_px == base.h_px / k2);

    const double k = scale(gen);
    const auto scaled = project_size(cam, spec, k * z, 1280, 720);
    CHECK(scaled.w_px == doctest::Approx(base.w_px / k).epsilon(1e-12));

    const auto half = project_size(cam, spec, z, 640, 360);
    CHECK(half.w_px == base.w_px / 2.0);
    CHECK(half.h_px == base.h_px / 2.0);
  }
}

TEST_CASE("property: calibration round trip") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.5, 500.0);
  for (int i = 0; i < 2000; ++i) {
    const double object = u(gen), z = u(gen), observed = u(gen);
    const CameraModel cam{calibrate_focal(object, z, observed), 1280, 720};
    const auto p = project_size(cam, {object, object}, z, 1280, 720);
    CHECK(std::abs(p.w_px - observed) / observed <= 1e-9);
  }
}

TEST_CASE("property: cells partition the image") {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> parts(1, 9), extent(1, 97);
  for (int trial = 0; trial < 200; ++trial) {
    const CellGrid grid{parts(gen), parts(gen), extent(gen), extent(gen)};
    double area = 0.0;
    for (std::size_t c = 0; c < grid.n_cells(); ++c) area += cell_rect(grid, c).area();
    CHECK(area == static_cast<double>(grid.image_width) * grid.image_height);

    for (int y = 0; y < grid.image_height; ++y) {
      for (int x = 0; x < grid.image_width; ++x) {
        const auto corner = cell_of_point(grid, x, y);
        const BBox r = cell_rect(grid, corner);
        REQUIRE((x >= r.x && x < r.right() && y >= r.y && y < r.bottom()));
      }
    }
    for (std::size_t c = 0; c < grid.n_cells(); ++c) {
      const auto center = cell_center(grid, c);
      CHECK(cell_of_point(grid, center.x, center.y) == c);
    }
  }
}
