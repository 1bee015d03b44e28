#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "groundnav/errors.hpp"
#include "groundnav/groundseg.hpp"
#include "groundnav/runtime.hpp"
#include "groundnav/simenv.hpp"
#include "oracles.hpp"

using namespace groundnav;
using seg::CellState;
using seg::PixelClass;

TEST(GroundModel, ExpectedDepthMatchesRayPlaneOracle) {
  CameraModel cam;
  for (double pitch : {0.0, 0.2, 0.4, 0.7}) {
    cam.pitch = pitch;
    for (int v = 0; v < cam.height; ++v) {
      const auto got = seg::expected_ground_depth(cam, v);
      const auto want = oracle::floor_depth(cam, cam.cx, v);
      ASSERT_EQ(got.has_value(), want.has_value()) << "pitch " << pitch << " row " << v;
      if (got) {
        EXPECT_NEAR(*got, *want, 1e-9 * *want);
      }
    }
  }
}

TEST(GroundModel, HorizonRowHasNoFloor) {
  CameraModel cam;
  cam.pitch = 0.0;
  EXPECT_FALSE(seg::expected_ground_depth(cam, cam.cy).has_value());
  EXPECT_FALSE(seg::expected_ground_depth(cam, cam.cy - 10).has_value());
  ASSERT_TRUE(seg::expected_ground_depth(cam, cam.cy + 21).has_value());
  EXPECT_NEAR(*seg::expected_ground_depth(cam, cam.cy + 21), cam.mount_height * 10.0, 1e-12);
}

TEST(GroundModel, HeightOfFloorIsZeroAndOfFaceIsExact) {
  CameraModel cam;
  for (int v = 130; v < cam.height; v += 7) {
    const double z = *seg::expected_ground_depth(cam, v);
    EXPECT_NEAR(seg::height_above_ground(cam, v, z), 0.0, 1e-12);
    // A point at 0.6 of the floor depth along the same ray sits at 0.4 h.
    EXPECT_NEAR(seg::height_above_ground(cam, v, 0.6 * z), 0.4 * cam.mount_height, 1e-12);
  }
}

TEST(Classify, ThresholdBands) {
  const CameraModel cam;
  const seg::SegParams p;
  const double v = 150;
  const double zg = *seg::expected_ground_depth(cam, v);
  auto at_height = [&](double h) {  // depth of the point at height h on this ray
    return zg * (cam.mount_height - h) / cam.mount_height;
  };
  EXPECT_EQ(seg::classify_pixel(cam, p, 0, v, 0.0), PixelClass::Unknown);
  EXPECT_EQ(seg::classify_pixel(cam, p, 0, v, std::nan("")), PixelClass::Unknown);
  EXPECT_EQ(seg::classify_pixel(cam, p, 0, v, zg), PixelClass::Ground);
  EXPECT_EQ(seg::classify_pixel(cam, p, 0, v, at_height(0.039)), PixelClass::Ground);
  EXPECT_EQ(seg::classify_pixel(cam, p, 0, v, at_height(0.06)), PixelClass::Unknown);
  EXPECT_EQ(seg::classify_pixel(cam, p, 0, v, at_height(0.081)), PixelClass::Obstacle);
  EXPECT_EQ(seg::classify_pixel(cam, p, 0, v, at_height(0.15)), PixelClass::Obstacle);
  // Below the floor (a hole) is not ground.
  EXPECT_EQ(seg::classify_pixel(cam, p, 0, v, zg * 1.3), PixelClass::Unknown);
  // Above the clearance height; use a row above the horizon looking up.
  EXPECT_EQ(seg::classify_pixel(cam, p, 0, 20, 3.0), PixelClass::Overhead);
}

TEST(Segment, DimensionMismatchThrows) {
  const CameraModel cam;
  DepthFrame f(100, 100);
  EXPECT_THROW(seg::segment(f, cam, {}), DimensionMismatch);
}

TEST(Segment, EmptyFloorIsAllGroundOnTheLattice) {
  const CameraModel cam;
  const seg::SegParams p;
  const auto r = sim::render_depth({}, {}, cam);
  const auto cls = seg::segment(r.depth, cam, p);
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      const bool lattice = u % p.column_stride == 0 && v % p.row_stride == 0;
      if (!lattice) {
        EXPECT_EQ(cls.at(u, v), PixelClass::Unknown);
      } else if (r.depth.at(u, v) > 0.0) {
        EXPECT_EQ(cls.at(u, v), PixelClass::Ground);
      }
    }
  }
}

TEST(Segment, LowBoxAheadAgreesWithLabels) {
  const CameraModel cam;
  const seg::SegParams p;
  sim::Scene scene;
  scene.boxes.push_back({1.5, 1.9, -0.2, 0.2, 0.2, true});
  const auto r = sim::render_depth(scene, {}, cam);
  const auto cls = seg::segment(r.depth, cam, p);
  const auto acc = runtime::evaluate_segmentation(cls, r, scene, cam, p);
  EXPECT_GE(acc.accuracy(), 0.98);
  EXPECT_EQ(acc.obstacle_as_ground, 0u);
  int obstacle = 0;
  for (int v = 0; v < cam.height; v += 2) {
    for (int u = 0; u < cam.width; u += 2) {
      if (r.labels.at(u, v) == sim::SurfaceLabel::Obstacle && cls.at(u, v) == PixelClass::Obstacle) ++obstacle;
    }
  }
  EXPECT_GT(obstacle, 100);
}

TEST(Segment, ShelfAboveClearanceIsOverhead) {
  CameraModel cam;
  cam.pitch = 0.0;
  sim::Scene scene;
  scene.boxes.push_back({1.0, 2.0, -1.0, 1.0, 1.0, true});
  const auto r = sim::render_depth(scene, {}, cam);
  const auto cls = seg::segment(r.depth, cam, {});
  // The straight-ahead ray hits the face at camera height; rows well above
  // the optical center see the face above 0.30 m.
  EXPECT_EQ(cls.at(212, 120), PixelClass::Obstacle);
  EXPECT_EQ(cls.at(212, 60), PixelClass::Overhead);
}

TEST(Project, BoxWidthAndDistance) {
  const CameraModel cam;
  const seg::SegParams p;
  sim::Scene scene;
  scene.boxes.push_back({1.5, 1.9, -0.2, 0.2, 0.2, true});
  const auto r = sim::render_depth(scene, {}, cam);
  const auto cls = seg::segment(r.depth, cam, p);
  const auto m = seg::project_to_traversability(cls, r.depth, cam, p);
  const GridGeometry& g = m.geometry;
  EXPECT_EQ(g.cols, 160);
  EXPECT_EQ(g.rows, 160);
  EXPECT_DOUBLE_EQ(g.origin.x, -4.0);
  double ymin = 1e9, ymax = -1e9, xmin = 1e9;
  for (std::size_t i = 0; i < m.cells.size(); ++i) {
    if (m.cells[i] != CellState::Obstacle) continue;
    const Point2 c = grid_to_world(g, g.cell_at(i));
    ymin = std::min(ymin, c.y);
    ymax = std::max(ymax, c.y);
    xmin = std::min(xmin, c.x);
  }
  // Lateral extent within one cell of the true faces. Face promotion may also
  // mark the floor right at the base, so the near edge can start a cell early.
  EXPECT_GE(xmin, 1.425 - 1e-9);
  EXPECT_LE(xmin, 1.525 + 1e-9);
  EXPECT_NEAR(ymin, -0.175, 0.05 + 1e-9);
  EXPECT_NEAR(ymax, 0.175, 0.05 + 1e-9);
  // The floor in front of the box is traversable.
  EXPECT_EQ(m.at(*world_to_grid(g, 1.0, 0.02)), CellState::Traversable);
}

TEST(Project, SingleStrayObstaclePixelStaysTraversable) {
  const CameraModel cam;
  const seg::SegParams p;
  const auto r = sim::render_depth({}, {}, cam);
  auto cls = seg::segment(r.depth, cam, p);
  cls.classes[static_cast<std::size_t>(200) * cls.width + 212] = PixelClass::Obstacle;
  const auto m = seg::project_to_traversability(cls, r.depth, cam, p);
  const Vec3 pt = cam.back_project(212, 200, r.depth.at(212, 200));
  EXPECT_EQ(m.at(*world_to_grid(m.geometry, pt.x, pt.y)), CellState::Traversable);
  for (CellState c : m.cells) EXPECT_NE(c, CellState::Obstacle);
}

TEST(Project, ObstacleWinsOverGround) {
  const CameraModel cam;
  seg::SegParams p;
  p.min_obstacle_hits = 1;
  const auto r = sim::render_depth({}, {}, cam);
  auto cls = seg::segment(r.depth, cam, p);
  cls.classes[static_cast<std::size_t>(200) * cls.width + 212] = PixelClass::Obstacle;
  const auto m = seg::project_to_traversability(cls, r.depth, cam, p);
  const Vec3 pt = cam.back_project(212, 200, r.depth.at(212, 200));
  EXPECT_EQ(m.at(*world_to_grid(m.geometry, pt.x, pt.y)), CellState::Obstacle);
}

TEST(Project, OverheadPixelsAreIgnored) {
  const CameraModel cam;
  const seg::SegParams p;
  DepthFrame f(cam.width, cam.height);
  seg::PixelClassFrame cls{cam.width, cam.height,
                           std::vector<PixelClass>(f.depth.size(), PixelClass::Overhead)};
  for (double& z : f.depth) z = 1.0;
  const auto m = seg::project_to_traversability(cls, f, cam, p);
  for (CellState c : m.cells) EXPECT_EQ(c, CellState::Unknown);
}

TEST(SegParams, Validation) {
  seg::SegParams p;
  EXPECT_NO_THROW(p.validate());
  p.tau_ground = 0.1;
  EXPECT_THROW(p.validate(), ValidationError);
  p = {};
  p.column_stride = 0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = {};
  p.clearance_height = 0.05;
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(Segment, RandomScenesNeverCallTallObstaclesGround) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> x(0.6, 3.5), y(-1.5, 1.5), h(0.15, 0.8), s(0.1, 0.4);
  const CameraModel cam;
  const seg::SegParams p;
  for (int k = 0; k < 15; ++k) {
    sim::Scene scene;
    scene.boxes.push_back({x(rng), 0, y(rng), 0, h(rng), true});
    auto& b = scene.boxes.back();
    b.x_max = b.x_min + s(rng);
    b.y_max = b.y_min + s(rng);
    scene.cylinders.push_back({x(rng), y(rng), s(rng), h(rng), true});
    const auto r = sim::render_depth(scene, {}, cam);
    const auto acc = runtime::evaluate_segmentation(seg::segment(r.depth, cam, p), r, scene, cam, p);
    EXPECT_EQ(acc.obstacle_as_ground, 0u) << "scene " << k;
    EXPECT_GE(acc.accuracy(), 0.95) << "scene " << k;
  }
}
