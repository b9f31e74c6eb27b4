#include <random>

#include <gtest/gtest.h>

#include "navobs/errors.hpp"
#include "navobs/range.hpp"
#include "navobs/vehicle.hpp"

using namespace navobs;

TEST(BuildCp, DefaultAnchors) {
  const OutputMatrix c = build_Cp(default_anchors());
  ASSERT_EQ(c.rows(), 3);
  OutputMatrix expected(3, 3);
  expected << 0, -2, 2, 1, 0, 1, -5, -4, -3;
  EXPECT_TRUE(c.isApprox(expected));
  EXPECT_GT(smallest_singular_value(c), kRankTol);
}

TEST(BuildCp, RejectsDegenerateGeometry) {
  const std::vector<Vec3> planar{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {3, 2, 0}};
  EXPECT_THROW(build_Cp(planar), CoplanarAnchors);
  EXPECT_THROW(build_Cp({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}), CoplanarAnchors);
  EXPECT_THROW(build_Cp(default_anchors(), 4), DimensionMismatch);
}

TEST(BuildY, Examples) {
  const auto anchors = default_anchors();
  EXPECT_LT(build_y(measure_ranges(Vec3::Zero(), anchors), anchors).norm(), 1e-14);
  const Vec3 p(1, 0, 1);
  const Eigen::VectorXd y = build_y(measure_ranges(p, anchors), anchors);
  EXPECT_LT((y - build_Cp(anchors) * p).norm(), 1e-13);
  EXPECT_THROW(build_y({1.0, 2.0}, anchors), DimensionMismatch);
}

TEST(BuildY, AnchorOrderMatters) {
  auto anchors = default_anchors();
  const Vec3 p(0.3, -0.7, 2.0);
  const Eigen::VectorXd y0 = build_y(measure_ranges(p, anchors), anchors);
  std::swap(anchors[1], anchors[2]);
  const Eigen::VectorXd y1 = build_y(measure_ranges(p, anchors), anchors);
  EXPECT_GT((y0 - y1).norm(), 1e-3);
}

TEST(BuildY, ReferenceAnchorChoice) {
  const auto anchors = default_anchors();
  const Vec3 p(2, 1, -1);
  for (std::size_t ref = 0; ref < anchors.size(); ++ref) {
    const LinearOutput out = range_output(measure_ranges(p, anchors), anchors, ref);
    EXPECT_EQ(out.dim(), 3);
    EXPECT_LT((out.y - out.C_p * p).norm(), 1e-12);
  }
}

TEST(BuildY, OracleEquivalenceRandomized) {
  const auto anchors = default_anchors();
  const OutputMatrix c = build_Cp(anchors);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p(u(rng), u(rng), u(rng));
    const Eigen::VectorXd y = build_y(measure_ranges(p, anchors), anchors);
    ASSERT_LT((y - c * p).norm(), 1e-10) << p.transpose();
  }
}

TEST(Gps, PassThrough) {
  const LinearOutput out = gps_output(Vec3(1, 2, 3));
  EXPECT_TRUE(out.y.isApprox(Eigen::Vector3d(1, 2, 3)));
  EXPECT_TRUE(out.C_p.isIdentity());
}
