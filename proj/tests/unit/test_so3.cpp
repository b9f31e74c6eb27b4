#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "navobs/errors.hpp"
#include "navobs/so3.hpp"

using namespace navobs;

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 random_vec(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec3(u(rng), u(rng), u(rng));
}

// Rotation about a unit axis, written out independently of exp_so3.
Mat3 axis_angle(const Vec3& axis, double angle) {
  const Vec3 n = axis.normalized();
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 r;
  r << c + n.x() * n.x() * (1 - c), n.x() * n.y() * (1 - c) - n.z() * s,
      n.x() * n.z() * (1 - c) + n.y() * s, n.y() * n.x() * (1 - c) + n.z() * s,
      c + n.y() * n.y() * (1 - c), n.y() * n.z() * (1 - c) - n.x() * s,
      n.z() * n.x() * (1 - c) - n.y() * s, n.z() * n.y() * (1 - c) + n.x() * s,
      c + n.z() * n.z() * (1 - c);
  return r;
}

}  // namespace

TEST(Skew, Examples) {
  EXPECT_TRUE(skew(Vec3::Zero()).isZero(0.0));
  Mat3 expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  EXPECT_TRUE(skew(Vec3(0, 0, 1)).isApprox(expected));
  const Vec3 x(1, 2, 3);
  EXPECT_TRUE((skew(x) * x).isZero(0.0));
}

TEST(Skew, MatchesCrossProduct) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Vec3 a = random_vec(rng, 5.0);
    const Vec3 b = random_vec(rng, 5.0);
    EXPECT_LT((skew(a) * b - a.cross(b)).norm(), 1e-12);
  }
}

TEST(Vex, Examples) {
  EXPECT_TRUE(vex(Mat3::Zero()).isZero(0.0));
  Mat3 s;
  s << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  EXPECT_TRUE(vex(s).isApprox(Vec3(0, 0, 1)));
  const Vec3 v(-2, 5, 0.5);
  EXPECT_TRUE(vex(skew(v)).isApprox(v));
}

TEST(Vex, RejectsNonSkew) {
  EXPECT_THROW(vex(Mat3::Identity()), NotSkewSymmetric);
}

TEST(Psi, Examples) {
  EXPECT_TRUE(psi(Mat3::Identity()).isZero(0.0));
  Mat3 s;
  s << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  EXPECT_TRUE(psi(s).isApprox(Vec3(0, 0, 1)));
}

TEST(Psi, ComponentFormula) {
  Mat3 a;
  a << 1, 2, 3, 4, 5, 6, 7, 8, 10;
  // 0.5 [a32 - a23, a13 - a31, a21 - a12]
  EXPECT_TRUE(psi(a).isApprox(Vec3(0.5 * (8 - 6), 0.5 * (3 - 7), 0.5 * (4 - 2))));
}

TEST(Distance, Examples) {
  EXPECT_DOUBLE_EQ(so3_distance(Rotation::identity()), 0.0);
  const Mat3 flip = Vec3(1, -1, -1).asDiagonal();
  EXPECT_NEAR(so3_distance(Rotation::from_matrix(flip)), 1.0, 1e-15);
  EXPECT_NEAR(so3_distance(Rotation::from_matrix(axis_angle(Vec3::UnitX(), kPi / 2))), 0.5,
              1e-15);
  EXPECT_NEAR(so3_distance(exp_so3(Vec3(0, 0.3, 0))), (1 - std::cos(0.3)) / 2, 1e-15);
}

TEST(Distance, EqualsFrobeniusForm) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const Rotation r = exp_so3(random_vec(rng, kPi));
    const double frob = (Mat3::Identity() - r.matrix()).squaredNorm() / 8.0;
    EXPECT_NEAR(so3_distance(r), frob, 1e-12);
  }
}

TEST(Exp, Examples) {
  EXPECT_TRUE(exp_so3(Vec3::Zero()).matrix().isIdentity(0.0));
  Mat3 expected;
  expected << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  EXPECT_LT((exp_so3(Vec3(kPi / 2, 0, 0)).matrix() - expected).norm(), 1e-15);
}

TEST(Exp, MatchesAxisAngleAndSmallAngleSeries) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = random_vec(rng, 2.0);
    EXPECT_LT((exp_so3(v).matrix() - axis_angle(v, v.norm())).norm(), 1e-12);
  }
  const Vec3 tiny(1e-9, -2e-9, 3e-9);
  EXPECT_LT((exp_so3(tiny).matrix() - (Mat3::Identity() + skew(tiny))).norm(), 1e-17);
}

TEST(RotationType, ValidatesInput) {
  EXPECT_THROW(Rotation::from_matrix(2.0 * Mat3::Identity()), Error);
  const Mat3 reflection = Vec3(1, 1, -1).asDiagonal();
  EXPECT_THROW(Rotation::from_matrix(reflection), Error);
  const Mat3 noisy = exp_so3(Vec3(0.2, -0.4, 1.0)).matrix() + 1e-4 * Mat3::Ones();
  EXPECT_LT(Rotation::nearest(noisy).orthonormality_error(), 1e-12);
  EXPECT_TRUE(is_rotation(Rotation::nearest(noisy).matrix()));
}

TEST(EulerZyx, RecoversComposedAngles) {
  const double roll = 0.3;
  const double pitch = -0.4;
  const double yaw = 1.1;
  const Mat3 r = axis_angle(Vec3::UnitZ(), yaw) * axis_angle(Vec3::UnitY(), pitch) *
                 axis_angle(Vec3::UnitX(), roll);
  EXPECT_TRUE(euler_zyx(Rotation::from_matrix(r)).isApprox(Vec3(roll, pitch, yaw), 1e-12));
}

TEST(Sat, Examples) {
  EXPECT_TRUE(sat(1.0, Vec3(0.5, 0, 0)).isApprox(Vec3(0.5, 0, 0)));
  EXPECT_TRUE(sat(1.0, Vec3(2, 0, 0)).isApprox(Vec3(1, 0, 0)));
  EXPECT_TRUE(sat(2.0, Vec3(3, 4, 0)).isApprox(Vec3(1.2, 1.6, 0)));
}

TEST(Proj, Examples) {
  const double c = 1.0;
  const double eps = 0.1;
  const Vec3 mu(0.3, -0.2, 0.7);
  EXPECT_TRUE(proj(c, eps, Vec3(0.5, 0, 0), mu) == mu);
  EXPECT_TRUE(proj(c, eps, Vec3(5, 0, 0), Vec3(-1, 2, 0)) == Vec3(-1, 2, 0));
  EXPECT_LT(proj(c, eps, Vec3(c + eps, 0, 0), Vec3(1, 0, 0)).norm(), 1e-15);
}

TEST(Proj, PartialRemovalInsideLayer) {
  // theta = 0.5 halfway through the boundary layer
  const Vec3 out = proj(1.0, 0.2, Vec3(0, 1.1, 0), Vec3(1, 2, 0));
  EXPECT_TRUE(out.isApprox(Vec3(1, 1, 0)));
}

// Randomized property suites over the kernel.
TEST(So3Properties, SkewVexRoundTrips) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 v = random_vec(rng, 100.0);
    ASSERT_LT((vex(skew(v)) - v).norm(), 1e-12 * (1.0 + v.norm()));
    const Mat3 s = skew(random_vec(rng, 10.0));
    ASSERT_LT((skew(vex(s)) - s).norm(), 1e-12);
    Mat3 a = Mat3::Random() * 10.0;
    ASSERT_LT((skew(psi(a)) - 0.5 * (a - a.transpose())).norm(), 1e-12);
    ASSERT_LT((psi(a) - vex(skew_part(a))).norm(), 1e-12);
  }
}

TEST(So3Properties, SatNormBound) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> uc(1e-3, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const double c = uc(rng);
    const Vec3 x = random_vec(rng, 20.0);
    const Vec3 s = sat(c, x);
    ASSERT_LE(s.norm(), c * (1.0 + 1e-12));
    // direction is preserved
    ASSERT_LT(s.cross(x).norm(), 1e-12 * (1.0 + x.norm() * x.norm()));
  }
}

TEST(So3Properties, ExpIsRotation) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 10000; ++i) {
    Vec3 v = random_vec(rng, kPi);
    if (v.norm() > kPi) {
      v *= kPi / v.norm();
    }
    const Mat3 r = exp_so3(v).matrix();
    ASSERT_LT((r * r.transpose() - Mat3::Identity()).norm(), 1e-9);
    ASSERT_NEAR(r.determinant(), 1.0, 1e-9);
  }
}

TEST(So3Properties, ProjectionTrajectoryBound) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> uc(0.05, 2.0);
  const double dt = 1e-3;
  for (int trial = 0; trial < 200; ++trial) {
    const double c = uc(rng);
    const double eps = 0.1 * uc(rng);
    Vec3 phi = random_vec(rng, 1.0);
    phi *= c * std::uniform_real_distribution<double>(0.0, 1.0)(rng) / phi.norm();
    // adversarial input: constant, pointing radially outward
    const Vec3 mu = 5.0 * phi.normalized() + 0.5 * random_vec(rng, 1.0);
    double peak = phi.norm();
    for (int k = 0; k < 2000; ++k) {
      const Vec3 k1 = proj(c, eps, phi, mu);
      const Vec3 k2 = proj(c, eps, phi + 0.5 * dt * k1, mu);
      const Vec3 k3 = proj(c, eps, phi + 0.5 * dt * k2, mu);
      const Vec3 k4 = proj(c, eps, phi + dt * k3, mu);
      phi += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      peak = std::max(peak, phi.norm());
    }
    ASSERT_LE(peak, c + eps + 1e-6) << "c=" << c << " eps=" << eps;
  }
}
