#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "navobs/vehicle.hpp"

using namespace navobs;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Trajectory, InitialValues) {
  const TranslationSample s = true_translation(0.0);
  EXPECT_TRUE(s.p.isApprox(Vec3(1, 0, 1)));
  EXPECT_TRUE(s.v.isZero(0.0));
  EXPECT_NEAR((s.a_I - Vec3(0, kPi / 25, -9.81)).norm(), 0.0, 1e-15);
}

TEST(Trajectory, DerivativesMatchFiniteDifferences) {
  const double h = 1e-5;
  for (const double t : {0.5, 7.0, 23.4, 41.0, 59.0}) {
    const TranslationSample s = true_translation(t);
    const Vec3 v_fd = (true_translation(t + h).p - true_translation(t - h).p) / (2 * h);
    const Vec3 acc_fd = (true_translation(t + h).v - true_translation(t - h).v) / (2 * h);
    EXPECT_LT((s.v - v_fd).norm(), 1e-6 * (1 + s.v.norm())) << "t=" << t;
    // a_I excludes gravity: a_I = p'' - g e3
    EXPECT_LT((s.a_I - (acc_fd - 9.81 * Vec3::UnitZ())).norm(), 1e-5 * (1 + s.a_I.norm()))
        << "t=" << t;
  }
}

TEST(Trajectory, StaysOnUnitCircleAtHeightOne) {
  for (const double t : {3.0, 17.0, 60.0}) {
    const Vec3 p = true_translation(t).p;
    EXPECT_NEAR(p.head<2>().norm(), 1.0, 1e-14);
    EXPECT_DOUBLE_EQ(p.z(), 1.0);
  }
}

TEST(AngularRate, Examples) {
  EXPECT_TRUE(true_omega(0.0).isApprox(Vec3(0, 1, 0.5)));
  EXPECT_NEAR(true_omega(5 * kPi).x(), 0.0, 1e-15);
}

TEST(TruthAttitude, StepExamples) {
  const Rotation r0 = exp_so3(Vec3(0.1, 0.2, 0.3));
  // exact midpoint rate for one step
  const double t = 2.0;
  const double dt = 1e-3;
  const Rotation r1 = propagate_true_attitude(r0, t, dt);
  const Mat3 expected = r0.matrix() * exp_so3(dt * true_omega(t + dt / 2)).matrix();
  EXPECT_LT((r1.matrix() - expected).norm(), 1e-15);
}

TEST(TruthAttitude, OrthonormalOverFullRun) {
  ScenarioConfig cfg;
  TruthSimulator sim(cfg);
  const std::size_t n = step_count(cfg.t_end, cfg.dt);
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sim.advance();
    worst = std::max(worst, sim.state().R.orthonormality_error());
  }
  EXPECT_LT(worst, 1e-9);
  EXPECT_NEAR(sim.state().t, 60.0, 1e-12);
  EXPECT_EQ(sim.step_index(), 60000u);
}

TEST(Imu, IdentityAttitudeAndBias) {
  ScenarioConfig cfg;
  cfg.b_omega = Vec3::Zero();
  TrueState s;
  s.a_I = Vec3(1, 2, -9);
  s.omega = Vec3(0.1, 0.2, 0.3);
  const ImuSample m = measure_imu(s, cfg);
  EXPECT_TRUE(m.a_B == s.a_I);
  EXPECT_TRUE(m.m_B == cfg.m_I);
  EXPECT_TRUE(m.omega_y == s.omega);
}

TEST(Imu, BodyFrameProjection) {
  ScenarioConfig cfg;
  TruthSimulator sim(cfg);
  for (int k = 0; k < 1234; ++k) sim.advance();
  const TrueState& s = sim.state();
  const ImuSample m = measure_imu(s, cfg);
  EXPECT_LT((s.R.matrix() * m.a_B - s.a_I).norm(), 1e-12);
  EXPECT_LT((s.R.matrix() * m.m_B - cfg.m_I).norm(), 1e-14);
  EXPECT_LT((m.omega_y - cfg.b_omega - s.omega).norm(), 1e-15);
}

TEST(Ranges, Examples) {
  const auto anchors = default_anchors();
  EXPECT_DOUBLE_EQ(measure_ranges(anchors[0], anchors)[0], 0.0);
  EXPECT_NEAR(measure_ranges(Vec3::Zero(), anchors)[0], std::sqrt(6.0), 1e-15);
}

TEST(Assumptions, ScenarioConstants) {
  ScenarioConfig cfg;
  const AssumptionReport rep = validate_assumptions(cfg, uniform_grid(cfg.t_end, cfg.dt));
  EXPECT_TRUE(rep.observability_ok);
  EXPECT_GT(rep.c0, 0.05);
  EXPECT_NEAR(rep.c1, 9.81, 0.01);
  EXPECT_NEAR(rep.c5, std::sqrt(3.0) * 3 * kPi / 180, 1e-15);
  // |a_I| at t = 60: centripetal (pi t / 25)^2 on the unit circle plus gravity
  const double w2 = std::pow(kPi * 60 / 25, 2);
  EXPECT_NEAR(rep.c2, std::sqrt(w2 * w2 + std::pow(kPi / 25, 2) + 9.81 * 9.81), 1e-6);
  EXPECT_GT(rep.c4, 1.0);
  EXPECT_LT(rep.c4, std::sqrt(3.0));
}

TEST(Assumptions, CollinearFieldIsFlagged) {
  ScenarioConfig cfg;
  cfg.trajectory = TrajectoryKind::Hover;
  cfg.m_I = Vec3(0, 0, 0.5);  // parallel to a_I = -g e3
  const AssumptionReport rep = validate_assumptions(cfg, uniform_grid(5.0, 0.01));
  EXPECT_FALSE(rep.observability_ok);
  EXPECT_FALSE(rep.ok());
  EXPECT_NEAR(rep.c0, 0.0, 1e-12);
}

TEST(Assumptions, SaturationLevelCheck) {
  ScenarioConfig cfg;
  const auto grid = uniform_grid(cfg.t_end, 0.01);
  EXPECT_FALSE(validate_assumptions(cfg, grid, 9 * std::sqrt(8.0)).c_hat2_ok);
  EXPECT_TRUE(validate_assumptions(cfg, grid, 1000.0).c_hat2_ok);
}

TEST(Grid, StepCount) {
  EXPECT_EQ(step_count(60.0, 1e-3), 60000u);
  EXPECT_EQ(step_count(0.0, 1e-3), 0u);
  EXPECT_EQ(step_count(1.0, 0.3), 3u);
  const auto g = uniform_grid(1.0, 0.25);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.back(), 1.0);
}
