#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "navobs/artifacts.hpp"
#include "navobs/harness.hpp"

using namespace navobs;

namespace {

RunConfig short_run(double t_end, double dt = 1e-3) {
  RunConfig cfg = load_config("");
  cfg.scenario.t_end = t_end;
  cfg.scenario.dt = dt;
  return cfg;
}

std::string csv_of(const RunLog& log) {
  std::ostringstream os;
  write_csv(log, os);
  return os.str();
}

}  // namespace

TEST(Run, ZeroHorizonHasOnlyInitialRow) {
  const RunLog log = run_scenario(short_run(0.0));
  ASSERT_EQ(log.rows.size(), 1u);
  const RunRow& r = log.rows.front();
  ASSERT_EQ(r.obs.size(), 2u);
  for (const ObserverRow& o : r.obs) {
    EXPECT_TRUE(o.err.tilde_x.head<3>().isApprox(Vec3(1, 0, 1)));
    EXPECT_TRUE(o.err.tilde_x.tail<3>().isZero(0.0));
    EXPECT_NEAR(o.err.dist_R, 0.5, 1e-15);
    EXPECT_TRUE(o.err.tilde_b.isApprox(Vec3::Constant(3.0 * kDegToRad)));
    EXPECT_TRUE(o.monitor.has_value());
  }
}

TEST(Run, RowCountAndTimestamps) {
  for (const auto& [t_end, dt] : {std::pair{1.0, 1e-3}, {0.5, 0.003}, {2.0, 0.01}}) {
    const RunLog log = run_scenario(short_run(t_end, dt));
    ASSERT_EQ(log.rows.size(), static_cast<std::size_t>(std::floor(t_end / dt + 1e-9)) + 1);
    for (std::size_t k = 1; k < log.rows.size(); ++k) {
      ASSERT_NEAR(log.rows[k].truth.t - log.rows[k - 1].truth.t, dt, 1e-12);
    }
  }
}

TEST(Run, MonitorDecimation) {
  RunConfig cfg = short_run(0.1);
  cfg.monitor_decimation = 7;
  const RunLog log = run_scenario(cfg);
  for (std::size_t k = 0; k < log.rows.size(); ++k) {
    EXPECT_EQ(log.rows[k].obs[0].monitor.has_value(), k % 7 == 0) << k;
  }
}

TEST(Run, ObserversAreIndependent) {
  RunConfig both = short_run(3.0);
  RunConfig only = both;
  only.observers = ObserverSelection::Proposed;
  const RunLog a = run_scenario(both);
  const RunLog b = run_scenario(only);
  ASSERT_EQ(b.observers.size(), 1u);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  const std::size_t ia = *a.index_of(ObserverKind::Proposed);
  for (std::size_t k = 0; k < a.rows.size(); k += 97) {
    EXPECT_TRUE(a.rows[k].obs[ia].state.x_hat == b.rows[k].obs[0].state.x_hat);
    EXPECT_TRUE(a.rows[k].obs[ia].state.R_hat.matrix() == b.rows[k].obs[0].state.R_hat.matrix());
  }
  EXPECT_FALSE(b.index_of(ObserverKind::Adhoc).has_value());
}

TEST(Run, Deterministic) {
  const RunConfig cfg = short_run(2.0);
  EXPECT_EQ(csv_of(run_scenario(cfg)), csv_of(run_scenario(cfg)));
}

TEST(Run, ZetaDynamicsMatchFiniteDifferences) {
  RunConfig cfg = short_run(8.0);
  cfg.observers = ObserverSelection::Proposed;
  cfg.monitor_decimation = 1;
  const RunLog log = run_scenario(cfg);
  const double dt = log.dt;
  double worst = 0.0;
  for (std::size_t k = 1000; k + 1 < log.rows.size(); k += 500) {
    const ObserverRow& o = log.rows[k].obs[0];
    const Vec6 fd =
        (log.rows[k + 1].obs[0].monitor->zeta - log.rows[k - 1].obs[0].monitor->zeta) / (2 * dt);
    const double t = log.rows[k].truth.t;
    const double h = 1e-5;
    const Vec3 a_dot =
        (translation_at(cfg.scenario, t + h).a_I - translation_at(cfg.scenario, t - h).a_I) /
        (2 * h);
    const Vec3 dist = zeta_disturbance(o.err.tilde_R, log.rows[k].truth.a_I, a_dot,
                                       log.rows[k].truth.R, o.err.tilde_b);
    const Vec6 model = zeta_derivative(o.monitor->zeta, dist, log.gains, log.sys);
    worst = std::max(worst, (fd - model).norm() / (1.0 + model.norm()));
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(Run, AttitudeDistanceRateBound) {
  RunConfig cfg = short_run(20.0);
  cfg.observers = ObserverSelection::Proposed;
  const RunLog log = run_scenario(cfg);
  ASSERT_TRUE(log.bounds.has_value());
  double worst = 0.0;
  for (std::size_t k = 1; k < log.rows.size(); ++k) {
    const double rate = (log.rows[k].obs[0].err.dist_R - log.rows[k - 1].obs[0].err.dist_R) /
                        log.dt;
    worst = std::max(worst, rate);
  }
  EXPECT_LE(worst, log.bounds->c_R);
}

TEST(Artifacts, CsvHeaderSchema) {
  const std::vector<std::string> h = csv_header({ObserverKind::Proposed, ObserverKind::Adhoc});
  const std::vector<std::string> base{"t", "p_x", "p_y", "p_z", "v_x", "v_y", "v_z"};
  const std::vector<std::string> per{"p_hat_x",        "p_hat_y",        "p_hat_z",
                                     "v_hat_x",        "v_hat_y",        "v_hat_z",
                                     "euler_err_roll", "euler_err_pitch", "euler_err_yaw",
                                     "dist_R",         "b_hat_x",        "b_hat_y",
                                     "b_hat_z",        "tilde_b_norm",   "sigma_R_norm",
                                     "sat_active",     "zeta_norm",      "V",
                                     "W"};
  std::vector<std::string> expected = base;
  for (const char* prefix : {"proposed_", "adhoc_"}) {
    for (const auto& c : per) expected.push_back(prefix + c);
  }
  EXPECT_EQ(h, expected);

  RunConfig cfg = short_run(0.01);
  const std::string csv = csv_of(run_scenario(cfg));
  std::istringstream in(csv);
  std::string first;
  std::getline(in, first);
  std::string joined;
  for (std::size_t i = 0; i < expected.size(); ++i) joined += (i ? "," : "") + expected[i];
  EXPECT_EQ(first, joined);
  std::string row;
  std::getline(in, row);
  EXPECT_EQ(row.find("nan"), std::string::npos);  // sampled row
  std::getline(in, row);
  EXPECT_NE(row.find("nan"), std::string::npos);  // unsampled row carries nan monitors
}

TEST(Artifacts, EmitsAllFiles) {
  const RunConfig cfg = short_run(1.0);
  const RunLog log = run_scenario(cfg);
  const auto dir = std::filesystem::temp_directory_path() / "navobs_unit_artifacts";
  std::filesystem::remove_all(dir);
  const auto files = emit_artifacts(log, cfg, dir);
  int svg = 0;
  for (const auto& f : files) {
    EXPECT_TRUE(std::filesystem::exists(f)) << f;
    EXPECT_GT(std::filesystem::file_size(f), 100u) << f;
    if (f.extension() == ".svg") ++svg;
  }
  EXPECT_EQ(svg, 5);
  EXPECT_TRUE(std::filesystem::exists(dir / "run.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
  std::ifstream s(dir / "summary.json");
  const std::string text((std::istreambuf_iterator<char>(s)), std::istreambuf_iterator<char>());
  EXPECT_NE(text.find("\"x_error_decay\""), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Bounds, ReportForScenario) {
  const BoundsCheck b = check_bounds(load_config(""));
  EXPECT_TRUE(b.assumptions.observability_ok);
  EXPECT_FALSE(b.assumptions.c_hat2_ok);
  ASSERT_TRUE(b.bounds.has_value());
  const std::string text = format_bounds(b);
  EXPECT_NE(text.find("k_R"), std::string::npos);
  EXPECT_NE(text.find("gamma"), std::string::npos);
}
