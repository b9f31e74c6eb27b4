#pragma once

#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "navobs/so3.hpp"

namespace navobs {

inline constexpr double kDegToRad = std::numbers::pi / 180.0;

enum class TrajectoryKind {
  /// Horizontal circle of unit radius with angular frequency growing linearly in time.
  Accelerating,
  /// Fixed position; the apparent acceleration is -g e3.
  Hover,
};

/// Position, velocity and apparent acceleration a_I = dv/dt - g e3 at one instant.
struct TranslationSample {
  Vec3 p;
  Vec3 v;
  Vec3 a_I;
};

struct TrueState {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a_I = Vec3::Zero();
  Rotation R;
  Vec3 omega = Vec3::Zero();
};

/// Body-frame IMU reading: biased gyro, apparent acceleration, magnetometer.
struct ImuSample {
  Vec3 omega_y = Vec3::Zero();
  Vec3 a_B = Vec3::Zero();
  Vec3 m_B = Vec3::Zero();
};

std::vector<Vec3> default_anchors();

struct ScenarioConfig {
  double g = 9.81;
  Vec3 m_I{0.033, 0.1, 0.49};
  Vec3 b_omega = Vec3::Constant(3.0 * kDegToRad);
  std::vector<Vec3> anchors = default_anchors();
  /// Index of the anchor used as the differencing reference for range outputs.
  std::size_t reference_anchor = 0;
  double t_end = 60.0;
  double dt = 1e-3;
  TrajectoryKind trajectory = TrajectoryKind::Accelerating;
  Vec3 hover_position{1.0, 0.0, 1.0};
  /// Rotation vector of the true initial attitude.
  Vec3 initial_attitude{std::numbers::pi / 2.0, 0.0, 0.0};
};

/// Analytic circle p(t) = [cos(2 pi t^2/100), sin(2 pi t^2/100), 1] and its derivatives.
TranslationSample true_translation(double t, double g = 9.81);

/// omega(t) = [sin(0.2 t), cos(0.1 t), sin(0.3 t + pi/6)].
Vec3 true_omega(double t);

TranslationSample translation_at(const ScenarioConfig& cfg, double t);

/// One exponential-map step R exp(dt * omega(t + dt/2)).
Rotation propagate_true_attitude(const Rotation& r, double t, double dt);

ImuSample measure_imu(const TrueState& state, const ScenarioConfig& cfg);

std::vector<double> measure_ranges(const Vec3& p, const std::vector<Vec3>& anchors);

/**
 * @brief Ground-truth generator on the fixed grid t_k = k dt.
 *
 * Translation is evaluated analytically at each grid time; attitude is
 * integrated with midpoint exponential steps from cfg.initial_attitude.
 */
class TruthSimulator {
 public:
  explicit TruthSimulator(const ScenarioConfig& cfg);

  const TrueState& state() const { return state_; }
  std::size_t step_index() const { return k_; }

  void advance();

  /// Truth at t_k + tau for 0 <= tau <= dt, without advancing.
  TrueState sample_ahead(double tau) const;

 private:
  TrueState make_state(double t, const Rotation& r) const;

  ScenarioConfig cfg_;
  std::size_t k_ = 0;
  TrueState state_;
};

/// Empirical trajectory constants of the observability and boundedness assumptions.
struct AssumptionReport {
  double c0 = 0.0;  // min ||m_I x a_I||
  double c1 = 0.0;  // min ||a_I||
  double c2 = 0.0;  // max ||a_I||
  double c3 = 0.0;  // max ||d a_I / dt||
  double c4 = 0.0;  // max ||omega||
  double c5 = 0.0;  // ||b_omega||
  double m_I_norm = 0.0;
  double t_c0 = 0.0;  // grid time where c0 is attained
  bool observability_ok = false;
  /// Stays true when no saturation level was supplied.
  bool c_hat2_ok = true;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Grid {0, dt, 2 dt, ...} with floor(t_end/dt) + 1 points.
std::vector<double> uniform_grid(double t_end, double dt);

std::size_t step_count(double t_end, double dt);

/**
 * Evaluates the assumption constants of `cfg` over `t_grid`. A violation is
 * recorded when c0 <= 1e-9, and when `c_hat2 > 0` is given and
 * c_hat2 <= sqrt(8) c2.
 */
AssumptionReport validate_assumptions(const ScenarioConfig& cfg, const std::vector<double>& t_grid,
                                      double c_hat2 = 0.0);

}  // namespace navobs
