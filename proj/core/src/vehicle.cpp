#include "navobs/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace navobs {

namespace {

const Vec3 kE3 = Vec3::UnitZ();

// Central-difference step for d(a_I)/dt.
constexpr double kJerkStep = 1e-4;

}  // namespace

std::vector<Vec3> default_anchors() {
  return {Vec3(1, 1, 2), Vec3(1, 3, 0), Vec3(0, 1, 1), Vec3(6, 5, 5)};
}

TranslationSample true_translation(double t, double g) {
  constexpr double pi = std::numbers::pi;
  const double phi = pi * t * t / 50.0;
  const double phi_d = pi * t / 25.0;
  const double phi_dd = pi / 25.0;
  const double c = std::cos(phi);
  const double s = std::sin(phi);

  TranslationSample out;
  out.p = Vec3(c, s, 1.0);
  out.v = Vec3(-s * phi_d, c * phi_d, 0.0);
  const Vec3 p_dd(-c * phi_d * phi_d - s * phi_dd, -s * phi_d * phi_d + c * phi_dd, 0.0);
  out.a_I = p_dd - g * kE3;
  return out;
}

Vec3 true_omega(double t) {
  return Vec3(std::sin(0.2 * t), std::cos(0.1 * t), std::sin(0.3 * t + std::numbers::pi / 6.0));
}

TranslationSample translation_at(const ScenarioConfig& cfg, double t) {
  switch (cfg.trajectory) {
    case TrajectoryKind::Hover:
      return {cfg.hover_position, Vec3::Zero(), -cfg.g * kE3};
    case TrajectoryKind::Accelerating:
      break;
  }
  return true_translation(t, cfg.g);
}

Rotation propagate_true_attitude(const Rotation& r, double t, double dt) {
  return r * exp_so3(dt * true_omega(t + 0.5 * dt));
}

ImuSample measure_imu(const TrueState& state, const ScenarioConfig& cfg) {
  const Mat3 rt = state.R.matrix().transpose();
  ImuSample out;
  out.omega_y = state.omega + cfg.b_omega;
  out.a_B = rt * state.a_I;
  out.m_B = rt * cfg.m_I;
  return out;
}

std::vector<double> measure_ranges(const Vec3& p, const std::vector<Vec3>& anchors) {
  std::vector<double> d;
  d.reserve(anchors.size());
  for (const auto& a : anchors) {
    d.push_back((p - a).norm());
  }
  return d;
}

TruthSimulator::TruthSimulator(const ScenarioConfig& cfg) : cfg_(cfg) {
  state_ = make_state(0.0, exp_so3(cfg_.initial_attitude));
}

TrueState TruthSimulator::make_state(double t, const Rotation& r) const {
  const TranslationSample tr = translation_at(cfg_, t);
  TrueState s;
  s.t = t;
  s.p = tr.p;
  s.v = tr.v;
  s.a_I = tr.a_I;
  s.R = r;
  s.omega = true_omega(t);
  return s;
}

void TruthSimulator::advance() {
  const double t = static_cast<double>(k_) * cfg_.dt;
  const Rotation r = propagate_true_attitude(state_.R, t, cfg_.dt);
  ++k_;
  state_ = make_state(static_cast<double>(k_) * cfg_.dt, r);
}

TrueState TruthSimulator::sample_ahead(double tau) const {
  const double t = static_cast<double>(k_) * cfg_.dt;
  if (tau <= 0.0) {
    return state_;
  }
  return make_state(t + tau, propagate_true_attitude(state_.R, t, tau));
}

std::size_t step_count(double t_end, double dt) {
  // Small relative slack so that e.g. 60 / 0.001 lands on 60000, not 59999.
  return static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12) + 1e-9));
}

std::vector<double> uniform_grid(double t_end, double dt) {
  const std::size_t n = step_count(t_end, dt);
  std::vector<double> grid(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    grid[k] = static_cast<double>(k) * dt;
  }
  return grid;
}

AssumptionReport validate_assumptions(const ScenarioConfig& cfg, const std::vector<double>& t_grid,
                                      double c_hat2) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  AssumptionReport rep;
  rep.c0 = inf;
  rep.c1 = inf;
  rep.c5 = cfg.b_omega.norm();
  rep.m_I_norm = cfg.m_I.norm();

  for (const double t : t_grid) {
    const Vec3 a = translation_at(cfg, t).a_I;
    const double cross = cfg.m_I.cross(a).norm();
    if (cross < rep.c0) {
      rep.c0 = cross;
      rep.t_c0 = t;
    }
    rep.c1 = std::min(rep.c1, a.norm());
    rep.c2 = std::max(rep.c2, a.norm());
    const Vec3 a_plus = translation_at(cfg, t + kJerkStep).a_I;
    const Vec3 a_minus = translation_at(cfg, t - kJerkStep).a_I;
    rep.c3 = std::max(rep.c3, ((a_plus - a_minus) / (2.0 * kJerkStep)).norm());
    rep.c4 = std::max(rep.c4, true_omega(t).norm());
  }

  rep.observability_ok = rep.c0 > 1e-9;
  if (!rep.observability_ok) {
    std::ostringstream os;
    os << "observability: min ||m_I x a_I|| = " << rep.c0 << " at t = " << rep.t_c0
       << " (m_I and a_I collinear)";
    rep.violations.push_back(os.str());
  }
  if (c_hat2 > 0.0) {
    const double needed = std::sqrt(8.0) * rep.c2;
    rep.c_hat2_ok = c_hat2 > needed;
    if (!rep.c_hat2_ok) {
      std::ostringstream os;
      os << "saturation level: c_hat2 = " << c_hat2 << " <= sqrt(8) c2 = " << needed;
      rep.violations.push_back(os.str());
    }
  }
  return rep;
}

}  // namespace navobs
