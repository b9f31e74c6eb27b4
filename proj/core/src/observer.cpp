#include "navobs/observer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "navobs/errors.hpp"

namespace navobs {

namespace {

const Vec3 kE3 = Vec3::UnitZ();

// Explicit RK4 is stable for h * lambda below about 2.78 on the real axis.
constexpr double kMaxStepRate = 1.0;
constexpr int kMaxSubsteps = 4096;
// Largest bias move per substep near the ball boundary, as a fraction of eps_b.
constexpr double kLayerFraction = 0.5;

struct StageDerivative {
  Vec3 omega;  // body rate driving R_hat
  Vec6 x_dot;
  Vec3 b_dot;
};

/// Vector field shared by both observers; they differ only in the innovations.
template <typename InnovationFn>
StageDerivative evaluate(const Mat3& r_hat, const Vec6& x_hat, const Vec3& b_hat,
                         const StageInput& u, const GainSet& g, const SystemMatrices& sys,
                         double gravity, InnovationFn&& innovate) {
  const ImuSample& meas = u.meas;
  const Eigen::VectorXd& y = u.y;
  ObserverState stage{x_hat, Rotation::unchecked(r_hat), b_hat};
  const Innovations in = innovate(stage, u);
  StageDerivative d;
  d.omega = meas.omega_y - b_hat + g.k_R * in.sigma_R;
  d.b_dot = proj(g.c5, g.eps_b, b_hat, -g.k_b * in.sigma_R);
  d.x_dot = sys.A * x_hat + sys.B * (gravity * kE3 + r_hat * meas.a_B) +
            g.K * (y - sys.C * x_hat) + in.sigma_x();
  return d;
}

template <typename InnovationFn>
ObserverState rk4_substep(const ObserverState& st, const StepInputs& u, const GainSet& g,
                       const SystemMatrices& sys, double gravity, double dt,
                       InnovationFn&& innovate) {
  const Mat3& r0 = st.R_hat.matrix();
  const auto f = [&](const Mat3& r, const Vec6& x, const Vec3& b, const StageInput& in) {
    return evaluate(r, x, b, in, g, sys, gravity, innovate);
  };
  const double h = 0.5 * dt;

  const StageDerivative k1 = f(r0, st.x_hat, st.b_hat, u.start);
  const StageDerivative k2 = f(r0 * exp_so3(h * k1.omega).matrix(), st.x_hat + h * k1.x_dot,
                               st.b_hat + h * k1.b_dot, u.mid);
  const StageDerivative k3 = f(r0 * exp_so3(h * k2.omega).matrix(), st.x_hat + h * k2.x_dot,
                               st.b_hat + h * k2.b_dot, u.mid);
  const StageDerivative k4 = f(r0 * exp_so3(dt * k3.omega).matrix(), st.x_hat + dt * k3.x_dot,
                               st.b_hat + dt * k3.b_dot, u.end);

  const double w = dt / 6.0;
  ObserverState next;
  next.R_hat = st.R_hat * exp_so3(w * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega));
  next.x_hat = st.x_hat + w * (k1.x_dot + 2.0 * k2.x_dot + 2.0 * k3.x_dot + k4.x_dot);
  next.b_hat = st.b_hat + w * (k1.b_dot + 2.0 * k2.b_dot + 2.0 * k3.b_dot + k4.b_dot);
  return next;
}

/// Quadratic interpolation through samples at fractions 0, 1/2, 1 of the step.
template <typename T>
T lagrange3(const T& a, const T& m, const T& b, double s) {
  const double la = 2.0 * (s - 0.5) * (s - 1.0);
  const double lm = -4.0 * s * (s - 1.0);
  const double lb = 2.0 * s * (s - 0.5);
  return (la * a + lm * m + lb * b).eval();
}

StageInput interpolate(const StepInputs& u, double s) {
  if (s == 0.0) return u.start;
  if (s == 0.5) return u.mid;
  if (s == 1.0) return u.end;
  StageInput out;
  out.meas.omega_y = lagrange3(u.start.meas.omega_y, u.mid.meas.omega_y, u.end.meas.omega_y, s);
  out.meas.a_B = lagrange3(u.start.meas.a_B, u.mid.meas.a_B, u.end.meas.a_B, s);
  out.meas.m_B = lagrange3(u.start.meas.m_B, u.mid.meas.m_B, u.end.meas.m_B, s);
  out.y = lagrange3(u.start.y, u.mid.y, u.end.y, s);
  return out;
}

/// Upper estimate of the fastest linearized rate of the closed loop [1/s].
double stiffness(const StepInputs& u, const GainSet& g) {
  double rate = g.gamma * g.gamma * g.K0.norm();
  for (const StageInput* in : {&u.start, &u.mid, &u.end}) {
    const double a2 = in->meas.a_B.squaredNorm();
    const double m2 = in->meas.m_B.squaredNorm();
    rate = std::max(rate, g.k_R * (g.rho1 * m2 + g.rho2 * a2) + g.k_b);
  }
  return rate;
}

/// Substeps needed so that b_hat cannot jump across the projection layer of
/// width eps_b in one substep when it may reach the ball of radius c5.
double bias_layer_substeps(const ObserverState& st, const Vec3& sigma_R, const GainSet& g,
                           double dt) {
  const double travel = dt * g.k_b * sigma_R.norm();
  if (st.b_hat.norm() + travel < g.c5) {
    return 1.0;
  }
  return std::ceil(travel / (kLayerFraction * g.eps_b));
}

template <typename InnovationFn>
ObserverState rk4_step(const ObserverState& st, const StepInputs& u, const GainSet& g,
                       const SystemMatrices& sys, double gravity, double dt,
                       InnovationFn&& innovate) {
  const Vec3 sigma_R0 = innovate(st, u.start).sigma_R;
  const double needed = std::max(std::ceil(dt * stiffness(u, g) / kMaxStepRate),
                                 bias_layer_substeps(st, sigma_R0, g, dt));
  const int n = static_cast<int>(std::clamp(needed, 1.0, static_cast<double>(kMaxSubsteps)));
  if (n == 1) {
    return rk4_substep(st, u, g, sys, gravity, dt, innovate);
  }
  const double h = dt / n;
  ObserverState cur = st;
  for (int i = 0; i < n; ++i) {
    const double s0 = static_cast<double>(i) / n;
    const double s1 = static_cast<double>(i + 1) / n;
    const StepInputs sub{interpolate(u, s0), interpolate(u, 0.5 * (s0 + s1)),
                         interpolate(u, s1)};
    cur = rk4_substep(cur, sub, g, sys, gravity, h, innovate);
  }
  return cur;
}

void check_dt(double dt) {
  if (!(dt > 0.0)) {
    throw Error("observer step requires dt > 0");
  }
}

}  // namespace

SystemMatrices make_system(const OutputMatrix& c_p) {
  SystemMatrices sys;
  sys.A.setZero();
  sys.A.topRightCorner<3, 3>().setIdentity();
  sys.B.setZero();
  sys.B.bottomRows<3>().setIdentity();
  sys.C = MatX6::Zero(c_p.rows(), 6);
  sys.C.leftCols<3>() = c_p;
  sys.C_p = c_p;
  return sys;
}

Mat6 high_gain_scaling(double gamma) {
  Mat6 l = Mat6::Zero();
  l.topLeftCorner<3, 3>() = gamma * Mat3::Identity();
  l.bottomRightCorner<3, 3>() = gamma * gamma * Mat3::Identity();
  return l;
}

GainSet synthesize_gains(const OutputMatrix& c_p, const GainParams& params) {
  if (c_p.cols() != 3 || c_p.rows() < 3) {
    throw DimensionMismatch("C_p must be m x 3 with m >= 3");
  }
  if (smallest_singular_value(c_p) < kRankTol) {
    throw CoplanarAnchors("C_p does not have rank 3");
  }

  Vec3 s1;
  Vec3 s2;
  for (int axis = 0; axis < 3; ++axis) {
    const PolePair& pp = params.poles[static_cast<std::size_t>(axis)];
    if (!(pp.first < 0.0) || !(pp.second < 0.0)) {
      std::ostringstream os;
      os << "requested poles (" << pp.first << ", " << pp.second << ") on axis " << axis
         << " are not strictly negative";
      throw NotHurwitz(os.str());
    }
    // (s - l1)(s - l2) = s^2 + s1 s + s2
    s1(axis) = -(pp.first + pp.second);
    s2(axis) = pp.first * pp.second;
  }

  const Eigen::Matrix<double, 3, Eigen::Dynamic> c_pinv =
      c_p.completeOrthogonalDecomposition().pseudoInverse();

  GainSet g;
  g.k_R = params.k_R;
  g.k_b = params.k_b;
  g.rho1 = params.rho1;
  g.rho2 = params.rho2;
  g.eps_b = params.eps_b;
  g.c_hat2 = params.c_hat2;
  g.gamma = params.gamma;
  g.c5 = params.c5;

  const Eigen::Index m = c_p.rows();
  g.K0 = Mat6X(6, m);
  g.K0.topRows<3>() = s1.asDiagonal() * c_pinv;
  g.K0.bottomRows<3>() = s2.asDiagonal() * c_pinv;

  const SystemMatrices sys = make_system(c_p);
  const Mat6 a_cl = sys.A - g.K0 * sys.C;
  const Eigen::VectorXcd eig = a_cl.eigenvalues();
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (!(eig(i).real() < 0.0)) {
      std::ostringstream os;
      os << "A - K0 C has eigenvalue " << eig(i).real() << " + " << eig(i).imag() << "i";
      throw NotHurwitz(os.str());
    }
  }

  g.L_gamma = high_gain_scaling(params.gamma);
  g.K = g.L_gamma * g.K0;
  g.K_p = g.K.topRows<3>();
  g.K_v = g.K.bottomRows<3>();

  const Mat3 kv_cp = g.K_v * c_p;
  const Eigen::PartialPivLU<Mat3> lu(kv_cp);
  if (!(lu.rcond() > 1e-12)) {
    throw SingularKvCp("K_v C_p is singular; the translational coupling cannot be formed");
  }
  g.KvCp_inv = lu.inverse();
  return g;
}

Innovations proposed_innovations(const ImuSample& meas, const Eigen::VectorXd& y,
                                 const ObserverState& st, const GainSet& gains,
                                 const SystemMatrices& sys, const Vec3& m_I) {
  const Mat3& r_hat = st.R_hat.matrix();
  const Mat3 r_hat_t = r_hat.transpose();

  const Vec3 correction = gains.K_v * (y - sys.C * st.x_hat);
  const Vec3 a_ref = sat(gains.c_hat2, correction);

  Innovations in;
  in.saturated = correction.norm() > gains.c_hat2;
  in.sigma_R = gains.rho1 * meas.m_B.cross(r_hat_t * m_I) +
               gains.rho2 * meas.a_B.cross(r_hat_t * a_ref);
  const Vec3 a_hat = r_hat * meas.a_B;
  in.sigma_p = gains.k_R * gains.KvCp_inv * (r_hat * in.sigma_R).cross(a_hat);
  in.sigma_v = gains.K_p * sys.C_p * in.sigma_p;
  return in;
}

Vec3 adhoc_innovation(const ImuSample& meas, const ObserverState& st, const GainSet& gains,
                      const Vec3& m_I, double gravity) {
  const Mat3 r_hat_t = st.R_hat.matrix().transpose();
  return gains.rho1 * meas.m_B.cross(r_hat_t * m_I) +
         gains.rho2 * meas.a_B.cross(r_hat_t * (-gravity * kE3));
}

StepInputs StepInputs::held(const ImuSample& meas, const Eigen::VectorXd& y) {
  const StageInput u{meas, y};
  return {u, u, u};
}

ObserverState proposed_step(const ObserverState& st, const StepInputs& u, const GainSet& gains,
                            const SystemMatrices& sys, const Vec3& m_I, double gravity,
                            double dt) {
  check_dt(dt);
  return rk4_step(st, u, gains, sys, gravity, dt,
                  [&](const ObserverState& s, const StageInput& in) {
                    return proposed_innovations(in.meas, in.y, s, gains, sys, m_I);
                  });
}

ObserverState adhoc_step(const ObserverState& st, const StepInputs& u, const GainSet& gains,
                         const SystemMatrices& sys, const Vec3& m_I, double gravity, double dt) {
  check_dt(dt);
  return rk4_step(st, u, gains, sys, gravity, dt,
                  [&](const ObserverState& s, const StageInput& in) {
                    Innovations out;
                    out.sigma_R = adhoc_innovation(in.meas, s, gains, m_I, gravity);
                    return out;
                  });
}

ObserverState proposed_step(const ObserverState& st, const ImuSample& meas,
                            const Eigen::VectorXd& y, const GainSet& gains,
                            const SystemMatrices& sys, const Vec3& m_I, double gravity,
                            double dt) {
  return proposed_step(st, StepInputs::held(meas, y), gains, sys, m_I, gravity, dt);
}

ObserverState adhoc_step(const ObserverState& st, const ImuSample& meas, const Eigen::VectorXd& y,
                         const GainSet& gains, const SystemMatrices& sys, const Vec3& m_I,
                         double gravity, double dt) {
  return adhoc_step(st, StepInputs::held(meas, y), gains, sys, m_I, gravity, dt);
}

const char* to_string(ObserverKind kind) {
  switch (kind) {
    case ObserverKind::Proposed:
      return "proposed";
    case ObserverKind::Adhoc:
      return "adhoc";
  }
  return "unknown";
}

NavigationObserver::NavigationObserver(ObserverKind kind, ObserverState initial, GainSet gains,
                                       SystemMatrices sys, Vec3 m_I, double gravity)
    : kind_(kind),
      state_(std::move(initial)),
      gains_(std::move(gains)),
      sys_(std::move(sys)),
      m_I_(std::move(m_I)),
      gravity_(gravity) {}

void NavigationObserver::step(const ImuSample& meas, const Eigen::VectorXd& y, double dt) {
  step(StepInputs::held(meas, y), dt);
}

void NavigationObserver::step(const StepInputs& u, double dt) {
  switch (kind_) {
    case ObserverKind::Proposed:
      state_ = proposed_step(state_, u, gains_, sys_, m_I_, gravity_, dt);
      break;
    case ObserverKind::Adhoc:
      state_ = adhoc_step(state_, u, gains_, sys_, m_I_, gravity_, dt);
      break;
  }
  ++steps_;
  if (steps_ % kReorthonormalizePeriod == 0) {
    state_.R_hat = Rotation::nearest(state_.R_hat.matrix());
  }
}

Innovations NavigationObserver::innovations(const ImuSample& meas, const Eigen::VectorXd& y) const {
  if (kind_ == ObserverKind::Proposed) {
    return proposed_innovations(meas, y, state_, gains_, sys_, m_I_);
  }
  Innovations in;
  in.sigma_R = adhoc_innovation(meas, state_, gains_, m_I_, gravity_);
  return in;
}

}  // namespace navobs
