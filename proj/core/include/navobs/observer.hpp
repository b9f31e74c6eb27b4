#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include <Eigen/Dense>

#include "navobs/range.hpp"
#include "navobs/so3.hpp"
#include "navobs/vehicle.hpp"

namespace navobs {

using Mat6X = Eigen::Matrix<double, 6, Eigen::Dynamic>;
using Mat3X = Eigen::Matrix<double, 3, Eigen::Dynamic>;
using MatX6 = Eigen::Matrix<double, Eigen::Dynamic, 6>;
using Mat63 = Eigen::Matrix<double, 6, 3>;

/// Block structure of the translational model x = [p; v]:
/// A = [0 I; 0 0], B = [0; I], C = [C_p 0].
struct SystemMatrices {
  Mat6 A;
  Mat63 B;
  MatX6 C;
  OutputMatrix C_p;

  Eigen::Index output_dim() const { return C.rows(); }
};

SystemMatrices make_system(const OutputMatrix& c_p);

/// Two real closed-loop eigenvalues for one axis of the (p, v) error dynamics.
struct PolePair {
  double first = -3.0;
  double second = -4.0;
};

/// User-facing gain parameters. synthesize_gains() turns these into a GainSet.
struct GainParams {
  double k_R = 2.0;
  double k_b = 1.0;
  double rho1 = 1.0;
  double rho2 = 1.0;
  double eps_b = 0.001;
  double c_hat2 = 9.0 * std::sqrt(8.0);
  double gamma = 2.0;
  /// Radius of the bias projection ball. Must be set (> 0) before synthesis.
  double c5 = 0.0;
  std::array<PolePair, 3> poles{};
};

struct GainSet {
  double k_R = 0.0;
  double k_b = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  double eps_b = 0.0;
  double c_hat2 = 0.0;
  double gamma = 1.0;
  double c5 = 0.0;
  Mat6X K0;
  Mat6X K;
  Mat3X K_p;
  Mat3X K_v;
  Mat6 L_gamma;
  /// (K_v C_p)^{-1}
  Mat3 KvCp_inv;
};

/// blockdiag(gamma I3, gamma^2 I3)
Mat6 high_gain_scaling(double gamma);

/**
 * @brief Builds K0 by per-axis pole placement and scales it to K = L_gamma K0.
 *
 * With C_p^+ the pseudoinverse, K_p0 = diag(s1) C_p^+ and K_v0 = diag(s2) C_p^+
 * where s^2 + s1 s + s2 has the requested pole pair as roots. Throws
 * NotHurwitz if a pole is not strictly negative or A - K0 C fails the
 * numerical eigenvalue check, and SingularKvCp if K_v C_p cannot be inverted.
 */
GainSet synthesize_gains(const OutputMatrix& c_p, const GainParams& params);

struct ObserverState {
  Vec6 x_hat = Vec6::Zero();
  Rotation R_hat;
  Vec3 b_hat = Vec3::Zero();

  Vec3 p_hat() const { return x_hat.head<3>(); }
  Vec3 v_hat() const { return x_hat.tail<3>(); }
};

struct Innovations {
  Vec3 sigma_R = Vec3::Zero();
  Vec3 sigma_p = Vec3::Zero();
  Vec3 sigma_v = Vec3::Zero();
  /// True when the saturation on K_v (y - C x_hat) clipped its argument.
  bool saturated = false;

  Vec6 sigma_x() const {
    Vec6 s;
    s << sigma_p, sigma_v;
    return s;
  }
};

/// Attitude and translational innovations of the coupled observer.
Innovations proposed_innovations(const ImuSample& meas, const Eigen::VectorXd& y,
                                 const ObserverState& st, const GainSet& gains,
                                 const SystemMatrices& sys, const Vec3& m_I);

/// Complementary-filter innovation assuming a_I = -g e3.
Vec3 adhoc_innovation(const ImuSample& meas, const ObserverState& st, const GainSet& gains,
                      const Vec3& m_I, double gravity);

/// Measurements available to one integration stage.
struct StageInput {
  ImuSample meas;
  Eigen::VectorXd y;
};

/// Measurements at t, t + dt/2 and t + dt, consumed by the RK4 stages.
struct StepInputs {
  StageInput start;
  StageInput mid;
  StageInput end;

  /// Zero-order hold: the same sample for every stage.
  static StepInputs held(const ImuSample& meas, const Eigen::VectorXd& y);
};

/**
 * One step of the coupled observer. The attitude advances on SO(3) through
 * exponential maps, (x_hat, b_hat) through classical RK4; innovations are
 * re-evaluated at every stage with the stage attitude and stage measurements.
 * When the attitude loop is stiff relative to dt (large specific force), the
 * step is split into equal RK4 substeps fed with inputs interpolated
 * quadratically through the three samples.
 */
ObserverState proposed_step(const ObserverState& st, const StepInputs& u, const GainSet& gains,
                            const SystemMatrices& sys, const Vec3& m_I, double gravity,
                            double dt);

ObserverState adhoc_step(const ObserverState& st, const StepInputs& u, const GainSet& gains,
                         const SystemMatrices& sys, const Vec3& m_I, double gravity, double dt);

/// Zero-order-hold variant of the step above.
ObserverState proposed_step(const ObserverState& st, const ImuSample& meas,
                            const Eigen::VectorXd& y, const GainSet& gains,
                            const SystemMatrices& sys, const Vec3& m_I, double gravity,
                            double dt);

/// Same integration scheme for the cascaded complementary filter + Luenberger observer.
ObserverState adhoc_step(const ObserverState& st, const ImuSample& meas, const Eigen::VectorXd& y,
                         const GainSet& gains, const SystemMatrices& sys, const Vec3& m_I,
                         double gravity, double dt);

enum class ObserverKind { Proposed, Adhoc };

const char* to_string(ObserverKind kind);

/**
 * @brief Stateful wrapper advancing one observer and periodically
 * re-orthonormalizing the attitude estimate.
 */
class NavigationObserver {
 public:
  static constexpr std::size_t kReorthonormalizePeriod = 1000;

  NavigationObserver(ObserverKind kind, ObserverState initial, GainSet gains, SystemMatrices sys,
                     Vec3 m_I, double gravity);

  void step(const StepInputs& u, double dt);
  /// Zero-order hold over the step.
  void step(const ImuSample& meas, const Eigen::VectorXd& y, double dt);

  /// Innovation at the current state (what the next step would start from).
  Innovations innovations(const ImuSample& meas, const Eigen::VectorXd& y) const;

  ObserverKind kind() const { return kind_; }
  const ObserverState& state() const { return state_; }
  const GainSet& gains() const { return gains_; }
  const SystemMatrices& system() const { return sys_; }
  std::size_t steps() const { return steps_; }

 private:
  ObserverKind kind_;
  ObserverState state_;
  GainSet gains_;
  SystemMatrices sys_;
  Vec3 m_I_;
  double gravity_;
  std::size_t steps_ = 0;
};

}  // namespace navobs
