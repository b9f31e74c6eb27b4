#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "navobs/observer.hpp"
#include "navobs/so3.hpp"
#include "navobs/vehicle.hpp"

namespace navobs {

/// x~ = x - x_hat, R~ = R R_hat^T, b~ = b - b_hat, plus reporting quantities.
struct EstimationErrors {
  Vec6 tilde_x = Vec6::Zero();
  Rotation tilde_R;
  double dist_R = 0.0;
  Vec3 euler_err = Vec3::Zero();
  Vec3 tilde_b = Vec3::Zero();
};

struct ErrorSnapshot {
  double t = 0.0;
  EstimationErrors err;
  Vec6 zeta = Vec6::Zero();
  double V = 0.0;
  double W = 0.0;
};

EstimationErrors compute_errors(const TrueState& truth, const Vec3& b_omega,
                                const ObserverState& est);

/// zeta = L_gamma^{-1} [ (A - K C) x~ + B (I - R~)^T a_I ]
Vec6 compute_zeta(const Vec6& tilde_x, const Rotation& tilde_R, const Vec3& a_I,
                  const GainSet& gains, const SystemMatrices& sys);

/// Perturbation g(t, R~, b~) = (I - R~)^T a_I' + R~^T [a_I]_x R b~ driving zeta.
Vec3 zeta_disturbance(const Rotation& tilde_R, const Vec3& a_I, const Vec3& a_I_dot,
                      const Rotation& R, const Vec3& tilde_b);

/// d zeta / dt = gamma (A - K0 C) zeta + gamma^{-2} B g.
Vec6 zeta_derivative(const Vec6& zeta, const Vec3& disturbance, const GainSet& gains,
                     const SystemMatrices& sys);

struct LyapunovSolution {
  Mat6 P;
  double beta1 = 0.0;  // lambda_min(P)
  double beta2 = 0.0;  // lambda_max(P)
  double residual = 0.0;  // ||P A + A^T P + I||_F
};

/// Solves P A + A^T P = -I for Hurwitz A (Kronecker form). Throws NotHurwitz otherwise.
LyapunovSolution solve_lyapunov(const Mat6& a_cl);

/// V(zeta) = zeta^T P zeta / gamma
double monitor_V(const Vec6& zeta, const Mat6& P, double gamma);

/// W = |R~| + (mu k_R / 2 k_b) |b~|^2 + mu b~^T R_hat^T psi(R~) + gamma^5 V(zeta).
/// The first term is the normalized distance (1/4) tr(I - R~).
double monitor_W(const ErrorSnapshot& snapshot, const Rotation& R_hat, const GainSet& gains,
                 double mu, const Mat6& P);

/// Relative residual of (A - K C) sigma_x = -k_R B [R_hat sigma_R]_x R_hat a_B.
double sigma_x_identity_residual(const Innovations& in, const ObserverState& st,
                                 const ImuSample& meas, const GainSet& gains,
                                 const SystemMatrices& sys);

/// Largest Frobenius residual among L^-1 A L = gamma A, L^-1 B = gamma^-2 B, C L = gamma C.
double scaling_identity_residual(double gamma, const SystemMatrices& sys);

/// E(M) = (tr(M) I - M^T) / 2
Mat3 e_operator(const Mat3& m);

struct EMSpectrum {
  double lambda_min = 0.0;  // infimum over the grid
  double lambda_max = 0.0;  // supremum over the grid
  double t_lambda_min = 0.0;
  bool positive_definite = false;  // lambda_min > 0 at every grid point
};

/// Spectrum of E(M) with M = rho1 m_I m_I^T + rho2 a_I a_I^T along the grid.
EMSpectrum em_spectrum(const ScenarioConfig& cfg, double rho1, double rho2,
                       const std::vector<double>& t_grid);

struct GainBoundReport {
  double epsilon = 0.0;
  double mu = 0.0;
  double mu_max = 0.0;
  double kR_min = 0.0;
  double gamma_min = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  double alpha4 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double lambda_min_EM = 0.0;
  double lambda_max_EM = 0.0;
  double c_b = 0.0;
  double c_omega = 0.0;
  double c_g = 0.0;
  double c_R = 0.0;
  /// ||zeta|| above which V(zeta) must decrease: 4 beta2 c_g / gamma^3.
  double zeta_threshold = 0.0;
  bool kR_ok = false;
  bool gamma_ok = false;
};

/**
 * @brief Evaluates the sufficient gain conditions of the convergence proof.
 *
 * c_b = 2 c5 + eps_b bounds the bias error, c_omega = c4, and
 * c_g = sqrt(8) c3 + c2 c_b. When `mu` is not given, mu_max / 2 is used.
 * gamma_min is evaluated at the configured k_R. Throws ValidationError when
 * epsilon is outside (1/2, 1) or the E(M) spectrum is not positive.
 */
GainBoundReport sufficient_gain_bounds(const AssumptionReport& report, double epsilon,
                                     const GainSet& gains, const SystemMatrices& sys,
                                     const EMSpectrum& spectrum,
                                     std::optional<double> mu = std::nullopt);

struct RateFit {
  double rate = 0.0;  // slope of log(value) against t, 1/s
  double r_squared = 0.0;
  std::size_t samples = 0;
};

/// Least-squares fit of log(value) = a + rate t over samples with t >= t_start.
RateFit fit_exponential_rate(std::span<const std::pair<double, double>> series, double t_start);

}  // namespace navobs
