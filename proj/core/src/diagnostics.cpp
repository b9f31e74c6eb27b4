#include "navobs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "navobs/errors.hpp"

namespace navobs {

EstimationErrors compute_errors(const TrueState& truth, const Vec3& b_omega,
                                const ObserverState& est) {
  EstimationErrors e;
  e.tilde_x.head<3>() = truth.p - est.p_hat();
  e.tilde_x.tail<3>() = truth.v - est.v_hat();
  e.tilde_R = truth.R * est.R_hat.transpose();
  e.dist_R = so3_distance(e.tilde_R);
  e.euler_err = euler_zyx(e.tilde_R);
  e.tilde_b = b_omega - est.b_hat;
  return e;
}

Vec6 compute_zeta(const Vec6& tilde_x, const Rotation& tilde_R, const Vec3& a_I,
                  const GainSet& gains, const SystemMatrices& sys) {
  const Mat6 a_kc = sys.A - gains.K * sys.C;
  const Vec6 bracket =
      a_kc * tilde_x + sys.B * ((Mat3::Identity() - tilde_R.matrix()).transpose() * a_I);
  // L_gamma is diagonal.
  Vec6 zeta;
  zeta.head<3>() = bracket.head<3>() / gains.gamma;
  zeta.tail<3>() = bracket.tail<3>() / (gains.gamma * gains.gamma);
  return zeta;
}

Vec3 zeta_disturbance(const Rotation& tilde_R, const Vec3& a_I, const Vec3& a_I_dot,
                      const Rotation& R, const Vec3& tilde_b) {
  const Mat3& rt = tilde_R.matrix();
  return (Mat3::Identity() - rt).transpose() * a_I_dot +
         rt.transpose() * skew(a_I) * R.matrix() * tilde_b;
}

Vec6 zeta_derivative(const Vec6& zeta, const Vec3& disturbance, const GainSet& gains,
                     const SystemMatrices& sys) {
  const Mat6 a_cl = sys.A - gains.K0 * sys.C;
  return gains.gamma * (a_cl * zeta) + sys.B * disturbance / (gains.gamma * gains.gamma);
}

LyapunovSolution solve_lyapunov(const Mat6& a_cl) {
  const Eigen::VectorXcd eig = a_cl.eigenvalues();
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (!(eig(i).real() < 0.0)) {
      std::ostringstream os;
      os << "Lyapunov solve needs a Hurwitz matrix; found eigenvalue with real part "
         << eig(i).real();
      throw NotHurwitz(os.str());
    }
  }

  // Column-major vec: vec(A^T P) = (I kron A^T) vec(P), vec(P A) = (A^T kron I) vec(P).
  constexpr int n = 6;
  Eigen::Matrix<double, n * n, n * n> op = Eigen::Matrix<double, n * n, n * n>::Zero();
  const Mat6 at = a_cl.transpose();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // block (i, j) of I kron A^T
      if (i == j) {
        op.block<n, n>(i * n, j * n) += at;
      }
      // block (i, j) of A^T kron I
      op.block<n, n>(i * n, j * n) += at(i, j) * Mat6::Identity();
    }
  }
  const Mat6 rhs = -Mat6::Identity();
  const Eigen::Matrix<double, n * n, 1> vec_rhs = Eigen::Map<const Eigen::Matrix<double, n * n, 1>>(rhs.data());
  const Eigen::Matrix<double, n * n, 1> vec_p = op.fullPivLu().solve(vec_rhs);

  LyapunovSolution sol;
  sol.P = Eigen::Map<const Mat6>(vec_p.data());
  sol.P = 0.5 * (sol.P + sol.P.transpose()).eval();
  sol.residual = (sol.P * a_cl + at * sol.P + Mat6::Identity()).norm();
  Eigen::SelfAdjointEigenSolver<Mat6> es(sol.P);
  sol.beta1 = es.eigenvalues().minCoeff();
  sol.beta2 = es.eigenvalues().maxCoeff();
  return sol;
}

double monitor_V(const Vec6& zeta, const Mat6& P, double gamma) {
  return zeta.dot(P * zeta) / gamma;
}

double monitor_W(const ErrorSnapshot& snapshot, const Rotation& R_hat, const GainSet& gains,
                 double mu, const Mat6& P) {
  const Vec3& tb = snapshot.err.tilde_b;
  const double v = monitor_V(snapshot.zeta, P, gains.gamma);
  return snapshot.err.dist_R + mu * gains.k_R / (2.0 * gains.k_b) * tb.squaredNorm() +
         mu * tb.dot(R_hat.matrix().transpose() * psi(snapshot.err.tilde_R.matrix())) +
         std::pow(gains.gamma, 5) * v;
}

double sigma_x_identity_residual(const Innovations& in, const ObserverState& st,
                                 const ImuSample& meas, const GainSet& gains,
                                 const SystemMatrices& sys) {
  const Vec6 sx = in.sigma_x();
  const Vec6 a_part = sys.A * sx;
  const Vec6 kc_part = gains.K * (sys.C * sx);
  const Mat3& r_hat = st.R_hat.matrix();
  const Vec6 rhs = -gains.k_R * sys.B * (r_hat * in.sigma_R).cross(r_hat * meas.a_B);
  const double scale = a_part.norm() + kc_part.norm() + rhs.norm();
  if (scale == 0.0) {
    return 0.0;
  }
  return ((a_part - kc_part) - rhs).norm() / scale;
}

double scaling_identity_residual(double gamma, const SystemMatrices& sys) {
  const Mat6 l = high_gain_scaling(gamma);
  const Mat6 l_inv = l.inverse();
  const double r1 = (l_inv * sys.A * l - gamma * sys.A).norm() / (gamma * sys.A.norm());
  const double r2 = (l_inv * sys.B - sys.B / (gamma * gamma)).norm() * gamma * gamma / sys.B.norm();
  const double r3 = (sys.C * l - gamma * sys.C).norm() / (gamma * sys.C.norm());
  return std::max({r1, r2, r3});
}

Mat3 e_operator(const Mat3& m) { return 0.5 * (m.trace() * Mat3::Identity() - m.transpose()); }

EMSpectrum em_spectrum(const ScenarioConfig& cfg, double rho1, double rho2,
                       const std::vector<double>& t_grid) {
  EMSpectrum out;
  out.lambda_min = std::numeric_limits<double>::infinity();
  out.lambda_max = -std::numeric_limits<double>::infinity();
  const Mat3 mm = rho1 * cfg.m_I * cfg.m_I.transpose();
  for (const double t : t_grid) {
    const Vec3 a = translation_at(cfg, t).a_I;
    const Mat3 m = mm + rho2 * a * a.transpose();
    // M is symmetric, so E(M) is too.
    Eigen::SelfAdjointEigenSolver<Mat3> es(e_operator(m), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(2);
    if (lo < out.lambda_min) {
      out.lambda_min = lo;
      out.t_lambda_min = t;
    }
    out.lambda_max = std::max(out.lambda_max, hi);
  }
  out.positive_definite = out.lambda_min > 0.0;
  return out;
}

GainBoundReport sufficient_gain_bounds(const AssumptionReport& report, double epsilon,
                                     const GainSet& gains, const SystemMatrices& sys,
                                     const EMSpectrum& spectrum, std::optional<double> mu) {
  if (!(epsilon > 0.5 && epsilon < 1.0)) {
    std::ostringstream os;
    os << "must lie in (0.5, 1), got " << epsilon;
    throw ValidationError("epsilon", os.str());
  }
  if (!(spectrum.lambda_min > 0.0)) {
    throw ValidationError("scenario",
                          "E(M) is not positive definite along the trajectory (m_I and a_I "
                          "collinear somewhere)");
  }

  const double sqrt2 = std::sqrt(2.0);
  const double lmin = spectrum.lambda_min;
  const double lmax = spectrum.lambda_max;
  const double shrink = 1.0 - epsilon * epsilon;

  GainBoundReport r;
  r.epsilon = epsilon;
  r.lambda_min_EM = lmin;
  r.lambda_max_EM = lmax;
  r.c_b = 2.0 * gains.c5 + gains.eps_b;
  r.c_omega = report.c4;
  r.c_g = std::sqrt(8.0) * report.c3 + report.c2 * r.c_b;
  r.c_R = r.c_b + gains.k_R * (gains.rho1 * report.m_I_norm * report.m_I_norm +
                               gains.rho2 * report.c2 * gains.c_hat2);

  const LyapunovSolution lyap = solve_lyapunov(sys.A - gains.K0 * sys.C);
  r.beta1 = lyap.beta1;
  r.beta2 = lyap.beta2;

  r.alpha1 = 8.0 * r.c_b * r.c_b + 4.0 * gains.k_b * lmax;
  r.alpha2 = 8.0 * lmax * r.c_b * (sqrt2 + 4.0);
  r.alpha3 = 2.0 * gains.k_b * gains.rho2 * report.c2;
  r.alpha4 = 2.0 * gains.rho2 * r.c_b * report.c2 * (sqrt2 + 4.0);

  r.mu_max = r.alpha2 > 0.0 ? lmin * shrink / r.alpha2 : std::numeric_limits<double>::infinity();
  if (mu) {
    r.mu = *mu;
  } else if (std::isfinite(r.mu_max)) {
    r.mu = 0.5 * r.mu_max;
  } else {
    throw ValidationError("mu", "mu must be given when the upper bound on mu is unbounded");
  }
  if (!(r.mu > 0.0)) {
    throw ValidationError("mu", "must be positive");
  }

  const double mu_v = r.mu;
  const double k_r = gains.k_R;
  const double spread = 1.0 + 2.0 * r.c_omega * mu_v;
  r.kR_min = std::max(2.0 * mu_v * gains.k_b,
                      (2.0 * r.alpha1 * mu_v * mu_v + spread * spread) / (2.0 * mu_v * lmin * shrink));

  const double mix = r.alpha3 + k_r * r.alpha4;
  r.gamma_min = std::max(4.0 * r.beta2 * r.beta2 * report.c2 * report.c2 / mu_v,
                         (k_r * gains.rho2 * report.c2 + 4.0 * sqrt2 * r.beta2 * report.c3 +
                          mu_v * mix * mix) /
                             (4.0 * k_r * lmin * shrink));

  r.zeta_threshold = 4.0 * r.beta2 * r.c_g / std::pow(gains.gamma, 3);
  r.kR_ok = k_r > r.kR_min;
  r.gamma_ok = gains.gamma > r.gamma_min;
  return r;
}

RateFit fit_exponential_rate(std::span<const std::pair<double, double>> series, double t_start) {
  double sum_t = 0.0;
  double sum_y = 0.0;
  std::size_t n = 0;
  for (const auto& [t, value] : series) {
    if (t < t_start) {
      continue;
    }
    if (!(value > 0.0)) {
      std::ostringstream os;
      os << "value " << value << " at t = " << t << " is not positive";
      throw NonPositiveSeries(os.str());
    }
    sum_t += t;
    sum_y += std::log(value);
    ++n;
  }
  if (n < 10) {
    std::ostringstream os;
    os << "exponential fit needs at least 10 samples after t = " << t_start << ", got " << n;
    throw Error(os.str());
  }
  const double mean_t = sum_t / static_cast<double>(n);
  const double mean_y = sum_y / static_cast<double>(n);
  double s_tt = 0.0;
  double s_ty = 0.0;
  double s_yy = 0.0;
  for (const auto& [t, value] : series) {
    if (t < t_start) {
      continue;
    }
    const double dt = t - mean_t;
    const double dy = std::log(value) - mean_y;
    s_tt += dt * dt;
    s_ty += dt * dy;
    s_yy += dy * dy;
  }
  RateFit fit;
  fit.samples = n;
  fit.rate = s_tt > 0.0 ? s_ty / s_tt : 0.0;
  // A constant series is fitted exactly by a zero slope.
  fit.r_squared = s_yy > 0.0 ? (s_ty * s_ty) / (s_tt * s_yy) : 1.0;
  return fit;
}

}  // namespace navobs
