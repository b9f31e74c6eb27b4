#include "navobs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "navobs/errors.hpp"
#include "navobs/range.hpp"

namespace navobs {

namespace {

constexpr double kDivergenceNorm = 1e9;

OutputMatrix output_matrix(const RunConfig& cfg) {
  if (cfg.sensor_mode == SensorMode::Gps) {
    return OutputMatrix::Identity(3, 3);
  }
  return build_Cp(cfg.scenario.anchors, cfg.scenario.reference_anchor);
}

Eigen::VectorXd measure_output(const RunConfig& cfg, const Vec3& p) {
  if (cfg.sensor_mode == SensorMode::Gps) {
    return gps_output(p).y;
  }
  const auto& anchors = cfg.scenario.anchors;
  return build_y(measure_ranges(p, anchors), anchors, cfg.scenario.reference_anchor);
}

void check_divergence(const ObserverState& st, ObserverKind kind, double t) {
  const double n = std::max({st.x_hat.norm(), st.b_hat.norm(), st.R_hat.matrix().norm()});
  if (!(n <= kDivergenceNorm)) {
    std::ostringstream os;
    os << to_string(kind) << " observer diverged at t = " << t;
    if (std::isfinite(n)) {
      os << " (state norm " << n << ")";
    } else {
      os << " (non-finite state)";
    }
    throw DivergenceDetected(os.str());
  }
}

MonitorSample evaluate_monitor(const RunLog& log, ObserverKind kind, const TrueState& truth,
                               const ImuSample& meas, const Eigen::VectorXd& y,
                               const ObserverState& st, const EstimationErrors& err,
                               const Innovations& in) {
  const GainSet& g = log.gains;
  const SystemMatrices& sys = log.sys;
  MonitorSample m;
  m.zeta = compute_zeta(err.tilde_x, err.tilde_R, truth.a_I, g, sys);
  m.V = monitor_V(m.zeta, log.lyapunov.P, g.gamma);
  ErrorSnapshot snap{truth.t, err, m.zeta, m.V, 0.0};
  m.W = monitor_W(snap, st.R_hat, g, log.mu, log.lyapunov.P);
  if (kind == ObserverKind::Proposed) {
    m.identity_residual = sigma_x_identity_residual(in, st, meas, g, sys);
  }
  const Vec3 lhs = g.K_v * (y - sys.C * st.x_hat);
  const Vec6 l_zeta = g.L_gamma * m.zeta;
  const Vec3 rhs = -l_zeta.tail<3>() +
                   (Mat3::Identity() - err.tilde_R.matrix()).transpose() * truth.a_I;
  const double scale = lhs.norm() + l_zeta.tail<3>().norm() + truth.a_I.norm();
  m.correction_residual = scale > 0.0 ? (lhs - rhs).norm() / scale : 0.0;
  return m;
}

}  // namespace

std::optional<std::size_t> RunLog::index_of(ObserverKind kind) const {
  const auto it = std::find(observers.begin(), observers.end(), kind);
  if (it == observers.end()) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - observers.begin());
}

ObserverSetup make_observer_setup(const RunConfig& cfg) {
  ObserverSetup s;
  const OutputMatrix c_p = output_matrix(cfg);
  s.gains = synthesize_gains(c_p, cfg.gains);
  s.sys = make_system(c_p);
  s.initial.x_hat << cfg.initial.p, cfg.initial.v;
  s.initial.R_hat = exp_so3(cfg.initial.attitude);
  s.initial.b_hat = cfg.initial.b;
  return s;
}

std::vector<ObserverKind> selected_observers(ObserverSelection sel) {
  switch (sel) {
    case ObserverSelection::Proposed:
      return {ObserverKind::Proposed};
    case ObserverSelection::Adhoc:
      return {ObserverKind::Adhoc};
    case ObserverSelection::Both:
      break;
  }
  return {ObserverKind::Proposed, ObserverKind::Adhoc};
}

RunLog run_scenario(const RunConfig& cfg) {
  const ScenarioConfig& sc = cfg.scenario;
  const ObserverSetup setup = make_observer_setup(cfg);

  RunLog log;
  log.dt = sc.dt;
  log.observers = selected_observers(cfg.observers);
  log.gains = setup.gains;
  log.sys = setup.sys;
  log.lyapunov = solve_lyapunov(setup.sys.A - setup.gains.K0 * setup.sys.C);
  const std::vector<double> grid = uniform_grid(sc.t_end, sc.dt);
  log.assumptions = validate_assumptions(sc, grid, setup.gains.c_hat2);
  log.spectrum = em_spectrum(sc, setup.gains.rho1, setup.gains.rho2, grid);
  try {
    log.bounds = sufficient_gain_bounds(log.assumptions, cfg.epsilon, setup.gains, setup.sys,
                                      log.spectrum, cfg.mu);
  } catch (const ValidationError&) {
    log.bounds.reset();
  }
  log.mu = cfg.mu ? *cfg.mu : (log.bounds ? log.bounds->mu : 0.0);
  log.scaling_residual = scaling_identity_residual(setup.gains.gamma, setup.sys);

  std::vector<NavigationObserver> observers;
  for (const ObserverKind kind : log.observers) {
    observers.emplace_back(kind, setup.initial, setup.gains, setup.sys, sc.m_I, sc.g);
    log.summaries.push_back({kind, 0.0, 0.0});
  }

  TruthSimulator truth(sc);
  const std::size_t n = step_count(sc.t_end, sc.dt);
  log.rows.reserve(n + 1);

  for (std::size_t k = 0;; ++k) {
    const TrueState& ts = truth.state();
    const ImuSample meas = measure_imu(ts, sc);
    const Eigen::VectorXd y = measure_output(cfg, ts.p);
    const bool sample_monitor = k % cfg.monitor_decimation == 0;

    RunRow row;
    row.truth = ts;
    row.obs.reserve(observers.size());
    for (std::size_t i = 0; i < observers.size(); ++i) {
      const NavigationObserver& ob = observers[i];
      const ObserverState& st = ob.state();
      check_divergence(st, ob.kind(), ts.t);

      ObserverRow o;
      o.state = st;
      o.err = compute_errors(ts, sc.b_omega, st);
      const Innovations in = ob.innovations(meas, y);
      o.sigma_R_norm = in.sigma_R.norm();
      o.correction_norm = (setup.gains.K_v * (y - setup.sys.C * st.x_hat)).norm();
      o.sat_active = in.saturated;
      if (sample_monitor) {
        o.monitor = evaluate_monitor(log, ob.kind(), ts, meas, y, st, o.err, in);
      }

      ObserverSummary& sum = log.summaries[i];
      sum.max_orthonormality_error =
          std::max(sum.max_orthonormality_error, st.R_hat.orthonormality_error());
      sum.max_bias_norm = std::max(sum.max_bias_norm, st.b_hat.norm());
      row.obs.push_back(std::move(o));
    }
    log.rows.push_back(std::move(row));

    if (k == n) {
      break;
    }
    const TrueState mid = truth.sample_ahead(0.5 * sc.dt);
    truth.advance();
    const TrueState& end = truth.state();
    const StepInputs u{{meas, y},
                       {measure_imu(mid, sc), measure_output(cfg, mid.p)},
                       {measure_imu(end, sc), measure_output(cfg, end.p)}};
    for (NavigationObserver& ob : observers) {
      ob.step(u, sc.dt);
    }
  }
  return log;
}

BoundsCheck check_bounds(const RunConfig& cfg) {
  BoundsCheck out;
  const ObserverSetup setup = make_observer_setup(cfg);
  out.gains = setup.gains;
  const std::vector<double> grid = uniform_grid(cfg.scenario.t_end, cfg.scenario.dt);
  out.assumptions = validate_assumptions(cfg.scenario, grid, setup.gains.c_hat2);
  out.spectrum = em_spectrum(cfg.scenario, setup.gains.rho1, setup.gains.rho2, grid);
  try {
    out.bounds = sufficient_gain_bounds(out.assumptions, cfg.epsilon, setup.gains, setup.sys,
                                      out.spectrum, cfg.mu);
  } catch (const ValidationError& e) {
    out.bounds_error = e.what();
  }
  return out;
}

std::string format_bounds(const BoundsCheck& check) {
  std::ostringstream os;
  os << std::setprecision(6);
  const AssumptionReport& a = check.assumptions;
  os << "trajectory constants\n"
     << "  c0 = min |m_I x a_I|  " << a.c0 << "  (at t = " << a.t_c0 << ")\n"
     << "  c1 = min |a_I|        " << a.c1 << "\n"
     << "  c2 = max |a_I|        " << a.c2 << "\n"
     << "  c3 = max |da_I/dt|    " << a.c3 << "\n"
     << "  c4 = max |omega|      " << a.c4 << "\n"
     << "  c5 = |b_omega|        " << a.c5 << "\n";
  os << "E(M) spectrum: lambda_min = " << check.spectrum.lambda_min
     << " (t = " << check.spectrum.t_lambda_min << "), lambda_max = " << check.spectrum.lambda_max
     << (check.spectrum.positive_definite ? "  [positive definite]" : "  [NOT positive definite]")
     << "\n";
  if (a.violations.empty()) {
    os << "assumptions: all satisfied\n";
  }
  for (const auto& v : a.violations) {
    os << "assumption violated: " << v << "\n";
  }
  if (!check.bounds) {
    os << "gain bounds: not available (" << check.bounds_error << ")\n";
    return os.str();
  }
  const GainBoundReport& b = *check.bounds;
  const GainSet& g = check.gains;
  os << "gain bounds (epsilon = " << b.epsilon << ", mu = " << b.mu << ")\n"
     << "  alpha1..4 = " << b.alpha1 << ", " << b.alpha2 << ", " << b.alpha3 << ", " << b.alpha4
     << "\n"
     << "  beta1, beta2 = " << b.beta1 << ", " << b.beta2 << "\n"
     << "  c_b = " << b.c_b << ", c_omega = " << b.c_omega << ", c_g = " << b.c_g
     << ", c_R = " << b.c_R << "\n"
     << "  mu      < " << b.mu_max << "\n"
     << "  k_R     > " << b.kR_min << "   configured " << g.k_R
     << (b.kR_ok ? "  [meets bound]" : "  [below bound]") << "\n"
     << "  gamma   > " << b.gamma_min << "   configured " << g.gamma
     << (b.gamma_ok ? "  [meets bound]" : "  [below bound]") << "\n"
     << "  ||zeta|| threshold for V decrease: " << b.zeta_threshold << "\n";
  return os.str();
}

}  // namespace navobs
