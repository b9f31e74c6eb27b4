#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "navobs/config.hpp"
#include "navobs/diagnostics.hpp"
#include "navobs/observer.hpp"
#include "navobs/vehicle.hpp"

namespace navobs {

/// Lyapunov-monitor values, recorded every `monitor_decimation` steps.
struct MonitorSample {
  Vec6 zeta = Vec6::Zero();
  double V = 0.0;
  double W = 0.0;
  /// Relative residual of (A - K C) sigma_x = -k_R B [R_hat sigma_R]_x R_hat a_B.
  double identity_residual = 0.0;
  /// Residual of K_v (y - C x_hat) = -B^T L_gamma zeta + (I - R~)^T a_I.
  double correction_residual = 0.0;
};

struct ObserverRow {
  ObserverState state;
  EstimationErrors err;
  double sigma_R_norm = 0.0;
  /// ||K_v (y - C x_hat)|| before saturation.
  double correction_norm = 0.0;
  bool sat_active = false;
  std::optional<MonitorSample> monitor;
};

struct RunRow {
  TrueState truth;
  std::vector<ObserverRow> obs;  // same order as RunLog::observers
};

struct ObserverSummary {
  ObserverKind kind = ObserverKind::Proposed;
  double max_orthonormality_error = 0.0;
  double max_bias_norm = 0.0;
};

struct RunLog {
  double dt = 0.0;
  std::vector<ObserverKind> observers;
  std::vector<RunRow> rows;
  std::vector<ObserverSummary> summaries;
  GainSet gains;
  SystemMatrices sys;
  LyapunovSolution lyapunov;
  AssumptionReport assumptions;
  EMSpectrum spectrum;
  std::optional<GainBoundReport> bounds;
  /// Weight of the cross term used in W.
  double mu = 0.0;
  double scaling_residual = 0.0;

  /// Index of `kind` in `observers`, if it ran.
  std::optional<std::size_t> index_of(ObserverKind kind) const;
};

/// Everything needed to construct the observers for a validated config.
struct ObserverSetup {
  GainSet gains;
  SystemMatrices sys;
  ObserverState initial;
};

ObserverSetup make_observer_setup(const RunConfig& cfg);

std::vector<ObserverKind> selected_observers(ObserverSelection sel);

/**
 * @brief Runs the fixed-step simulation over [0, t_end].
 *
 * Each step: record errors and innovations at t_k, advance every observer
 * with the measurements sampled at t_k, advance the truth. Monitors are
 * evaluated every `cfg.monitor_decimation` steps. Throws DivergenceDetected
 * if any state norm exceeds 1e9. The result depends only on `cfg`.
 */
RunLog run_scenario(const RunConfig& cfg);

struct BoundsCheck {
  AssumptionReport assumptions;
  EMSpectrum spectrum;
  GainSet gains;
  std::optional<GainBoundReport> bounds;
  std::string bounds_error;  // set when the bounds could not be evaluated
};

/// Evaluates assumption constants and the theoretical gain thresholds for `cfg`.
BoundsCheck check_bounds(const RunConfig& cfg);

std::string format_bounds(const BoundsCheck& check);

}  // namespace navobs
