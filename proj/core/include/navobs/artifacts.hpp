#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "navobs/config.hpp"
#include "navobs/diagnostics.hpp"
#include "navobs/harness.hpp"

namespace navobs {

/// Column names of run.csv for the given observers, in order.
std::vector<std::string> csv_header(const std::vector<ObserverKind>& observers);

/// One row per step, 17 significant digits. Monitor columns are `nan` on
/// rows where monitors were not sampled.
void write_csv(const RunLog& log, std::ostream& out);

struct ErrorNorms {
  double p = 0.0;
  double v = 0.0;
  double R = 0.0;  // normalized distance of R~
  double b = 0.0;
};

struct ObserverMetrics {
  ObserverKind kind = ObserverKind::Proposed;
  ErrorNorms final_err;
  ErrorNorms peak_err;
  /// Window [late_start, t_end] used for the late-run statistics.
  double late_start = 0.0;
  double late_mean_dist_R = 0.0;
  double late_max_p = 0.0;
  std::optional<RateFit> x_rate;  // fit of ||x~|| on [5, 20] s
  std::string x_rate_error;
  double last_saturation_time = -1.0;  // -1 when never saturated
  double max_orthonormality_error = 0.0;
  double max_bias_norm = 0.0;
};

ErrorNorms error_norms(const ObserverRow& row);

/// `late_start` defaults to max(0, t_end - 20).
std::vector<ObserverMetrics> compute_metrics(const RunLog& log,
                                             std::optional<double> late_start = std::nullopt);

void write_summary(const RunLog& log, const RunConfig& cfg, std::ostream& out);

/**
 * Writes run.csv, summary.json and five SVG charts (trajectory, position,
 * velocity, attitude and bias errors) into `dir`, creating it if needed.
 * Returns the written paths. Throws IoError on failure.
 */
std::vector<std::filesystem::path> emit_artifacts(const RunLog& log, const RunConfig& cfg,
                                                  const std::filesystem::path& dir);

}  // namespace navobs
