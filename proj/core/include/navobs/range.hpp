#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "navobs/so3.hpp"

namespace navobs {

using OutputMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// Linear position output y = C_p p with rank(C_p) = 3.
struct LinearOutput {
  Eigen::VectorXd y;
  OutputMatrix C_p;

  Eigen::Index dim() const { return y.size(); }
};

/// Smallest singular value below which C_p is treated as rank deficient.
inline constexpr double kRankTol = 1e-9;

/**
 * Rows (a_ref - a_i)^T for every i != ref, in anchor order. Throws
 * CoplanarAnchors when fewer than four anchors are given or the rows do not
 * span R^3, and DimensionMismatch when `ref` is out of range.
 */
OutputMatrix build_Cp(const std::vector<Vec3>& anchors, std::size_t ref = 0);

/**
 * y_i = (d_i^2 - d_ref^2 - ||a_i||^2 + ||a_ref||^2) / 2 for i != ref, which
 * equals (a_ref - a_i)^T p for exact ranges.
 */
Eigen::VectorXd build_y(const std::vector<double>& ranges, const std::vector<Vec3>& anchors,
                        std::size_t ref = 0);

LinearOutput range_output(const std::vector<double>& ranges, const std::vector<Vec3>& anchors,
                          std::size_t ref = 0);

/// Direct position measurement: y = p, C_p = I.
LinearOutput gps_output(const Vec3& p);

double smallest_singular_value(const OutputMatrix& c);

}  // namespace navobs
