#pragma once

#include <Eigen/Dense>

namespace navobs {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Tolerance used for the orthonormality and determinant checks on rotations.
inline constexpr double kRotationTol = 1e-9;
/// Maximum ||S + S^T||_F accepted by vex().
inline constexpr double kSkewTol = 1e-9;

/**
 * @brief Element of SO(3) stored as a 3x3 matrix.
 *
 * Construction through from_matrix() checks R R^T = I and det(R) = 1. The
 * group operations keep the invariant up to round-off; nearest() projects a
 * drifted matrix back onto the group.
 */
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  static Rotation identity() { return Rotation(); }

  /// Throws navobs::Error if `m` is not in SO(3) within `tol`.
  static Rotation from_matrix(const Mat3& m, double tol = kRotationTol);

  /// Wraps `m` without checking. Caller guarantees the invariant.
  static Rotation unchecked(const Mat3& m) { return Rotation(m); }

  /// Closest rotation in the Frobenius sense (polar decomposition via SVD).
  static Rotation nearest(const Mat3& m);

  const Mat3& matrix() const { return m_; }
  Rotation transpose() const { return Rotation(m_.transpose()); }

  Rotation operator*(const Rotation& other) const { return Rotation(m_ * other.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  /// max(||R R^T - I||_F, |det R - 1|).
  double orthonormality_error() const;

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

bool is_rotation(const Mat3& m, double tol = kRotationTol);

/// [x]_x, so that skew(x) * y == x.cross(y).
Mat3 skew(const Vec3& x);

/// Inverse of skew(). Throws NotSkewSymmetric when ||S + S^T||_F > kSkewTol.
Vec3 vex(const Mat3& s);

/// vex of the skew-symmetric part (A - A^T)/2. Defined on all of R^{3x3}.
Vec3 psi(const Mat3& a);

/// Projection onto so(3): (A - A^T)/2.
Mat3 skew_part(const Mat3& a);

/// Normalized distance (1/4) tr(I - R), in [0, 1].
double so3_distance(const Rotation& r);

/// Rodrigues exponential of the rotation vector `v`.
Rotation exp_so3(const Vec3& v);

/// ZYX Euler angles [roll, pitch, yaw] of `r`, in radians.
Vec3 euler_zyx(const Rotation& r);

/// min(1, c/||x||) x. Returns x unchanged when ||x|| <= c (including x = 0).
template <typename Derived>
typename Derived::PlainObject sat(double c, const Eigen::MatrixBase<Derived>& x) {
  const double n = x.norm();
  if (n <= c) {
    return x;
  }
  return (c / n) * x;
}

/**
 * Smooth projection keeping an estimate phi_hat inside the ball of radius
 * c + eps when integrated as d(phi_hat)/dt = proj(c, eps, phi_hat, mu).
 * Passes mu through unless phi_hat is outside radius c and mu points outward,
 * in which case the outward radial component is removed with weight
 * min(1, (||phi_hat|| - c) / eps).
 */
Vec3 proj(double c, double eps, const Vec3& phi_hat, const Vec3& mu);

}  // namespace navobs
