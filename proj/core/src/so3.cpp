#include "navobs/so3.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "navobs/errors.hpp"

namespace navobs {

Rotation Rotation::from_matrix(const Mat3& m, double tol) {
  if (!is_rotation(m, tol)) {
    std::ostringstream os;
    os << "matrix is not in SO(3) (orthonormality error "
       << Rotation(m).orthonormality_error() << ")";
    throw Error(os.str());
  }
  return Rotation(m);
}

Rotation Rotation::nearest(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) {
    u.col(2) *= -1.0;
  }
  return Rotation(u * v.transpose());
}

double Rotation::orthonormality_error() const {
  const double ortho = (m_ * m_.transpose() - Mat3::Identity()).norm();
  return std::max(ortho, std::abs(m_.determinant() - 1.0));
}

bool is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) {
    return false;
  }
  return Rotation::unchecked(m).orthonormality_error() <= tol;
}

Mat3 skew(const Vec3& x) {
  Mat3 s;
  s << 0.0, -x.z(), x.y(),
       x.z(), 0.0, -x.x(),
       -x.y(), x.x(), 0.0;
  return s;
}

Vec3 vex(const Mat3& s) {
  const double asym = (s + s.transpose()).norm();
  if (!(asym <= kSkewTol)) {
    std::ostringstream os;
    os << "vex: input is not skew-symmetric (||S + S^T||_F = " << asym << ")";
    throw NotSkewSymmetric(os.str());
  }
  return Vec3(s(2, 1), s(0, 2), s(1, 0));
}

Vec3 psi(const Mat3& a) {
  return 0.5 * Vec3(a(2, 1) - a(1, 2), a(0, 2) - a(2, 0), a(1, 0) - a(0, 1));
}

Mat3 skew_part(const Mat3& a) { return 0.5 * (a - a.transpose()); }

double so3_distance(const Rotation& r) {
  const double d = 0.25 * (3.0 - r.matrix().trace());
  return std::clamp(d, 0.0, 1.0);
}

Rotation exp_so3(const Vec3& v) {
  const double theta = v.norm();
  const Mat3 k = skew(v);
  double a;
  double b;
  if (theta < 1e-6) {
    // Taylor series of sin(t)/t and (1 - cos t)/t^2.
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return Rotation::unchecked(Mat3::Identity() + a * k + b * k * k);
}

Vec3 euler_zyx(const Rotation& r) {
  const Mat3& m = r.matrix();
  const double pitch = std::asin(std::clamp(-m(2, 0), -1.0, 1.0));
  const double roll = std::atan2(m(2, 1), m(2, 2));
  const double yaw = std::atan2(m(1, 0), m(0, 0));
  return Vec3(roll, pitch, yaw);
}

Vec3 proj(double c, double eps, const Vec3& phi_hat, const Vec3& mu) {
  const double n = phi_hat.norm();
  const double radial = phi_hat.dot(mu);
  if (n < c || radial <= 0.0) {
    return mu;
  }
  const double theta = std::min(1.0, (n - c) / eps);
  return mu - theta * (radial / (n * n)) * phi_hat;
}

}  // namespace navobs
