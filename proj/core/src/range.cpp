#include "navobs/range.hpp"

#include <sstream>

#include "navobs/errors.hpp"

namespace navobs {

namespace {

void check_anchor_set(const std::vector<Vec3>& anchors, std::size_t ref) {
  if (anchors.size() < 4) {
    std::ostringstream os;
    os << "at least 4 anchors are required, got " << anchors.size();
    throw CoplanarAnchors(os.str());
  }
  if (ref >= anchors.size()) {
    std::ostringstream os;
    os << "reference anchor index " << ref << " out of range for " << anchors.size() << " anchors";
    throw DimensionMismatch(os.str());
  }
}

}  // namespace

double smallest_singular_value(const OutputMatrix& c) {
  Eigen::JacobiSVD<OutputMatrix> svd(c);
  return svd.singularValues().minCoeff();
}

OutputMatrix build_Cp(const std::vector<Vec3>& anchors, std::size_t ref) {
  check_anchor_set(anchors, ref);
  OutputMatrix c(static_cast<Eigen::Index>(anchors.size() - 1), 3);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (i == ref) {
      continue;
    }
    c.row(row++) = (anchors[ref] - anchors[i]).transpose();
  }
  const double s_min = smallest_singular_value(c);
  if (s_min < kRankTol) {
    std::ostringstream os;
    os << "anchor difference vectors do not span R^3 (smallest singular value " << s_min << ")";
    throw CoplanarAnchors(os.str());
  }
  return c;
}

Eigen::VectorXd build_y(const std::vector<double>& ranges, const std::vector<Vec3>& anchors,
                        std::size_t ref) {
  if (ranges.size() != anchors.size()) {
    std::ostringstream os;
    os << "got " << ranges.size() << " ranges for " << anchors.size() << " anchors";
    throw DimensionMismatch(os.str());
  }
  check_anchor_set(anchors, ref);
  const double d_ref = ranges[ref];
  const double a_ref_sq = anchors[ref].squaredNorm();
  Eigen::VectorXd y(static_cast<Eigen::Index>(anchors.size() - 1));
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (i == ref) {
      continue;
    }
    y(row++) = 0.5 * (ranges[i] * ranges[i] - d_ref * d_ref - anchors[i].squaredNorm() + a_ref_sq);
  }
  return y;
}

LinearOutput range_output(const std::vector<double>& ranges, const std::vector<Vec3>& anchors,
                          std::size_t ref) {
  return {build_y(ranges, anchors, ref), build_Cp(anchors, ref)};
}

LinearOutput gps_output(const Vec3& p) { return {p, OutputMatrix::Identity(3, 3)}; }

}  // namespace navobs
