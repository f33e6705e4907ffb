#include "spreach/geometry.hpp"

#include <string>

#include "spreach/errors.hpp"

namespace spreach {

double rigidity_error(const Transform4& t) {
  const Eigen::Matrix3d r = t.topLeftCorner<3, 3>();
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity())
                           .cwiseAbs()
                           .maxCoeff();
  const double det = std::abs(r.determinant() - 1.0);
  Eigen::RowVector4d affine_row(0.0, 0.0, 0.0, 1.0);
  const double bottom = (t.row(3) - affine_row).cwiseAbs().maxCoeff();
  return std::max({ortho, det, bottom});
}

bool is_rigid_transform(const Transform4& t, double tol) {
  return t.allFinite() && rigidity_error(t) < tol;
}

void require_rigid(const Transform4& t, std::string_view what, double tol) {
  if (!is_rigid_transform(t, tol)) {
    throw ValidationError(std::string(what) +
                          ": not a rigid transform (orthonormal rotation, det +1, "
                          "affine last row required)");
  }
}

}  // namespace spreach
