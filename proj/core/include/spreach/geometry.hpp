#pragma once

#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace spreach {

using Point3 = Eigen::Vector3d;

// Homogeneous 4x4 transform acting on column vectors.
using Transform4 = Eigen::Matrix4d;

inline Point3 apply_transform(const Transform4& t, const Point3& p) {
  return t.topLeftCorner<3, 3>() * p + t.topRightCorner<3, 1>();
}

// Worst deviation of `t` from a rigid transform: max over the orthonormality
// residual |R^T R - I|_inf, the determinant residual |det(R) - 1|, and the
// affine-row residual |row3 - (0,0,0,1)|_inf.
double rigidity_error(const Transform4& t);

bool is_rigid_transform(const Transform4& t, double tol = 1e-9);

// Throws ValidationError naming `what` if `t` is not rigid within `tol`.
void require_rigid(const Transform4& t, std::string_view what, double tol = 1e-9);

}  // namespace spreach
