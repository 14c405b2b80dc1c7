#pragma once

#include <Eigen/Dense>

#include "vsm/mechanism_catalog.hpp"
#include "vsm/planar_kinematics.hpp"

namespace vsm {

/// Smallest singular value of J_x accepted by parallel_jacobian.
inline constexpr double kRankTolerance = 1e-10;

/// Constraint equations g(x, q) = 0, stacked leg by leg:
///   passive-elbow leg: |x - b - r*u(q1)|^2 - l^2          (1 row)
///   driven-elbow leg:  b + r*u(q1) + l*u(q1 + q2) - x     (2 rows)
/// where u(a) = (cos a, sin a) and q holds the m driven joint angles.
int constraint_dimension(const MechanismDesign& design);

/// Driven joint angles q_k extracted from a full state, in driven_joints() order.
Eigen::VectorXd driven_coordinates(const MechanismDesign& design, const FullState& state);

Eigen::VectorXd constraint_residual(const MechanismDesign& design, const Point2& x, const Eigen::VectorXd& q);

struct JacobianParts {
  Eigen::MatrixXd jx;  ///< dim(g) x 2, dg/dx
  Eigen::MatrixXd jq;  ///< dim(g) x m, dg/dq over driven coordinates
};

JacobianParts jacobian_parts(const MechanismDesign& design, const Point2& x, const FullState& state);

/// Moore-Penrose pseudoinverse; singular values below rel_tol * sigma_max are dropped.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, double rel_tol = 1e-10);

/// J = -pinv(J_x) * J_q. Throws Error(RankDeficient) if sigma_min(J_x) < kRankTolerance.
Eigen::MatrixXd parallel_jacobian(const Eigen::MatrixXd& jx, const Eigen::MatrixXd& jq);

/// Orthonormal basis of ker(J), m x (m - 2), each column sign-fixed so that
/// its first non-negligible entry is positive. Throws Error(RankDeficient)
/// if rank(J) < 2.
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& j);

/// lambda_min / lambda_max of J*J^T; 0 when lambda_max is 0.
double condition_index(const Eigen::MatrixXd& j);

struct JacobianBundle {
  Eigen::MatrixXd jx;
  Eigen::MatrixXd jq;
  Eigen::MatrixXd j;
  Eigen::MatrixXd kernel;
};

JacobianBundle jacobian_bundle(const MechanismDesign& design, const Point2& x, const FullState& state);

/// Convenience: full state from IK, then the parallel Jacobian.
Eigen::MatrixXd parallel_jacobian_at(const MechanismDesign& design, const Point2& x, const BranchVector& branch);

}  // namespace vsm
