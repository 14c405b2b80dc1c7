#include "vsm/parallel_jacobian.hpp"

#include <cmath>

#include "vsm/error.hpp"

namespace vsm {

namespace {

Point2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }
Point2 unit_prime(double angle) { return {-std::sin(angle), std::cos(angle)}; }

bool elbow_driven(const LegTopology& leg) { return leg.elbow_drive.driven(); }

}  // namespace

int constraint_dimension(const MechanismDesign& design) {
  int rows = 0;
  for (const auto& leg : design.legs) rows += elbow_driven(leg) ? 2 : 1;
  return rows;
}

Eigen::VectorXd driven_coordinates(const MechanismDesign& design, const FullState& state) {
  if (state.legs.size() != design.legs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "full state length does not match leg count");
  }
  const auto joints = design.driven_joints();
  Eigen::VectorXd q(static_cast<Eigen::Index>(joints.size()));
  for (std::size_t k = 0; k < joints.size(); ++k) {
    const JointPair& pair = state.legs[joints[k].leg];
    q(static_cast<Eigen::Index>(k)) = joints[k].slot == JointSlot::Base ? pair.q1 : pair.q2;
  }
  return q;
}

Eigen::VectorXd constraint_residual(const MechanismDesign& design, const Point2& x, const Eigen::VectorXd& q) {
  if (q.size() != design.m) throw Error(ErrorCode::DimensionMismatch, "driven coordinate vector has wrong size");
  Eigen::VectorXd g(constraint_dimension(design));
  Eigen::Index row = 0;
  Eigen::Index k = 0;
  for (const auto& leg : design.legs) {
    const LegGeometry& geom = leg.geometry;
    const double q1 = q(k++);
    if (elbow_driven(leg)) {
      const double q2 = q(k++);
      g.segment<2>(row) = geom.base + geom.r * unit(q1) + geom.l * unit(q1 + q2) - x;
      row += 2;
    } else {
      const Point2 d = x - geom.base - geom.r * unit(q1);
      g(row++) = d.squaredNorm() - geom.l * geom.l;
    }
  }
  return g;
}

JacobianParts jacobian_parts(const MechanismDesign& design, const Point2& x, const FullState& state) {
  if (state.legs.size() != design.legs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "full state length does not match leg count");
  }
  const int rows = constraint_dimension(design);
  JacobianParts parts{Eigen::MatrixXd::Zero(rows, 2), Eigen::MatrixXd::Zero(rows, design.m)};
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < design.legs.size(); ++i) {
    const LegTopology& leg = design.legs[i];
    const LegGeometry& geom = leg.geometry;
    const JointPair& qp = state.legs[i];
    if (elbow_driven(leg)) {
      parts.jx.block<2, 2>(row, 0) = -Matrix2::Identity();
      parts.jq.block<2, 2>(row, col) = leg_jacobian(geom, qp);
      row += 2;
      col += 2;
    } else {
      const Point2 d = x - geom.base - geom.r * unit(qp.q1);
      parts.jx.row(row) = 2.0 * d.transpose();
      parts.jq(row, col) = -2.0 * geom.r * d.dot(unit_prime(qp.q1));
      row += 1;
      col += 1;
    }
  }
  return parts;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? rel_tol * s(0) : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd parallel_jacobian(const Eigen::MatrixXd& jx, const Eigen::MatrixXd& jq) {
  if (jx.cols() != 2 || jx.rows() != jq.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "J_x must be dim(g) x 2 and share rows with J_q");
  }
  if (jx.rows() == 2) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jx);
    if (svd.singularValues()(1) < kRankTolerance) throw Error(ErrorCode::RankDeficient, "J_x is rank deficient");
    return -jx.inverse() * jq;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jx);
  if (svd.singularValues()(1) < kRankTolerance) throw Error(ErrorCode::RankDeficient, "J_x is rank deficient");
  return -pseudo_inverse(jx) * jq;
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& j) {
  if (j.rows() != 2) throw Error(ErrorCode::DimensionMismatch, "parallel Jacobian must have two rows");
  const Eigen::Index m = j.cols();
  if (m < 2) throw Error(ErrorCode::RankDeficient, "parallel Jacobian has fewer than two columns");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (!(s(1) > kRankTolerance * std::max(1.0, s(0)))) {
    throw Error(ErrorCode::RankDeficient, "parallel Jacobian has rank < 2");
  }
  Eigen::MatrixXd basis = svd.matrixV().rightCols(m - 2);
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    for (Eigen::Index r = 0; r < m; ++r) {
      if (std::abs(basis(r, c)) > 1e-12) {
        if (basis(r, c) < 0.0) basis.col(c) *= -1.0;
        break;
      }
    }
  }
  return basis;
}

double condition_index(const Eigen::MatrixXd& j) {
  const Matrix2 jjt = j * j.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix2> eig(jjt, Eigen::EigenvaluesOnly);
  const double lo = std::max(eig.eigenvalues()(0), 0.0);
  const double hi = eig.eigenvalues()(1);
  if (!(hi > 0.0)) return 0.0;
  return lo / hi;
}

JacobianBundle jacobian_bundle(const MechanismDesign& design, const Point2& x, const FullState& state) {
  auto parts = jacobian_parts(design, x, state);
  JacobianBundle bundle;
  bundle.j = parallel_jacobian(parts.jx, parts.jq);
  bundle.kernel = design.m > 2 ? kernel_basis(bundle.j) : Eigen::MatrixXd(design.m, 0);
  bundle.jx = std::move(parts.jx);
  bundle.jq = std::move(parts.jq);
  return bundle;
}

Eigen::MatrixXd parallel_jacobian_at(const MechanismDesign& design, const Point2& x, const BranchVector& branch) {
  const FullState state = full_state(design, x, branch);
  const auto parts = jacobian_parts(design, x, state);
  return parallel_jacobian(parts.jx, parts.jq);
}

}  // namespace vsm
