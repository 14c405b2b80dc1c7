#include "vsm/elastic_stiffness.hpp"

#include <cmath>

#include "vsm/error.hpp"
#include "vsm/parallel_jacobian.hpp"

namespace vsm {

namespace {

Eigen::MatrixXd congruence_inverse(const Eigen::MatrixXd& j) {
  if (j.rows() != 2) throw Error(ErrorCode::DimensionMismatch, "Jacobian must have two rows");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  if (svd.singularValues().size() < 2 || svd.singularValues()(1) < kRankTolerance) {
    throw Error(ErrorCode::RankDeficient, "Jacobian is rank deficient");
  }
  if (j.cols() == 2) return j.inverse();
  return pseudo_inverse(j);
}

StiffnessMatrix congruence(const Eigen::MatrixXd& j, const Eigen::MatrixXd& joint) {
  if (joint.rows() != j.cols() || joint.cols() != j.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "joint stiffness must be m x m");
  }
  const Eigen::MatrixXd jinv = congruence_inverse(j);
  return {jinv.transpose() * joint * jinv, StiffnessRole::Task};
}

}  // namespace

DeflectionState DeflectionState::zero(const MechanismDesign& design) {
  DeflectionState d;
  for (const auto& joint : design.driven_joints()) {
    if (joint.kind == DriveKind::Elastic) d.sea.push_back(0.0);
    if (joint.kind == DriveKind::Antagonistic) d.via.push_back({});
  }
  return d;
}

double spring_torque(const SpringModel& spring, double gamma) { return spring.torque(gamma); }
double spring_stiffness(const SpringModel& spring, double gamma) { return spring.stiffness(gamma); }

StiffnessMatrix joint_space_stiffness(const MechanismDesign& design, const DeflectionState& d) {
  const auto joints = design.driven_joints();
  std::size_t n_sea = 0;
  std::size_t n_via = 0;
  for (const auto& joint : joints) {
    n_sea += joint.kind == DriveKind::Elastic ? 1 : 0;
    n_via += joint.kind == DriveKind::Antagonistic ? 1 : 0;
  }
  if (d.sea.size() != n_sea || d.via.size() != n_via) {
    throw Error(ErrorCode::DimensionMismatch, "deflection state does not match the drive layout");
  }
  Eigen::MatrixXd kq = Eigen::MatrixXd::Zero(design.m, design.m);
  std::size_t i_sea = 0;
  std::size_t i_via = 0;
  for (std::size_t k = 0; k < joints.size(); ++k) {
    const JointDrive& drive = design.drive(joints[k]);
    const auto kk = static_cast<Eigen::Index>(k);
    if (drive.kind == DriveKind::Elastic) {
      kq(kk, kk) = drive.spring.stiffness(d.sea[i_sea++]);
    } else {
      const ViaDeflection& v = d.via[i_via++];
      kq(kk, kk) = drive.spring.stiffness(v.gamma1) + drive.spring2.stiffness(v.gamma2);
    }
  }
  return {kq, StiffnessRole::Joint};
}

StiffnessMatrix leg_cartesian_stiffness(const Matrix2& j_leg, double k_base, double k_elbow) {
  if (!(std::abs(j_leg.determinant()) > kLegSingularTolerance)) {
    throw Error(ErrorCode::LegSingular, "leg Jacobian is singular");
  }
  const Matrix2 jinv = j_leg.inverse();
  const Matrix2 k = jinv.transpose() * Eigen::Vector2d(k_base, k_elbow).asDiagonal() * jinv;
  return {k, StiffnessRole::Task};
}

StiffnessMatrix task_stiffness_from_joint(const MechanismDesign& design, const FullState& state,
                                          const Eigen::VectorXd& joint_stiffness) {
  if (joint_stiffness.size() != design.m || state.legs.size() != design.legs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "joint stiffness or state size mismatch");
  }
  Matrix2 total = Matrix2::Zero();
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < design.legs.size(); ++i) {
    const LegTopology& leg = design.legs[i];
    const double k_base = leg.base_drive.driven() ? joint_stiffness(k++) : 0.0;
    const double k_elbow = leg.elbow_drive.driven() ? joint_stiffness(k++) : 0.0;
    total += leg_cartesian_stiffness(leg_jacobian(leg.geometry, state.legs[i]), k_base, k_elbow).k;
  }
  // round-off symmetrization
  return {0.5 * (total + total.transpose()), StiffnessRole::Task};
}

StiffnessMatrix task_stiffness(const MechanismDesign& design, const Point2& x, const BranchVector& branch,
                               const DeflectionState& d) {
  const FullState state = full_state(design, x, branch);
  const StiffnessMatrix kq = joint_space_stiffness(design, d);
  return task_stiffness_from_joint(design, state, kq.k.diagonal());
}

StiffnessMatrix kg_matrix(const MechanismDesign& design, const Point2& x, const BranchVector& branch,
                          const ExternalLoad& load, double step) {
  const Eigen::MatrixXd j = parallel_jacobian_at(design, x, branch);
  Eigen::MatrixXd kg = Eigen::MatrixXd::Zero(design.m, design.m);
  if (load.is_zero()) return {kg, StiffnessRole::Load};
  for (Eigen::Index k = 0; k < design.m; ++k) {
    const Point2 dx = j.col(k);
    auto central = [&](double h) -> Eigen::MatrixXd {
      return (parallel_jacobian_at(design, x + h * dx, branch) - parallel_jacobian_at(design, x - h * dx, branch)) /
             (2.0 * h);
    };
    // Richardson extrapolation keeps the derivative accurate near singular poses
    const Eigen::MatrixXd dj = (4.0 * central(0.5 * step) - central(step)) / 3.0;
    kg.col(k) = dj.transpose() * load.f;
  }
  return {kg, StiffnessRole::Load};
}

StiffnessMatrix cct_stiffness(const Eigen::MatrixXd& j, const StiffnessMatrix& kq, const StiffnessMatrix& kg) {
  if (kg.k.rows() != kq.k.rows() || kg.k.cols() != kq.k.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "K_g must match K_q");
  }
  return congruence(j, kq.k - kg.k);
}

StiffnessMatrix cct_stiffness(const Eigen::MatrixXd& j, const StiffnessMatrix& kq) { return congruence(j, kq.k); }

}  // namespace vsm
