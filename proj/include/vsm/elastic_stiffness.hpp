#pragma once

#include <Eigen/Dense>

#include <vector>

#include "vsm/mechanism_catalog.hpp"
#include "vsm/planar_kinematics.hpp"
#include "vsm/spring_model.hpp"

namespace vsm {

/// Legs with |det J_leg| at or below this are treated as singular.
inline constexpr double kLegSingularTolerance = 1e-8;

enum class StiffnessRole { Task, Joint, Load };

struct StiffnessMatrix {
  Eigen::MatrixXd k;
  StiffnessRole role = StiffnessRole::Task;

  [[nodiscard]] double determinant() const { return k.determinant(); }
};

struct ExternalLoad {
  Eigen::Vector2d f = Eigen::Vector2d::Zero();

  [[nodiscard]] bool is_zero() const { return f.isZero(0.0); }
};

struct ViaDeflection {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

/// Spring deflections: one entry per elastic joint and one pair per
/// antagonistic joint, each list in driven_joints() order.
struct DeflectionState {
  std::vector<double> sea;
  std::vector<ViaDeflection> via;

  static DeflectionState zero(const MechanismDesign& design);
};

double spring_torque(const SpringModel& spring, double gamma);
double spring_stiffness(const SpringModel& spring, double gamma);

/// m x m diagonal joint stiffness K_q. Antagonistic joints add both springs.
StiffnessMatrix joint_space_stiffness(const MechanismDesign& design, const DeflectionState& d);

/// J_leg^-T * diag(k_base, k_elbow) * J_leg^-1. Throws Error(LegSingular).
StiffnessMatrix leg_cartesian_stiffness(const Matrix2& j_leg, double k_base, double k_elbow);

/// Sum of leg stiffnesses for joint stiffness values given per driven joint.
StiffnessMatrix task_stiffness_from_joint(const MechanismDesign& design, const FullState& state,
                                          const Eigen::VectorXd& joint_stiffness);

/// Cartesian stiffness as the sum of per-leg stiffnesses; passive joints add nothing.
StiffnessMatrix task_stiffness(const MechanismDesign& design, const Point2& x, const BranchVector& branch,
                               const DeflectionState& d);

/// Load-induced matrix K_g: column k is (dJ^T/dq_k) f, by central differences
/// of the parallel Jacobian along the task motion J*e_k.
StiffnessMatrix kg_matrix(const MechanismDesign& design, const Point2& x, const BranchVector& branch,
                          const ExternalLoad& load, double step = 1e-6);

/// pinv(J)^T (K_q - K_g) pinv(J); for square J this is J^-T (K_q - K_g) J^-1.
StiffnessMatrix cct_stiffness(const Eigen::MatrixXd& j, const StiffnessMatrix& kq, const StiffnessMatrix& kg);
/// Unloaded form J^-T K_q J^-1.
StiffnessMatrix cct_stiffness(const Eigen::MatrixXd& j, const StiffnessMatrix& kq);

}  // namespace vsm
