#pragma once

#include <Eigen/Dense>

#include "vsm/elastic_stiffness.hpp"
#include "vsm/mechanism_catalog.hpp"
#include "vsm/planar_kinematics.hpp"

namespace vsm {

struct OptimizerSettings {
  int grid_points = 41;          ///< coarse grid points per null-space dimension
  int refine_iterations = 200;   ///< pattern-search sweeps
  double tolerance = 1e-9;       ///< sweep gain below which the step is halved
  int via_grid_points = 1001;    ///< co-contraction scan resolution
  double via_tolerance = 1e-10;  ///< golden-section bracket width

  friend bool operator==(const OptimizerSettings&, const OptimizerSettings&) = default;
};

enum class OptimizationMode { Maximize, Minimize };

struct ViaJointOptimum {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double stiffness = 0.0;
};

struct OptimizationResult {
  StiffnessMatrix kx;
  DeflectionState deflections;
  Eigen::VectorXd u;        ///< null-space coordinates, size m - 2
  Eigen::VectorXd torques;  ///< driven-joint torques, size m
  double objective = 0.0;   ///< ln det(K_x)
};

/// tau = J^T f + ker(J) u.
Eigen::VectorXd torque_distribution(const Eigen::MatrixXd& j, const ExternalLoad& load, const Eigen::VectorXd& u);
Eigen::VectorXd torque_distribution(const Eigen::MatrixXd& j, const Eigen::MatrixXd& kernel,
                                    const ExternalLoad& load, const Eigen::VectorXd& u);

/// Equilibrium deflections of the elastic joints for the given driven-joint
/// torques. Antagonistic joints are not resolved here (their `via` list is
/// left empty); see via_joint_optimize. Throws Error(TorqueInfeasible).
DeflectionState equilibrium_deflections(const MechanismDesign& design, const Eigen::VectorXd& torques);

/// Co-contraction of an antagonistic joint under net torque tau_joint, where
/// tau_joint = tau_s1(gamma1) - tau_s2(gamma2). Optimizes k(gamma1) + k(gamma2)
/// over gamma2 by a uniform scan followed by golden-section refinement.
ViaJointOptimum via_joint_optimize(const SpringModel& spring, double tau_joint, OptimizationMode mode,
                                   const OptimizerSettings& settings = {});
ViaJointOptimum via_joint_optimize(const SpringModel& spring1, const SpringModel& spring2, double tau_joint,
                                   OptimizationMode mode, const OptimizerSettings& settings = {});

OptimizationResult maximize_det_Kx(const MechanismDesign& design, const Point2& x, const BranchVector& branch,
                                   const ExternalLoad& load, const OptimizerSettings& settings = {});

/// With zero load all deflections are zero; otherwise the full search runs on -ln det.
OptimizationResult minimize_det_Kx(const MechanismDesign& design, const Point2& x, const BranchVector& branch,
                                   const ExternalLoad& load, const OptimizerSettings& settings = {});

OptimizationResult optimize_det_Kx(const MechanismDesign& design, const Point2& x, const BranchVector& branch,
                                   const ExternalLoad& load, OptimizationMode mode,
                                   const OptimizerSettings& settings = {});

}  // namespace vsm
