#include "vsm/stiffness_optimization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "vsm/error.hpp"
#include "vsm/parallel_jacobian.hpp"

namespace vsm {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr double kInvGolden = 0.6180339887498949;

using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 8, 1>;

double signed_score(double objective, OptimizationMode mode) {
  return mode == OptimizationMode::Maximize ? objective : -objective;
}

/// Realizable net-torque interval of an antagonistic pair.
std::pair<double, double> via_torque_range(const SpringModel& s1, const SpringModel& s2) {
  return {s1.min_torque() - s2.max_torque(), s1.max_torque() - s2.min_torque()};
}

std::optional<ViaJointOptimum> try_via_joint_optimize(const SpringModel& s1, const SpringModel& s2, double tau,
                                                      OptimizationMode mode, const OptimizerSettings& settings) {
  // gamma1 = s1^-1(tau + s2(gamma2)); the admissible gamma2 interval keeps
  // tau + s2(gamma2) inside the range of s1.
  const double t_lo = std::max(s2.min_torque(), s1.min_torque() - tau);
  const double t_hi = std::min(s2.max_torque(), s1.max_torque() - tau);
  if (!(t_lo <= t_hi)) return std::nullopt;
  const auto g_lo = s2.try_deflection(t_lo);
  const auto g_hi = s2.try_deflection(t_hi);
  if (!g_lo || !g_hi) return std::nullopt;

  auto evaluate = [&](double gamma2) -> std::optional<ViaJointOptimum> {
    const double t1 = tau + s2.torque_unchecked(gamma2);
    const auto gamma1 = s1.try_deflection(std::clamp(t1, s1.min_torque(), s1.max_torque()));
    if (!gamma1) return std::nullopt;
    return ViaJointOptimum{*gamma1, gamma2, s1.stiffness_unchecked(*gamma1) + s2.stiffness_unchecked(gamma2)};
  };
  auto score = [&](const ViaJointOptimum& v) { return signed_score(v.stiffness, mode); };

  const int n = std::max(settings.via_grid_points, 2);
  const double span = *g_hi - *g_lo;
  std::optional<ViaJointOptimum> best;
  int best_index = 0;
  for (int i = 0; i < n; ++i) {
    const double gamma2 = i == n - 1 ? *g_hi : *g_lo + span * i / (n - 1);
    auto v = evaluate(gamma2);
    // later samples win ties
    if (v && (!best || score(*v) >= score(*best))) {
      best = v;
      best_index = i;
    }
  }
  if (!best) return std::nullopt;
  if (span <= 0.0) return best;

  // golden-section refinement on the neighbouring cells
  double a = *g_lo + span * std::max(best_index - 1, 0) / (n - 1);
  double b = *g_lo + span * std::min(best_index + 1, n - 1) / (n - 1);
  auto f = [&](double g) {
    auto v = evaluate(g);
    return v ? score(*v) : -std::numeric_limits<double>::infinity();
  };
  double c = b - kInvGolden * (b - a);
  double d = a + kInvGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > settings.via_tolerance) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvGolden * (b - a);
      fd = f(d);
    }
  }
  auto refined = evaluate(0.5 * (a + b));
  if (refined && score(*refined) > score(*best) + kTieTolerance) best = refined;
  return best;
}

struct JointTerm {
  Eigen::Vector2d row;  // row of the owning leg's inverse Jacobian
  const JointDrive* drive = nullptr;
  double tau_lo = 0.0;
  double tau_hi = 0.0;
};

/// Stiffness optimization at one task point with all kinematics precomputed.
class PointProblem {
 public:
  PointProblem(const MechanismDesign& design, const Point2& x, const BranchVector& branch, const ExternalLoad& load,
               const OptimizerSettings& settings, OptimizationMode mode)
      : design_(design), settings_(settings), mode_(mode) {
    state_ = full_state(design, x, branch);
    bundle_ = jacobian_bundle(design, x, state_);
    tau_f_ = bundle_.j.transpose() * load.f;

    std::vector<Matrix2> leg_inverse;
    for (std::size_t i = 0; i < design.legs.size(); ++i) {
      const Matrix2 jl = leg_jacobian(design.legs[i].geometry, state_.legs[i]);
      if (!(std::abs(jl.determinant()) > kLegSingularTolerance)) {
        throw Error(ErrorCode::LegSingular, "leg " + std::to_string(i + 1) + " is singular");
      }
      leg_inverse.push_back(jl.inverse());
    }
    for (const auto& joint : design.driven_joints()) {
      JointTerm term;
      term.row = leg_inverse[joint.leg].row(static_cast<Eigen::Index>(joint.slot)).transpose();
      term.drive = &design.drive(joint);
      if (joint.kind == DriveKind::Antagonistic) {
        std::tie(term.tau_lo, term.tau_hi) = via_torque_range(term.drive->spring, term.drive->spring2);
      } else {
        term.tau_lo = term.drive->spring.min_torque();
        term.tau_hi = term.drive->spring.max_torque();
      }
      terms_.push_back(term);
    }

    // Per-dimension interval bound of u = N^T (tau - tau_f) over the torque box.
    const Eigen::MatrixXd& kernel = bundle_.kernel;
    lo_ = Eigen::VectorXd::Zero(kernel.cols());
    hi_ = Eigen::VectorXd::Zero(kernel.cols());
    for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
      for (Eigen::Index k = 0; k < kernel.rows(); ++k) {
        const double n = kernel(k, c);
        const double a = n * (terms_[static_cast<std::size_t>(k)].tau_lo - tau_f_(k));
        const double b = n * (terms_[static_cast<std::size_t>(k)].tau_hi - tau_f_(k));
        lo_(c) += std::min(a, b);
        hi_(c) += std::max(a, b);
      }
    }
  }

  [[nodiscard]] Eigen::Index dims() const { return bundle_.kernel.cols(); }
  [[nodiscard]] const Eigen::VectorXd& lower() const { return lo_; }
  [[nodiscard]] const Eigen::VectorXd& upper() const { return hi_; }

  /// Unit directions along which one joint torque stays constant (2-D kernels).
  [[nodiscard]] std::vector<SmallVec> edge_directions() const {
    std::vector<SmallVec> out;
    const Eigen::MatrixXd& kernel = bundle_.kernel;
    for (Eigen::Index k = 0; k < kernel.rows(); ++k) {
      SmallVec dir(2);
      dir << -kernel(k, 1), kernel(k, 0);
      const double norm = dir.norm();
      if (norm > 1e-12) out.push_back(dir / norm);
    }
    return out;
  }

  /// Mode-signed ln det(K_x), or nullopt when some torque is unrealizable.
  [[nodiscard]] std::optional<double> score(const SmallVec& u) const {
    double kxx = 0.0;
    double kxy = 0.0;
    double kyy = 0.0;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      double tau = tau_f_(kk);
      for (Eigen::Index c = 0; c < u.size(); ++c) tau += bundle_.kernel(kk, c) * u(c);
      const auto stiffness = joint_stiffness(terms_[k], tau);
      if (!stiffness) return std::nullopt;
      const Eigen::Vector2d& a = terms_[k].row;
      kxx += *stiffness * a.x() * a.x();
      kxy += *stiffness * a.x() * a.y();
      kyy += *stiffness * a.y() * a.y();
    }
    const double det = kxx * kyy - kxy * kxy;
    if (!(det > 0.0)) return std::nullopt;
    return signed_score(std::log(det), mode_);
  }

  [[nodiscard]] OptimizationResult assemble(const Eigen::VectorXd& u) const {
    OptimizationResult result;
    result.u = u;
    result.torques = tau_f_ + bundle_.kernel * u;
    Eigen::VectorXd kj(design_.m);
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const JointDrive& drive = *terms_[k].drive;
      const double tau = result.torques(kk);
      if (drive.kind == DriveKind::Antagonistic) {
        const auto v = try_via_joint_optimize(drive.spring, drive.spring2, tau, mode_, settings_);
        if (!v) throw Error(ErrorCode::TorqueInfeasible, "antagonistic joint cannot realize torque");
        result.deflections.via.push_back({v->gamma1, v->gamma2});
        kj(kk) = v->stiffness;
      } else {
        const double gamma = drive.spring.deflection(tau);
        result.deflections.sea.push_back(gamma);
        kj(kk) = drive.spring.stiffness_unchecked(gamma);
      }
    }
    result.kx = task_stiffness_from_joint(design_, state_, kj);
    result.objective = std::log(result.kx.determinant());
    return result;
  }

 private:
  [[nodiscard]] std::optional<double> joint_stiffness(const JointTerm& term, double tau) const {
    if (term.drive->kind == DriveKind::Antagonistic) {
      const auto v = try_via_joint_optimize(term.drive->spring, term.drive->spring2, tau, mode_, settings_);
      if (!v) return std::nullopt;
      return v->stiffness;
    }
    const auto gamma = term.drive->spring.try_deflection(tau);
    if (!gamma) return std::nullopt;
    return term.drive->spring.stiffness_unchecked(*gamma);
  }

  const MechanismDesign& design_;
  OptimizerSettings settings_;
  OptimizationMode mode_;
  FullState state_;
  JacobianBundle bundle_;
  Eigen::VectorXd tau_f_;
  std::vector<JointTerm> terms_;
  Eigen::VectorXd lo_;
  Eigen::VectorXd hi_;
};

struct Candidate {
  SmallVec u;
  double score = -std::numeric_limits<double>::infinity();
  bool valid = false;
};

bool softest_at_zero(const MechanismDesign& design) {
  for (const auto& joint : design.driven_joints()) {
    const JointDrive& drive = design.drive(joint);
    if (!drive.spring.softest_at_zero()) return false;
    if (joint.kind == DriveKind::Antagonistic && !drive.spring2.softest_at_zero()) return false;
  }
  return true;
}

/// Replaces `best` if `u` scores higher, or ties and has a smaller norm.
bool consider(const PointProblem& problem, const SmallVec& u, Candidate& best) {
  const auto s = problem.score(u);
  if (!s) return false;
  const bool better = !best.valid || *s > best.score + kTieTolerance ||
                      (std::abs(*s - best.score) <= kTieTolerance && u.norm() < best.u.norm());
  if (better) {
    best.u = u;
    best.score = *s;
    best.valid = true;
  }
  return better;
}

Eigen::VectorXd search_null_space(const PointProblem& problem, const OptimizerSettings& settings) {
  const Eigen::Index dims = problem.dims();
  Candidate best;
  consider(problem, SmallVec::Zero(dims), best);
  if (dims == 0) {
    if (!best.valid) throw Error(ErrorCode::Infeasible, "joint torques are not realizable");
    return Eigen::VectorXd(0);
  }

  const int g = std::max(settings.grid_points, 2);
  const Eigen::VectorXd& lo = problem.lower();
  const Eigen::VectorXd& hi = problem.upper();
  std::vector<int> index(static_cast<std::size_t>(dims), 0);
  SmallVec u(dims);
  for (;;) {
    for (Eigen::Index c = 0; c < dims; ++c) {
      const int i = index[static_cast<std::size_t>(c)];
      u(c) = i == g - 1 ? hi(c) : lo(c) + (hi(c) - lo(c)) * i / (g - 1);
    }
    consider(problem, u, best);
    std::size_t c = 0;
    while (c < index.size() && ++index[c] == g) index[c++] = 0;
    if (c == index.size()) break;
  }
  if (!best.valid) throw Error(ErrorCode::Infeasible, "no null-space input yields realizable torques");

  // Shrinking-step pattern search. Besides the coordinate axes, a plane
  // search also moves parallel to each torque-limit edge so that optima at
  // polytope vertices are reachable along the boundary.
  std::vector<SmallVec> directions;
  for (Eigen::Index c = 0; c < dims; ++c) directions.push_back(SmallVec::Unit(dims, c));
  if (dims == 2) {
    for (const SmallVec& edge : problem.edge_directions()) directions.push_back(edge);
  }
  double step = (hi - lo).maxCoeff() / (g - 1);
  const double min_step = 1e-12 * std::max(1.0, step);
  for (int iter = 0; iter < settings.refine_iterations && step >= min_step; ++iter) {
    const double start = best.score;
    for (const SmallVec& dir : directions) {
      for (double sign : {1.0, -1.0}) {
        const SmallVec cand = best.u + sign * step * dir;
        const auto s = problem.score(cand);
        if (s && *s > best.score) {
          best.u = cand;
          best.score = *s;
        }
      }
    }
    if (best.score - start < settings.tolerance) step *= 0.5;
  }
  return Eigen::VectorXd(best.u);
}

}  // namespace

Eigen::VectorXd torque_distribution(const Eigen::MatrixXd& j, const Eigen::MatrixXd& kernel, const ExternalLoad& load,
                                    const Eigen::VectorXd& u) {
  if (kernel.rows() != j.cols() || kernel.cols() != u.size()) {
    throw Error(ErrorCode::DimensionMismatch, "null-space input must have one entry per kernel column");
  }
  return j.transpose() * load.f + kernel * u;
}

Eigen::VectorXd torque_distribution(const Eigen::MatrixXd& j, const ExternalLoad& load, const Eigen::VectorXd& u) {
  const Eigen::MatrixXd kernel = j.cols() > 2 ? kernel_basis(j) : Eigen::MatrixXd(j.cols(), 0);
  return torque_distribution(j, kernel, load, u);
}

DeflectionState equilibrium_deflections(const MechanismDesign& design, const Eigen::VectorXd& torques) {
  if (torques.size() != design.m) throw Error(ErrorCode::DimensionMismatch, "one torque per driven joint expected");
  DeflectionState d;
  const auto joints = design.driven_joints();
  for (std::size_t k = 0; k < joints.size(); ++k) {
    if (joints[k].kind != DriveKind::Elastic) continue;
    d.sea.push_back(design.drive(joints[k]).spring.deflection(torques(static_cast<Eigen::Index>(k))));
  }
  return d;
}

ViaJointOptimum via_joint_optimize(const SpringModel& spring1, const SpringModel& spring2, double tau_joint,
                                   OptimizationMode mode, const OptimizerSettings& settings) {
  auto v = try_via_joint_optimize(spring1, spring2, tau_joint, mode, settings);
  if (!v) throw Error(ErrorCode::TorqueInfeasible, "antagonistic joint cannot realize the requested torque");
  return *v;
}

ViaJointOptimum via_joint_optimize(const SpringModel& spring, double tau_joint, OptimizationMode mode,
                                   const OptimizerSettings& settings) {
  return via_joint_optimize(spring, spring, tau_joint, mode, settings);
}

OptimizationResult optimize_det_Kx(const MechanismDesign& design, const Point2& x, const BranchVector& branch,
                                   const ExternalLoad& load, OptimizationMode mode,
                                   const OptimizerSettings& settings) {
  const PointProblem problem(design, x, branch, load, settings, mode);
  if (mode == OptimizationMode::Minimize && load.is_zero() && softest_at_zero(design)) {
    // Spring stiffness is smallest at zero deflection, which u = 0 realizes.
    return problem.assemble(Eigen::VectorXd::Zero(problem.dims()));
  }
  return problem.assemble(search_null_space(problem, settings));
}

OptimizationResult maximize_det_Kx(const MechanismDesign& design, const Point2& x, const BranchVector& branch,
                                   const ExternalLoad& load, const OptimizerSettings& settings) {
  return optimize_det_Kx(design, x, branch, load, OptimizationMode::Maximize, settings);
}

OptimizationResult minimize_det_Kx(const MechanismDesign& design, const Point2& x, const BranchVector& branch,
                                   const ExternalLoad& load, const OptimizerSettings& settings) {
  return optimize_det_Kx(design, x, branch, load, OptimizationMode::Minimize, settings);
}

}  // namespace vsm
