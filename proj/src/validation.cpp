#include "vsm/validation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "vsm/elastic_stiffness.hpp"
#include "vsm/error.hpp"
#include "vsm/parallel_jacobian.hpp"
#include "vsm/stiffness_optimization.hpp"
#include "vsm/workspace_metric.hpp"

namespace vsm {

namespace {

constexpr double kStep = 1e-6;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

CheckResult make_check(std::string name, double value, double limit, std::string detail = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.limit = limit;
  c.passed = value < limit;
  c.detail = std::move(detail);
  return c;
}

struct PointSample {
  Point2 x;
  BranchVector branch;
};

std::vector<PointSample> feasible_samples(const MechanismDesign& design, Rng& rng, int count, double cutoff) {
  const auto branches = branch_vectors(design);
  const double h = design.e + design.legs.front().geometry.r + design.legs.front().geometry.l;
  std::vector<PointSample> out;
  for (int attempt = 0; attempt < 200 * count && static_cast<int>(out.size()) < count; ++attempt) {
    PointSample s;
    s.x = Point2(uniform(rng, -h, h), uniform(rng, -h, h));
    s.branch = branches[std::uniform_int_distribution<std::size_t>(0, branches.size() - 1)(rng)];
    if (classify_point(design, s.x, s.branch, cutoff) == PointStatus::Ok) out.push_back(s);
  }
  return out;
}

std::vector<MechanismDesign> designs_where(const RunConfig& config, bool (*keep)(const MechanismDesign&)) {
  std::vector<MechanismDesign> out;
  for (DesignId id : config.designs) {
    MechanismDesign d = config.design(id);
    if (keep(d)) out.push_back(std::move(d));
  }
  if (out.empty()) {
    for (DesignId id : kAllDesigns) {
      MechanismDesign d = config.design(id);
      if (keep(d)) out.push_back(std::move(d));
    }
  }
  return out;
}

CheckResult check_ik_fk(Rng& rng, int samples) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    LegGeometry g{Point2(uniform(rng, -1, 1), uniform(rng, -1, 1)), uniform(rng, 0.2, 1.0), uniform(rng, 0.2, 1.0)};
    const double lo = std::abs(g.r - g.l);
    const double rho = lo + (g.r + g.l - lo) * uniform(rng, 0.01, 0.99);
    const double phi = uniform(rng, -std::numbers::pi, std::numbers::pi);
    const Point2 target = g.base + rho * Point2(std::cos(phi), std::sin(phi));
    for (Branch b : {Branch::First, Branch::Second}) {
      const JointPair q = leg_ik(g, target, b);
      worst = std::max(worst, (leg_fk(g, q) - target).norm());
      if ((b == Branch::First) != (q.q2 >= 0.0)) worst = std::max(worst, 1.0);
    }
  }
  return make_check("ik_fk_round_trip", worst, 1e-10);
}

CheckResult check_leg_jacobian(Rng& rng, int samples, double perturbation) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    LegGeometry g{Point2(uniform(rng, -1, 1), uniform(rng, -1, 1)), uniform(rng, 0.2, 1.0), uniform(rng, 0.2, 1.0)};
    const JointPair q{uniform(rng, -std::numbers::pi, std::numbers::pi), uniform(rng, -std::numbers::pi, std::numbers::pi)};
    Matrix2 analytic = leg_jacobian(g, q);
    analytic.array() += perturbation;
    Matrix2 fd;
    fd.col(0) = (leg_fk(g, {q.q1 + kStep, q.q2}) - leg_fk(g, {q.q1 - kStep, q.q2})) / (2 * kStep);
    fd.col(1) = (leg_fk(g, {q.q1, q.q2 + kStep}) - leg_fk(g, {q.q1, q.q2 - kStep})) / (2 * kStep);
    worst = std::max(worst, (analytic - fd).cwiseAbs().maxCoeff());
  }
  return make_check("leg_jacobian_fd", worst, 1e-6);
}

std::vector<CheckResult> check_constraint_jacobians(const RunConfig& config, Rng& rng, int samples,
                                                    double perturbation) {
  double worst_parts = 0.0;
  double worst_j = 0.0;
  std::string where;
  for (DesignId id : config.designs) {
    const MechanismDesign design = config.design(id);
    for (const PointSample& s : feasible_samples(design, rng, samples, config.grid.cutoff)) {
      const FullState state = full_state(design, s.x, s.branch);
      JacobianParts parts = jacobian_parts(design, s.x, state);
      parts.jx.array() += perturbation;
      parts.jq.array() += perturbation;
      const Eigen::VectorXd q = driven_coordinates(design, state);

      Eigen::MatrixXd jx_fd(parts.jx.rows(), 2);
      for (int c = 0; c < 2; ++c) {
        Point2 dx = Point2::Zero();
        dx(c) = kStep;
        jx_fd.col(c) =
            (constraint_residual(design, s.x + dx, q) - constraint_residual(design, s.x - dx, q)) / (2 * kStep);
      }
      Eigen::MatrixXd jq_fd(parts.jq.rows(), design.m);
      for (Eigen::Index c = 0; c < design.m; ++c) {
        Eigen::VectorXd dq = Eigen::VectorXd::Zero(design.m);
        dq(c) = kStep;
        jq_fd.col(c) =
            (constraint_residual(design, s.x, q + dq) - constraint_residual(design, s.x, q - dq)) / (2 * kStep);
      }
      const double e_parts =
          std::max((parts.jx - jx_fd).cwiseAbs().maxCoeff(), (parts.jq - jq_fd).cwiseAbs().maxCoeff());
      if (e_parts > worst_parts) {
        worst_parts = e_parts;
        where = std::string(design_key(id)) + " " + s.branch.to_string();
      }

      // J maps the driven-joint motion dq/dx back to the identity.
      const Eigen::MatrixXd j = parallel_jacobian(parts.jx, parts.jq);
      Eigen::MatrixXd g(design.m, 2);
      for (int c = 0; c < 2; ++c) {
        Point2 dx = Point2::Zero();
        dx(c) = kStep;
        g.col(c) = (driven_coordinates(design, full_state(design, s.x + dx, s.branch)) -
                    driven_coordinates(design, full_state(design, s.x - dx, s.branch))) /
                   (2 * kStep);
      }
      worst_j = std::max(worst_j, (j * g - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff());
    }
  }
  return {make_check("constraint_jacobian_fd", worst_parts, 1e-6, where),
          make_check("parallel_jacobian_fd", worst_j, 1e-6)};
}

/// Task force balanced by the springs when the motors are held fixed.
struct ForceMap {
  const MechanismDesign& design;
  BranchVector branch;
  Eigen::VectorXd q0;
  std::vector<ViaDeflection> deflection0;  // per driven joint; gamma2 unused for elastic joints

  [[nodiscard]] Eigen::Vector2d force(const Point2& x) const {
    const FullState state = full_state(design, x, branch);
    const Eigen::VectorXd dq = driven_coordinates(design, state) - q0;
    const auto joints = design.driven_joints();
    Eigen::VectorXd tau(design.m);
    for (std::size_t k = 0; k < joints.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const JointDrive& drive = design.drive(joints[k]);
      const double step = normalize_angle(dq(kk));
      tau(kk) = drive.spring.torque_unchecked(deflection0[k].gamma1 + step);
      if (drive.kind == DriveKind::Antagonistic) tau(kk) -= drive.spring2.torque_unchecked(deflection0[k].gamma2 - step);
    }
    const Eigen::MatrixXd j = parallel_jacobian_at(design, x, branch);
    return j.transpose().fullPivLu().solve(tau);
  }
};

std::vector<CheckResult> check_cct(const RunConfig& config, Rng& rng, int samples) {
  const ExternalLoad load{Eigen::Vector2d(0.5, 0.3)};
  double worst_loaded = 0.0;
  double worst_unloaded = 0.0;
  std::string where;
  auto square = [](const MechanismDesign& d) { return d.m == 2; };
  for (const MechanismDesign& design : designs_where(config, square)) {
    for (const PointSample& s : feasible_samples(design, rng, samples, config.grid.cutoff)) {
      const FullState state = full_state(design, s.x, s.branch);
      const Eigen::MatrixXd j = parallel_jacobian_at(design, s.x, s.branch);
      const Eigen::VectorXd tau = j.transpose() * load.f;

      ForceMap map{design, s.branch, driven_coordinates(design, state), {}};
      DeflectionState d;
      const auto joints = design.driven_joints();
      for (std::size_t k = 0; k < joints.size(); ++k) {
        const JointDrive& drive = design.drive(joints[k]);
        const double t = tau(static_cast<Eigen::Index>(k));
        if (drive.kind == DriveKind::Antagonistic) {
          const ViaJointOptimum v =
              via_joint_optimize(drive.spring, drive.spring2, t, OptimizationMode::Minimize, config.optimizer);
          map.deflection0.push_back({v.gamma1, v.gamma2});
          d.via.push_back({v.gamma1, v.gamma2});
        } else {
          const double g = drive.spring.deflection(t);
          map.deflection0.push_back({g, 0.0});
          d.sea.push_back(g);
        }
      }

      const StiffnessMatrix kq = joint_space_stiffness(design, d);
      const StiffnessMatrix kg = kg_matrix(design, s.x, s.branch, load);
      const Eigen::MatrixXd k = cct_stiffness(j, kq, kg).k;
      // Richardson-extrapolated central differences; plain O(h^2) ones are
      // too coarse close to the condition-index cutoff
      auto central = [&](double h) {
        Eigen::Matrix2d out;
        for (int c = 0; c < 2; ++c) {
          Point2 dx = Point2::Zero();
          dx(c) = h;
          out.col(c) = (map.force(s.x + dx) - map.force(s.x - dx)) / (2 * h);
        }
        return out;
      };
      const double h = 1e-5;
      const Eigen::Matrix2d k_fd = (4.0 * central(h / 2) - central(h)) / 3.0;
      const double e_loaded = (k - k_fd).norm() / k.norm();
      if (e_loaded > worst_loaded) {
        worst_loaded = e_loaded;
        std::ostringstream w;
        w << design_key(design.id) << " " << s.branch.to_string() << " x=(" << s.x.x() << ", " << s.x.y()
          << ") ci=" << condition_index(j);
        where = w.str();
      }

      const Eigen::MatrixXd k_cct = cct_stiffness(j, kq).k;
      const Eigen::MatrixXd k_legs = task_stiffness_from_joint(design, state, kq.k.diagonal()).k;
      worst_unloaded = std::max(worst_unloaded, (k_cct - k_legs).norm() / k_legs.norm());
    }
  }
  return {make_check("cct_loaded_fd", worst_loaded, 1e-4, where), make_check("cct_unloaded_leg_sum", worst_unloaded, 1e-12)};
}

std::vector<CheckResult> check_null_space(const RunConfig& config, Rng& rng, int samples) {
  double worst_kernel = 0.0;
  double worst_projector = 0.0;
  double worst_force = 0.0;
  auto redundant = [](const MechanismDesign& d) { return d.m > 2; };
  for (const MechanismDesign& design : designs_where(config, redundant)) {
    for (const PointSample& s : feasible_samples(design, rng, samples, config.grid.cutoff)) {
      const Eigen::MatrixXd j = parallel_jacobian_at(design, s.x, s.branch);
      const Eigen::MatrixXd n = kernel_basis(j);
      const Eigen::MatrixXd jp = pseudo_inverse(j);
      const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(design.m, design.m) - j.transpose() * jp.transpose();
      worst_kernel = std::max(worst_kernel, (j * n).cwiseAbs().maxCoeff());
      worst_projector = std::max(worst_projector, (p * n - n).cwiseAbs().maxCoeff());
      worst_projector = std::max(worst_projector, (n * n.transpose() - p).cwiseAbs().maxCoeff());
      const ExternalLoad load{Eigen::Vector2d(uniform(rng, -1, 1), uniform(rng, -1, 1))};
      Eigen::VectorXd u(n.cols());
      for (Eigen::Index c = 0; c < u.size(); ++c) u(c) = uniform(rng, -10, 10);
      const Eigen::VectorXd tau = torque_distribution(j, n, load, u);
      worst_force = std::max(worst_force, (jp.transpose() * tau - load.f).cwiseAbs().maxCoeff());
    }
  }
  return {make_check("kernel_annihilation", worst_kernel, 1e-10),
          make_check("projector_equivalence", worst_projector, 1e-9),
          make_check("torque_distribution_force", worst_force, 1e-9)};
}

std::vector<CheckResult> check_spring(const SpringModel& spring) {
  const int n = 10001;
  const double gm = spring.gamma_max();
  double min_k = std::numeric_limits<double>::infinity();
  double at = 0.0;
  double worst_symmetry = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = -gm + 2.0 * gm * i / (n - 1);
    const double k = spring.stiffness(g);
    if (k < min_k) {
      min_k = k;
      at = g;
    }
    worst_symmetry = std::max(worst_symmetry, std::abs(spring.torque(g) + spring.torque(-g)));
  }
  std::ostringstream detail;
  detail << std::setprecision(6) << "min dtau/dgamma = " << min_k << " at gamma = " << at;
  CheckResult mono = make_check("spring_monotonicity", -min_k, 0.0, detail.str());

  double worst_inverse = 0.0;
  for (int i = 0; i < 1001; ++i) {
    const double g = spring.branch_low() + (spring.branch_high() - spring.branch_low()) * i / 1000.0;
    const auto back = spring.try_deflection(spring.torque_unchecked(g));
    worst_inverse = std::max(worst_inverse, back ? std::abs(*back - g) : 1.0);
  }
  return {mono, make_check("spring_point_symmetry", worst_symmetry, 1e-12),
          make_check("spring_inversion", worst_inverse, 1e-9)};
}

}  // namespace

std::vector<CheckResult> run_validation(const RunConfig& config, const ValidationOptions& options) {
  Rng rng(options.seed);
  const int per_design = std::max(1, options.samples / 10);
  std::vector<CheckResult> out;
  auto append = [&out](std::vector<CheckResult> more) { out.insert(out.end(), more.begin(), more.end()); };
  auto guarded = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const Error& err) {
      out.push_back({name, false, 0.0, 0.0, err.what()});
    }
  };
  guarded("ik_fk_round_trip", [&] { out.push_back(check_ik_fk(rng, options.samples)); });
  guarded("leg_jacobian_fd",
          [&] { out.push_back(check_leg_jacobian(rng, options.samples, options.jacobian_perturbation)); });
  guarded("constraint_jacobian_fd",
          [&] { append(check_constraint_jacobians(config, rng, per_design, options.jacobian_perturbation)); });
  guarded("cct_oracle", [&] { append(check_cct(config, rng, per_design)); });
  guarded("null_space", [&] { append(check_null_space(config, rng, per_design)); });
  guarded("spring", [&] { append(check_spring(config.spring_model())); });
  return out;
}

}  // namespace vsm
