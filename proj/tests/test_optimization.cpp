#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "vsm/elastic_stiffness.hpp"
#include "vsm/error.hpp"
#include "vsm/parallel_jacobian.hpp"
#include "vsm/stiffness_optimization.hpp"

using namespace vsm;
using std::numbers::pi;

namespace {

const double kTauMax = pi * pi * pi;

/// ln det K_x for SEA-only designs at given joint torques; nullopt if unrealizable.
std::optional<double> logdet_for_torques(const MechanismDesign& d, const FullState& s, const Eigen::VectorXd& tau) {
  static const SpringModel spring;
  Eigen::VectorXd k(d.m);
  for (Eigen::Index i = 0; i < d.m; ++i) {
    const auto g = spring.try_deflection(tau(i));
    if (!g) return std::nullopt;
    k(i) = spring.stiffness(*g);
  }
  return std::log(task_stiffness_from_joint(d, s, k).determinant());
}

}  // namespace

TEST_CASE("torque_distribution") {
  const MechanismDesign three = test::design(DesignId::ThreeLegs);
  const Eigen::MatrixXd j = parallel_jacobian_at(three, {0, 0.05}, BranchVector::uniform(3));
  CHECK(torque_distribution(j, {}, Eigen::VectorXd::Zero(1)).norm() == 0.0);

  const Eigen::MatrixXd n = kernel_basis(j);
  const Eigen::VectorXd tau = torque_distribution(j, {}, Eigen::VectorXd::Ones(1));
  CHECK((tau - n.col(0)).norm() < 1e-15);
  CHECK((pseudo_inverse(j).transpose() * tau).norm() < 1e-12);

  const MechanismDesign dual = test::design(DesignId::DualVia);
  const Eigen::MatrixXd jd = parallel_jacobian_at(dual, {0, 0.2}, BranchVector::uniform(2));
  const ExternalLoad f{Eigen::Vector2d(0.3, -0.8)};
  CHECK((torque_distribution(jd, f, Eigen::VectorXd(0)) - jd.transpose() * f.f).norm() == 0.0);

  CHECK_THROWS_AS(torque_distribution(j, n, {}, Eigen::VectorXd::Zero(2)), Error);
}

TEST_CASE("torque_distribution preserves the task force") {
  test::Gen gen(401);
  for (DesignId id : {DesignId::FullSeaMix, DesignId::DualFull, DesignId::ThreeLegs, DesignId::FourLegs}) {
    const MechanismDesign d = test::design(id);
    for (int i = 0; i < 100; ++i) {
      const auto [x, b] = gen.feasible_point(d);
      const Eigen::MatrixXd j = parallel_jacobian_at(d, x, b);
      const Eigen::MatrixXd n = kernel_basis(j);
      const ExternalLoad f{Eigen::Vector2d(gen.uniform(-2, 2), gen.uniform(-2, 2))};
      Eigen::VectorXd u(n.cols());
      for (Eigen::Index c = 0; c < u.size(); ++c) u(c) = gen.uniform(-20, 20);
      const Eigen::VectorXd tau = torque_distribution(j, n, f, u);
      CHECK((pseudo_inverse(j).transpose() * tau - f.f).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("equilibrium_deflections") {
  const MechanismDesign three = test::design(DesignId::ThreeLegs);
  const DeflectionState d = equilibrium_deflections(three, Eigen::Vector3d(0, kTauMax, -kTauMax));
  REQUIRE(d.sea.size() == 3);
  CHECK(d.sea[0] == 0.0);
  CHECK(d.sea[1] == doctest::Approx(pi));
  CHECK(d.sea[2] == doctest::Approx(-pi));
  CHECK(d.via.empty());
  try {
    (void)equilibrium_deflections(three, Eigen::Vector3d(40, 0, 0));
    FAIL("expected TorqueInfeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TorqueInfeasible);
  }
  CHECK_THROWS_AS(equilibrium_deflections(three, Eigen::Vector2d(0, 0)), Error);
}

TEST_CASE("via_joint_optimize closed forms") {
  const SpringModel s;
  const ViaJointOptimum lo = via_joint_optimize(s, 0.0, OptimizationMode::Minimize);
  CHECK(lo.gamma1 == doctest::Approx(0.0));
  CHECK(lo.gamma2 == doctest::Approx(0.0));
  CHECK(lo.stiffness == doctest::Approx(10.0));

  const ViaJointOptimum hi = via_joint_optimize(s, 0.0, OptimizationMode::Maximize);
  CHECK(hi.gamma1 == doctest::Approx(pi));
  CHECK(hi.gamma2 == doctest::Approx(pi));
  CHECK(hi.stiffness == doctest::Approx(2 * (3 * pi * pi - 5)));

  const ViaJointOptimum bound = via_joint_optimize(s, kTauMax, OptimizationMode::Maximize);
  CHECK(bound.gamma1 == doctest::Approx(pi));
  CHECK(bound.gamma2 == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(bound.stiffness == doctest::Approx(3 * pi * pi));

  CHECK_THROWS_AS(via_joint_optimize(s, 2 * kTauMax + 1, OptimizationMode::Maximize), Error);
}

TEST_CASE("via_joint_optimize against a brute-force co-contraction scan") {
  const SpringModel s;
  test::Gen gen(402);
  for (int i = 0; i < 30; ++i) {
    const double tau = gen.uniform(-1.9 * kTauMax, 1.9 * kTauMax);
    for (OptimizationMode mode : {OptimizationMode::Maximize, OptimizationMode::Minimize}) {
      const ViaJointOptimum opt = via_joint_optimize(s, tau, mode);
      CHECK(s.torque(opt.gamma1) - s.torque(opt.gamma2) == doctest::Approx(tau).epsilon(1e-9));
      double best = mode == OptimizationMode::Maximize ? -1e300 : 1e300;
      for (double g2 = -pi; g2 <= pi; g2 += 1e-4) {
        const auto g1 = s.try_deflection(tau + s.torque(g2));
        if (!g1) continue;
        const double k = s.stiffness(*g1) + s.stiffness(g2);
        best = mode == OptimizationMode::Maximize ? std::max(best, k) : std::min(best, k);
      }
      if (mode == OptimizationMode::Maximize) CHECK(best <= opt.stiffness + 1e-6);
      if (mode == OptimizationMode::Minimize) CHECK(best >= opt.stiffness - 1e-6);
    }
  }
}

TEST_CASE("DUAL_VIA determinant ratio is independent of x") {
  const double ratio = 2 * (3 * pi * pi - 5) / 10;
  test::Gen gen(403);
  for (const auto& geo : {DesignGeometry{0.5, 0.25, 0.5}, DesignGeometry{0.4, 0.4, 0.5}}) {
    const MechanismDesign d = test::design(DesignId::DualVia, geo.r, geo.l, geo.e);
    for (int i = 0; i < 10; ++i) {
      const auto [x, b] = gen.feasible_point(d);
      const auto kmax = maximize_det_Kx(d, x, b, {});
      const auto kmin = minimize_det_Kx(d, x, b, {});
      CHECK(kmax.kx.determinant() / kmin.kx.determinant() == doctest::Approx(ratio * ratio).epsilon(1e-9));
      CHECK(kmin.kx.k.isApprox(task_stiffness(d, x, b, DeflectionState::zero(d)).k));
    }
  }
}

TEST_CASE("minimization at zero load is the zero-deflection state") {
  const MechanismDesign three = test::design(DesignId::ThreeLegs);
  const Point2 x(0.02, 0.07);
  const BranchVector b = BranchVector::uniform(3);
  const OptimizationResult r = minimize_det_Kx(three, x, b, {});
  CHECK(r.u.size() == 1);
  CHECK(r.u(0) == 0.0);
  for (double g : r.deflections.sea) CHECK(g == 0.0);
  CHECK(r.kx.k.isApprox(task_stiffness(three, x, b, DeflectionState::zero(three)).k, 1e-14));

  const MechanismDesign dual = test::design(DesignId::DualVia);
  const OptimizationResult rd = minimize_det_Kx(dual, {0, 0.1}, BranchVector::uniform(2), {});
  REQUIRE(rd.deflections.via.size() == 2);
  CHECK(joint_space_stiffness(dual, rd.deflections).k.isApprox(10.0 * Eigen::MatrixXd::Identity(2, 2)));
}

TEST_CASE("max is at least the zero-deflection value and min is at most max") {
  test::Gen gen(404);
  for (DesignId id : kAllDesigns) {
    const MechanismDesign d = test::design(id);
    for (int i = 0; i < 8; ++i) {
      const auto [x, b] = gen.feasible_point(d);
      const auto kmax = maximize_det_Kx(d, x, b, {});
      const auto kmin = minimize_det_Kx(d, x, b, {});
      const double zero = std::log(task_stiffness(d, x, b, DeflectionState::zero(d)).determinant());
      CHECK(kmax.objective >= zero - 1e-12);
      CHECK(kmin.objective <= kmax.objective + 1e-12);
      CHECK(kmax.torques.cwiseAbs().maxCoeff() <= 2 * kTauMax + 1e-9);
    }
  }
}

TEST_CASE("THREE_LEGS maximization against a brute-force null-space scan") {
  const MechanismDesign three = test::design(DesignId::ThreeLegs);
  test::Gen gen(405);
  double worst = -1.0;
  for (int i = 0; i < 25; ++i) {
    const auto [x, b] = gen.feasible_point(three);
    const FullState s = full_state(three, x, b);
    const Eigen::MatrixXd j = parallel_jacobian_at(three, x, b);
    const Eigen::VectorXd n = kernel_basis(j).col(0);
    const double scale = n.cwiseAbs().maxCoeff();
    const double du = 1e-3 / scale;  // largest torque step 1e-3
    const double umax = kTauMax / scale;
    double best = -1e300;
    for (double u = -umax; u <= umax; u += du) {
      const auto v = logdet_for_torques(three, s, n * u);
      if (v) best = std::max(best, *v);
    }
    const OptimizationResult r = maximize_det_Kx(three, x, b, {});
    worst = std::max(worst, best - r.objective);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("FOUR_LEGS maximization against a brute-force plane scan") {
  const MechanismDesign four = test::design(DesignId::FourLegs);
  test::Gen gen(406);
  for (int i = 0; i < 4; ++i) {
    const auto [x, b] = gen.feasible_point(four);
    const FullState s = full_state(four, x, b);
    const Eigen::MatrixXd n = kernel_basis(parallel_jacobian_at(four, x, b));
    const double reach = 2.0 * kTauMax;  // |u| <= |tau| for orthonormal columns
    double best = -1e300;
    const int steps = 400;
    for (int a = 0; a <= steps; ++a) {
      for (int c = 0; c <= steps; ++c) {
        const Eigen::Vector2d u(-reach + 2 * reach * a / steps, -reach + 2 * reach * c / steps);
        const auto v = logdet_for_torques(four, s, n * u);
        if (v) best = std::max(best, *v);
      }
    }
    const OptimizationResult r = maximize_det_Kx(four, x, b, {});
    CHECK(best <= r.objective + 1e-4);
  }
}

TEST_CASE("FOUR_LEGS optimum respects the quarter-turn symmetry") {
  const MechanismDesign four = test::design(DesignId::FourLegs);
  const BranchVector b = BranchVector::uniform(4);
  const FullState s = full_state(four, {0, 0}, b);
  const OptimizationResult r = maximize_det_Kx(four, {0, 0}, b, {});
  Eigen::VectorXd rotated(4);
  for (int k = 0; k < 4; ++k) rotated((k + 1) % 4) = r.torques(k);
  const auto v = logdet_for_torques(four, s, rotated);
  REQUIRE(v.has_value());
  CHECK(*v == doctest::Approx(r.objective).epsilon(1e-9));

  // every rotated copy of the optimal torques stays self-equilibrated
  const Eigen::MatrixXd j = parallel_jacobian_at(four, {0, 0}, b);
  CHECK((pseudo_inverse(j).transpose() * rotated).norm() < 1e-9);
}

TEST_CASE("loaded optimization keeps the torques balanced") {
  const ExternalLoad f{Eigen::Vector2d(0.5, 0.3)};
  test::Gen gen(407);
  for (DesignId id : kAllDesigns) {
    const MechanismDesign d = test::design(id);
    const auto [x, b] = gen.feasible_point(d);
    const Eigen::MatrixXd j = parallel_jacobian_at(d, x, b);
    for (OptimizationMode mode : {OptimizationMode::Maximize, OptimizationMode::Minimize}) {
      const OptimizationResult r = optimize_det_Kx(d, x, b, f, mode);
      CHECK((pseudo_inverse(j).transpose() * r.torques - f.f).cwiseAbs().maxCoeff() < 1e-9);
    }
    const auto kmax = maximize_det_Kx(d, x, b, f);
    const auto kmin = minimize_det_Kx(d, x, b, f);
    CHECK(kmin.objective <= kmax.objective + 1e-12);
  }
}

TEST_CASE("optimization is deterministic") {
  const MechanismDesign four = test::design(DesignId::FourLegs);
  const BranchVector b = BranchVector::parse("2121").value();
  const OptimizationResult a = maximize_det_Kx(four, {0.1, -0.05}, b, {});
  const OptimizationResult c = maximize_det_Kx(four, {0.1, -0.05}, b, {});
  CHECK(a.objective == c.objective);
  CHECK((a.u.array() == c.u.array()).all());
}

TEST_CASE("minimization searches the null space when zero deflection is not the softest state") {
  CHECK(SpringModel().softest_at_zero());
  CHECK(SpringModel(6.0, pi).softest_at_zero());
  const SpringModel stiff_core(8.0, pi);
  REQUIRE_FALSE(stiff_core.softest_at_zero());
  CHECK(stiff_core.stiffness(0.3) < stiff_core.stiffness(0.0));

  const MechanismDesign three = make_design(DesignId::ThreeLegs, {0.4, 0.4, 0.5}, stiff_core);
  const Point2 x(0.02, 0.07);
  const BranchVector b = BranchVector::uniform(3);
  const OptimizationResult r = minimize_det_Kx(three, x, b, {});
  const double zero = std::log(task_stiffness(three, x, b, DeflectionState::zero(three)).determinant());
  CHECK(r.objective < zero - 1e-3);

  // brute-force scan along the kernel
  const FullState s = full_state(three, x, b);
  const Eigen::VectorXd n = kernel_basis(parallel_jacobian_at(three, x, b)).col(0);
  const double scale = n.cwiseAbs().maxCoeff();
  double best = 1e300;
  for (double u = -stiff_core.max_torque() / scale; u <= stiff_core.max_torque() / scale; u += 1e-3 / scale) {
    Eigen::VectorXd k(3);
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
      const auto g = stiff_core.try_deflection(n(i) * u);
      ok = g.has_value();
      if (ok) k(i) = stiff_core.stiffness(*g);
    }
    if (ok) best = std::min(best, std::log(task_stiffness_from_joint(three, s, k).determinant()));
  }
  CHECK(r.objective <= best + 1e-4);
}
