#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vsm/error.hpp"
#include "vsm/parallel_jacobian.hpp"

using namespace vsm;

namespace {

constexpr double kH = 1e-6;

Eigen::MatrixXd fd_jx(const MechanismDesign& d, const Point2& x, const Eigen::VectorXd& q) {
  const Eigen::Index rows = constraint_dimension(d);
  Eigen::MatrixXd out(rows, 2);
  for (int c = 0; c < 2; ++c) {
    Point2 dx = Point2::Zero();
    dx(c) = kH;
    out.col(c) = (constraint_residual(d, x + dx, q) - constraint_residual(d, x - dx, q)) / (2 * kH);
  }
  return out;
}

Eigen::MatrixXd fd_jq(const MechanismDesign& d, const Point2& x, const Eigen::VectorXd& q) {
  const Eigen::Index rows = constraint_dimension(d);
  Eigen::MatrixXd out(rows, d.m);
  for (Eigen::Index c = 0; c < d.m; ++c) {
    Eigen::VectorXd dq = Eigen::VectorXd::Zero(d.m);
    dq(c) = kH;
    out.col(c) = (constraint_residual(d, x, q + dq) - constraint_residual(d, x, q - dq)) / (2 * kH);
  }
  return out;
}

}  // namespace

TEST_CASE("constraint residual vanishes on consistent states") {
  const MechanismDesign dual = test::design(DesignId::DualVia);
  const FullState s = full_state(dual, {0, 0}, BranchVector::uniform(2));
  const Eigen::VectorXd q = driven_coordinates(dual, s);
  CHECK(constraint_residual(dual, {0, 0}, q).norm() < 1e-12);
  CHECK(constraint_residual(dual, {0.01, 0}, q).norm() > 1e-4);

  const MechanismDesign three = test::design(DesignId::ThreeLegs, 0.5, 0.25, 0.5);
  const FullState s3 = full_state(three, {0, 0}, BranchVector::uniform(3));
  const Eigen::VectorXd r3 = constraint_residual(three, {0, 0}, driven_coordinates(three, s3));
  CHECK(r3.size() == 3);
  CHECK(r3.norm() < 1e-12);

  test::Gen gen(201);
  for (DesignId id : kAllDesigns) {
    const MechanismDesign d = test::design(id);
    for (int i = 0; i < 20; ++i) {
      const auto [x, b] = gen.feasible_point(d);
      CHECK(constraint_residual(d, x, driven_coordinates(d, full_state(d, x, b))).norm() < 1e-12);
    }
  }
}

TEST_CASE("jacobian_parts structure") {
  const MechanismDesign dual = test::design(DesignId::DualVia);
  const Point2 x(0, 0);
  const FullState s = full_state(dual, x, BranchVector::uniform(2));
  const JacobianParts p = jacobian_parts(dual, x, s);
  const LegGeometry& g = dual.legs[0].geometry;
  const Point2 d = x - g.base - g.r * Point2(std::cos(s.legs[0].q1), std::sin(s.legs[0].q1));
  CHECK((p.jx.row(0).transpose() - 2 * d).norm() < 1e-12);

  const MechanismDesign full = test::design(DesignId::DualFull);
  const FullState sf = full_state(full, {0.1, 0.2}, BranchVector::uniform(2));
  const JacobianParts pf = jacobian_parts(full, {0.1, 0.2}, sf);
  CHECK((pf.jx.topRows(2) + Eigen::Matrix2d::Identity()).norm() < 1e-15);
  CHECK((pf.jq.block(0, 0, 2, 2) - leg_jacobian(full.legs[0].geometry, sf.legs[0])).norm() < 1e-15);

  const MechanismDesign four = test::design(DesignId::FourLegs);
  const FullState s4 = full_state(four, {0, 0}, BranchVector::uniform(4));
  const JacobianParts p4 = jacobian_parts(four, {0, 0}, s4);
  CHECK(p4.jx.rows() == 4);
  CHECK(p4.jx.cols() == 2);
  CHECK(p4.jq.rows() == 4);
  CHECK(p4.jq.cols() == 4);
  Eigen::MatrixXd off = p4.jq;
  off.diagonal().setZero();
  CHECK(off.norm() == 0.0);
}

TEST_CASE("jacobian_parts match finite differences") {
  test::Gen gen(202);
  double worst = 0.0;
  for (DesignId id : kAllDesigns) {
    for (const auto& geo : {DesignGeometry{0.5, 0.25, 0.5}, DesignGeometry{0.4, 0.4, 0.5}}) {
      const MechanismDesign d = test::design(id, geo.r, geo.l, geo.e);
      for (int i = 0; i < 40; ++i) {
        const auto [x, b] = gen.feasible_point(d);
        const FullState s = full_state(d, x, b);
        const JacobianParts p = jacobian_parts(d, x, s);
        const Eigen::VectorXd q = driven_coordinates(d, s);
        worst = std::max(worst, (p.jx - fd_jx(d, x, q)).cwiseAbs().maxCoeff());
        worst = std::max(worst, (p.jq - fd_jq(d, x, q)).cwiseAbs().maxCoeff());
      }
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("parallel_jacobian reductions") {
  const Matrix2 jl = leg_jacobian({Point2::Zero(), 0.4, 0.4}, {0.3, 1.1});
  const Eigen::MatrixXd j = parallel_jacobian(-Eigen::MatrixXd::Identity(2, 2), jl);
  CHECK((j - jl).norm() < 1e-14);

  Eigen::MatrixXd jx(2, 2);
  jx << 1.0, 0.3, -0.2, 0.7;
  Eigen::MatrixXd jq(2, 2);
  jq << 0.5, 0.0, 0.0, 2.0;
  CHECK((parallel_jacobian(jx, jq) + jx.inverse() * jq).norm() < 1e-14);
  CHECK((pseudo_inverse(jx) - jx.inverse()).norm() < 1e-12);

  Eigen::MatrixXd singular(3, 2);
  singular << 1, 2, 2, 4, 3, 6;
  CHECK_THROWS_AS(parallel_jacobian(singular, Eigen::MatrixXd::Identity(3, 3)), Error);
}

TEST_CASE("parallel Jacobian predicts constrained motion") {
  // J * G = I where G = dq/dx along the constraint manifold
  test::Gen gen(203);
  double worst = 0.0;
  for (DesignId id : kAllDesigns) {
    const MechanismDesign d = test::design(id);
    for (int i = 0; i < 30; ++i) {
      const auto [x, b] = gen.feasible_point(d);
      const Eigen::MatrixXd j = parallel_jacobian_at(d, x, b);
      Eigen::MatrixXd g(d.m, 2);
      for (int c = 0; c < 2; ++c) {
        Point2 dx = Point2::Zero();
        dx(c) = kH;
        g.col(c) = (driven_coordinates(d, full_state(d, x + dx, b)) - driven_coordinates(d, full_state(d, x - dx, b))) /
                   (2 * kH);
      }
      // skip points too close to a singularity for central differences
      if (condition_index(j) < 1e-2) continue;
      worst = std::max(worst, (j * g - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst < 1e-5);

  // the symmetric FOUR_LEGS pose: a small admissible joint step moves x by J * dq
  const MechanismDesign four = test::design(DesignId::FourLegs);
  const BranchVector b = BranchVector::uniform(4);
  const Eigen::MatrixXd j = parallel_jacobian_at(four, {0, 0}, b);
  const Point2 dx(1e-4, -0.5e-4);
  const Eigen::VectorXd dq =
      driven_coordinates(four, full_state(four, dx, b)) - driven_coordinates(four, full_state(four, {0, 0}, b));
  CHECK((j * dq - dx).norm() < 1e-5 * dx.norm() + 1e-9);
}

TEST_CASE("kernel_basis") {
  Eigen::MatrixXd axis(2, 3);
  axis << 1, 0, 0, 0, 1, 0;
  const Eigen::MatrixXd n = kernel_basis(axis);
  REQUIRE(n.cols() == 1);
  CHECK((n - Eigen::Vector3d(0, 0, 1)).norm() < 1e-15);

  test::Gen gen(204);
  for (int i = 0; i < 200; ++i) {
    Eigen::MatrixXd j(2, 4);
    for (Eigen::Index k = 0; k < j.size(); ++k) j(k) = gen.uniform(-1, 1);
    const Eigen::MatrixXd basis = kernel_basis(j);
    REQUIRE(basis.cols() == 2);
    CHECK((j * basis).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((basis.transpose() * basis - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    // sign convention: first non-negligible entry of each column is positive
    for (Eigen::Index c = 0; c < basis.cols(); ++c) {
      for (Eigen::Index r = 0; r < basis.rows(); ++r) {
        if (std::abs(basis(r, c)) > 1e-12) {
          CHECK(basis(r, c) > 0.0);
          break;
        }
      }
    }
  }

  CHECK(kernel_basis(Eigen::MatrixXd::Identity(2, 2)).cols() == 0);
  Eigen::MatrixXd rank_one(2, 3);
  rank_one << 1, 2, 3, 2, 4, 6;
  CHECK_THROWS_AS(kernel_basis(rank_one), Error);
}

TEST_CASE("kernel basis against the projector I - J^T pinv(J)^T") {
  test::Gen gen(205);
  for (DesignId id : {DesignId::FullSeaMix, DesignId::DualFull, DesignId::ThreeLegs, DesignId::FourLegs}) {
    const MechanismDesign d = test::design(id);
    for (int i = 0; i < 25; ++i) {
      const auto [x, b] = gen.feasible_point(d);
      const Eigen::MatrixXd j = parallel_jacobian_at(d, x, b);
      const Eigen::MatrixXd n = kernel_basis(j);
      const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(d.m, d.m) - j.transpose() * pseudo_inverse(j).transpose();
      CHECK((j * n).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((p * n - n).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((n * n.transpose() * p - p).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("condition_index") {
  CHECK(condition_index(Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(1.0));
  Eigen::MatrixXd j(2, 2);
  j << 1, 0, 0, 0.01;
  CHECK(condition_index(j) == doctest::Approx(1e-4).epsilon(1e-10));
  Eigen::MatrixXd zero_row(2, 3);
  zero_row << 1, 2, 3, 0, 0, 0;
  CHECK(condition_index(zero_row) == 0.0);
  CHECK(condition_index(Eigen::MatrixXd::Zero(2, 2)) == 0.0);

  test::Gen gen(206);
  for (int i = 0; i < 100; ++i) {
    Eigen::MatrixXd a(2, 3);
    for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = gen.uniform(-2, 2);
    const double ci = condition_index(a);
    CHECK(ci >= 0.0);
    CHECK(ci <= 1.0 + 1e-15);
    CHECK(condition_index(3.0 * a) == doctest::Approx(ci).epsilon(1e-10));
  }
}

TEST_CASE("jacobian bundle kernel shapes") {
  const MechanismDesign dual = test::design(DesignId::DualVia);
  const FullState s = full_state(dual, {0, 0.1}, BranchVector::uniform(2));
  const JacobianBundle b = jacobian_bundle(dual, {0, 0.1}, s);
  CHECK(b.kernel.rows() == 2);
  CHECK(b.kernel.cols() == 0);

  const MechanismDesign four = test::design(DesignId::FourLegs);
  const FullState s4 = full_state(four, {0, 0}, BranchVector::uniform(4));
  CHECK(jacobian_bundle(four, {0, 0}, s4).kernel.cols() == 2);
}
