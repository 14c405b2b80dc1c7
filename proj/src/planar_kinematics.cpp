#include "vsm/planar_kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vsm/error.hpp"
#include "vsm/mechanism_catalog.hpp"

namespace vsm {

std::string BranchVector::to_string() const {
  std::string out;
  out.reserve(entries.size());
  for (Branch b : entries) out.push_back(b == Branch::First ? '1' : '2');
  return out;
}

std::optional<BranchVector> BranchVector::parse(std::string_view text) {
  BranchVector out;
  for (char c : text) {
    if (c == '1') {
      out.entries.push_back(Branch::First);
    } else if (c == '2') {
      out.entries.push_back(Branch::Second);
    } else {
      return std::nullopt;
    }
  }
  if (out.entries.empty()) return std::nullopt;
  return out;
}

BranchVector BranchVector::uniform(std::size_t legs, Branch b) {
  return BranchVector{std::vector<Branch>(legs, b)};
}

double normalize_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::remainder(angle, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

std::vector<Point2> place_bases(int n_legs, double e, double offset) {
  if (n_legs < 2 || n_legs > 4) {
    throw Error(ErrorCode::UnsupportedLegCount, "leg count must be 2, 3 or 4, got " + std::to_string(n_legs));
  }
  if (!(e > 0.0)) throw Error(ErrorCode::InvalidArgument, "base radius must be positive");
  std::vector<Point2> bases;
  bases.reserve(static_cast<std::size_t>(n_legs));
  for (int i = 0; i < n_legs; ++i) {
    const double angle = offset + 2.0 * std::numbers::pi * i / n_legs;
    bases.emplace_back(e * std::cos(angle), e * std::sin(angle));
  }
  return bases;
}

Point2 leg_fk(const LegGeometry& geom, const JointPair& q) {
  const double q12 = q.q1 + q.q2;
  return geom.base + Point2(geom.r * std::cos(q.q1) + geom.l * std::cos(q12),
                            geom.r * std::sin(q.q1) + geom.l * std::sin(q12));
}

std::optional<JointPair> try_leg_ik(const LegGeometry& geom, const Point2& target, Branch branch) {
  const Point2 d = target - geom.base;
  const double dist = d.norm();
  const double r = geom.r;
  const double l = geom.l;
  if (dist > r + l + kReachTolerance || dist < std::abs(r - l) - kReachTolerance) return std::nullopt;

  const double c2 = std::clamp((dist * dist - r * r - l * l) / (2.0 * r * l), -1.0, 1.0);
  double q2 = std::acos(c2);
  if (branch == Branch::Second) q2 = -q2;
  const double q1 = std::atan2(d.y(), d.x()) - std::atan2(l * std::sin(q2), r + l * std::cos(q2));
  return JointPair{normalize_angle(q1), normalize_angle(q2)};
}

JointPair leg_ik(const LegGeometry& geom, const Point2& target, Branch branch) {
  auto q = try_leg_ik(geom, target, branch);
  if (!q) throw Error(ErrorCode::Unreachable, "target outside the leg annulus");
  return *q;
}

Matrix2 leg_jacobian(const LegGeometry& geom, const JointPair& q) {
  const double q12 = q.q1 + q.q2;
  const double s1 = std::sin(q.q1);
  const double c1 = std::cos(q.q1);
  const double s12 = std::sin(q12);
  const double c12 = std::cos(q12);
  Matrix2 j;
  j << -geom.r * s1 - geom.l * s12, -geom.l * s12,
        geom.r * c1 + geom.l * c12,  geom.l * c12;
  return j;
}

std::optional<FullState> try_full_state(const MechanismDesign& design, const Point2& x,
                                        const BranchVector& branch) {
  if (branch.size() != design.legs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "branch vector length does not match leg count");
  }
  FullState state;
  state.legs.reserve(design.legs.size());
  for (std::size_t i = 0; i < design.legs.size(); ++i) {
    auto q = try_leg_ik(design.legs[i].geometry, x, branch.entries[i]);
    if (!q) return std::nullopt;
    state.legs.push_back(*q);
  }
  return state;
}

FullState full_state(const MechanismDesign& design, const Point2& x, const BranchVector& branch) {
  auto state = try_full_state(design, x, branch);
  if (!state) throw Error(ErrorCode::Unreachable, "task point outside the workspace of at least one leg");
  return *state;
}

}  // namespace vsm
