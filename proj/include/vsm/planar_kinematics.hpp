#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vsm {

using Point2 = Eigen::Vector2d;
using Matrix2 = Eigen::Matrix2d;

struct MechanismDesign;

/// Tolerance for accepting targets that lie just outside a leg annulus.
inline constexpr double kReachTolerance = 1e-12;

/// Two-link planar leg: base joint at `base`, proximal link `r`, distal link `l`.
struct LegGeometry {
  Point2 base = Point2::Zero();
  double r = 1.0;
  double l = 1.0;
};

/// Base angle q1 (absolute) and elbow angle q2 (relative to the proximal link).
struct JointPair {
  double q1 = 0.0;
  double q2 = 0.0;
};

/// Elbow solution selector. `First` yields q2 >= 0, `Second` yields q2 <= 0.
enum class Branch : int { First = 1, Second = 2 };

/// One elbow branch per leg, in leg order.
struct BranchVector {
  std::vector<Branch> entries;

  [[nodiscard]] std::size_t size() const { return entries.size(); }
  /// Concatenated per-leg indices, e.g. "1121".
  [[nodiscard]] std::string to_string() const;
  /// Parses "1121"-style strings; returns nullopt on any other character.
  static std::optional<BranchVector> parse(std::string_view text);
  static BranchVector uniform(std::size_t legs, Branch b = Branch::First);

  friend bool operator==(const BranchVector&, const BranchVector&) = default;
};

/// Joint angles of every leg of a mechanism at one task point.
struct FullState {
  std::vector<JointPair> legs;
};

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Evenly spaced points on a circle of radius `e`; point i sits at offset + 2*pi*i/n.
std::vector<Point2> place_bases(int n_legs, double e, double offset);

Point2 leg_fk(const LegGeometry& geom, const JointPair& q);

/// Closed-form elbow solution. Throws Error(Unreachable) outside the annulus
/// |r - l| <= |target - base| <= r + l.
JointPair leg_ik(const LegGeometry& geom, const Point2& target, Branch branch);
std::optional<JointPair> try_leg_ik(const LegGeometry& geom, const Point2& target, Branch branch);

/// Columns are the partial derivatives of leg_fk with respect to q1 and q2.
Matrix2 leg_jacobian(const LegGeometry& geom, const JointPair& q);

/// Leg-wise inverse kinematics of the whole mechanism at task point `x`.
FullState full_state(const MechanismDesign& design, const Point2& x, const BranchVector& branch);
std::optional<FullState> try_full_state(const MechanismDesign& design, const Point2& x,
                                        const BranchVector& branch);

}  // namespace vsm
