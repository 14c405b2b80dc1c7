#pragma once

#include <cstdint>
#include <random>

#include "vsm/mechanism_catalog.hpp"
#include "vsm/planar_kinematics.hpp"
#include "vsm/workspace_metric.hpp"

namespace vsm::test {

/// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  LegGeometry leg() { return {Point2(uniform(-1, 1), uniform(-1, 1)), uniform(0.2, 1.0), uniform(0.2, 1.0)}; }

  /// Target strictly inside the leg annulus.
  Point2 reachable_target(const LegGeometry& g) {
    const double lo = std::abs(g.r - g.l);
    const double rho = lo + (g.r + g.l - lo) * uniform(0.01, 0.99);
    const double phi = uniform(-3.14159, 3.14159);
    return g.base + rho * Point2(std::cos(phi), std::sin(phi));
  }

  /// A feasible task point and branch of `design` (classification with the default cutoff).
  std::pair<Point2, BranchVector> feasible_point(const MechanismDesign& design) {
    const auto branches = branch_vectors(design);
    const double h = design.e + design.legs.front().geometry.r + design.legs.front().geometry.l;
    for (;;) {
      const Point2 x(uniform(-h, h), uniform(-h, h));
      const BranchVector& b = branches[index(branches.size())];
      if (classify_point(design, x, b, 1e-4) == PointStatus::Ok) return {x, b};
    }
  }

 private:
  std::mt19937_64 rng_;
};

inline MechanismDesign design(DesignId id, double r = 0.4, double l = 0.4, double e = 0.5) {
  return make_design(id, {r, l, e}, SpringModel{});
}

}  // namespace vsm::test
