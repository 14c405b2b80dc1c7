#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "vsm/planar_kinematics.hpp"
#include "vsm/spring_model.hpp"

namespace vsm {

enum class DriveKind {
  Passive,       ///< unactuated revolute joint
  Elastic,       ///< motor in series with one nonlinear spring
  Antagonistic,  ///< two motor-spring units acting on the same joint
};

struct JointDrive {
  DriveKind kind = DriveKind::Passive;
  SpringModel spring;
  SpringModel spring2;  // used by Antagonistic only

  static JointDrive passive() { return {}; }
  static JointDrive elastic(const SpringModel& s) { return {DriveKind::Elastic, s, s}; }
  static JointDrive antagonistic(const SpringModel& s1, const SpringModel& s2) {
    return {DriveKind::Antagonistic, s1, s2};
  }

  [[nodiscard]] bool driven() const { return kind != DriveKind::Passive; }
  /// Number of motor-spring units in this joint.
  [[nodiscard]] int actuator_count() const {
    return kind == DriveKind::Passive ? 0 : (kind == DriveKind::Elastic ? 1 : 2);
  }
};

struct LegTopology {
  LegGeometry geometry;
  JointDrive base_drive;
  JointDrive elbow_drive;
};

/// The six canonical planar 2-DOF designs.
enum class DesignId {
  ViaSea,      ///< antagonistic-base leg + elastic-base leg, passive elbows
  DualVia,     ///< two antagonistic-base legs, passive elbows
  FullSeaMix,  ///< fully actuated elastic leg + elastic-base leg
  DualFull,    ///< two fully actuated elastic legs
  ThreeLegs,   ///< three elastic-base legs, passive elbows
  FourLegs,    ///< four elastic-base legs, passive elbows
};

inline constexpr std::array<DesignId, 6> kAllDesigns = {
    DesignId::ViaSea,   DesignId::DualVia,   DesignId::FullSeaMix,
    DesignId::DualFull, DesignId::ThreeLegs, DesignId::FourLegs,
};

/// Stable identifier used in config and output files ("via_sea", ...).
std::string_view design_key(DesignId id);
std::optional<DesignId> parse_design_key(std::string_view key);

/// Joint slot inside a leg.
enum class JointSlot { Base = 0, Elbow = 1 };

/// A driven joint: one independent actuated coordinate q_k.
struct DrivenJoint {
  std::size_t leg = 0;
  JointSlot slot = JointSlot::Base;
  DriveKind kind = DriveKind::Elastic;
};

struct DesignGeometry {
  double r = 0.5;
  double l = 0.25;
  double e = 0.5;

  friend bool operator==(const DesignGeometry&, const DesignGeometry&) = default;
};

/// Angular offset of the first base joint, per leg count.
struct BaseOffsets {
  double two_legs = 0.0;
  double three_legs = std::numbers::pi / 2.0;
  double four_legs = 0.0;

  [[nodiscard]] double for_leg_count(int n) const;

  friend bool operator==(const BaseOffsets&, const BaseOffsets&) = default;
};

struct MechanismDesign {
  DesignId id = DesignId::ViaSea;
  std::vector<LegTopology> legs;
  int p = 0;  ///< motor-spring units
  int m = 0;  ///< independent actuated joint coordinates
  double e = 0.5;

  [[nodiscard]] std::size_t leg_count() const { return legs.size(); }
  /// Driven joints ordered leg by leg, base before elbow. Size equals m.
  [[nodiscard]] std::vector<DrivenJoint> driven_joints() const;
  [[nodiscard]] const JointDrive& drive(const DrivenJoint& joint) const;
};

MechanismDesign make_design(DesignId id, const DesignGeometry& geometry, const SpringModel& spring,
                            const BaseOffsets& offsets = {});

/// All six designs in catalog order, sharing link lengths and spring.
std::vector<MechanismDesign> canonical_designs(double r, double l, double e, const SpringModel& spring,
                                               const BaseOffsets& offsets = {});

/// Dimension of the parallel Jacobian's null space, m - 2.
int redundancy_degree(const MechanismDesign& design);

/// All 2^legs branch combinations, leg 1 varying fastest.
std::vector<BranchVector> branch_vectors(const MechanismDesign& design);

}  // namespace vsm
