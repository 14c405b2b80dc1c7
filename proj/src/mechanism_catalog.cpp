#include "vsm/mechanism_catalog.hpp"

#include "vsm/error.hpp"

namespace vsm {

std::string_view design_key(DesignId id) {
  switch (id) {
    case DesignId::ViaSea: return "via_sea";
    case DesignId::DualVia: return "dual_via";
    case DesignId::FullSeaMix: return "full_sea_mix";
    case DesignId::DualFull: return "dual_full";
    case DesignId::ThreeLegs: return "three_legs";
    case DesignId::FourLegs: return "four_legs";
  }
  return "unknown";
}

std::optional<DesignId> parse_design_key(std::string_view key) {
  for (DesignId id : kAllDesigns) {
    if (design_key(id) == key) return id;
  }
  return std::nullopt;
}

double BaseOffsets::for_leg_count(int n) const {
  switch (n) {
    case 2: return two_legs;
    case 3: return three_legs;
    case 4: return four_legs;
    default: throw Error(ErrorCode::UnsupportedLegCount, "no base offset for " + std::to_string(n) + " legs");
  }
}

std::vector<DrivenJoint> MechanismDesign::driven_joints() const {
  std::vector<DrivenJoint> joints;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    if (legs[i].base_drive.driven()) joints.push_back({i, JointSlot::Base, legs[i].base_drive.kind});
    if (legs[i].elbow_drive.driven()) joints.push_back({i, JointSlot::Elbow, legs[i].elbow_drive.kind});
  }
  return joints;
}

const JointDrive& MechanismDesign::drive(const DrivenJoint& joint) const {
  const LegTopology& leg = legs.at(joint.leg);
  return joint.slot == JointSlot::Base ? leg.base_drive : leg.elbow_drive;
}

MechanismDesign make_design(DesignId id, const DesignGeometry& geometry, const SpringModel& spring,
                            const BaseOffsets& offsets) {
  if (!(geometry.r > 0.0) || !(geometry.l > 0.0) || !(geometry.e > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "geometry parameters r, l, e must be positive");
  }
  const JointDrive passive = JointDrive::passive();
  const JointDrive sea = JointDrive::elastic(spring);
  const JointDrive via = JointDrive::antagonistic(spring, spring);

  // (base, elbow) drive per leg
  std::vector<std::pair<JointDrive, JointDrive>> drives;
  switch (id) {
    case DesignId::ViaSea: drives = {{via, passive}, {sea, passive}}; break;
    case DesignId::DualVia: drives = {{via, passive}, {via, passive}}; break;
    case DesignId::FullSeaMix: drives = {{sea, sea}, {sea, passive}}; break;
    case DesignId::DualFull: drives = {{sea, sea}, {sea, sea}}; break;
    case DesignId::ThreeLegs: drives = {{sea, passive}, {sea, passive}, {sea, passive}}; break;
    case DesignId::FourLegs: drives = {{sea, passive}, {sea, passive}, {sea, passive}, {sea, passive}}; break;
  }

  const int n = static_cast<int>(drives.size());
  const auto bases = place_bases(n, geometry.e, offsets.for_leg_count(n));

  MechanismDesign design;
  design.id = id;
  design.e = geometry.e;
  for (int i = 0; i < n; ++i) {
    LegTopology leg;
    leg.geometry = LegGeometry{bases[static_cast<std::size_t>(i)], geometry.r, geometry.l};
    leg.base_drive = drives[static_cast<std::size_t>(i)].first;
    leg.elbow_drive = drives[static_cast<std::size_t>(i)].second;
    design.p += leg.base_drive.actuator_count() + leg.elbow_drive.actuator_count();
    design.m += (leg.base_drive.driven() ? 1 : 0) + (leg.elbow_drive.driven() ? 1 : 0);
    design.legs.push_back(leg);
  }
  return design;
}

std::vector<MechanismDesign> canonical_designs(double r, double l, double e, const SpringModel& spring,
                                               const BaseOffsets& offsets) {
  std::vector<MechanismDesign> designs;
  for (DesignId id : kAllDesigns) designs.push_back(make_design(id, {r, l, e}, spring, offsets));
  return designs;
}

int redundancy_degree(const MechanismDesign& design) { return design.m - 2; }

std::vector<BranchVector> branch_vectors(const MechanismDesign& design) {
  const std::size_t n = design.leg_count();
  const std::size_t count = std::size_t{1} << n;
  std::vector<BranchVector> out;
  out.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    BranchVector b;
    for (std::size_t leg = 0; leg < n; ++leg) {
      b.entries.push_back(((code >> leg) & 1U) ? Branch::Second : Branch::First);
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace vsm
