#pragma once

#include <numbers>
#include <optional>
#include <string_view>

namespace vsm {

/// Torque law of a nonlinear joint spring as a function of deflection gamma.
///   Additive: tau(gamma) = a*sin(gamma) + gamma^3
///   Product:  tau(gamma) = a*sin(gamma) * gamma^3   (kept for comparison only)
enum class SpringLaw { Additive, Product };

std::string_view to_string(SpringLaw law);
std::optional<SpringLaw> parse_spring_law(std::string_view text);

/// Nonlinear spring with a bounded deflection range [-gamma_max, gamma_max].
///
/// Inversion (torque -> deflection) is restricted to the monotone branch of
/// the law that contains gamma = 0. For the default additive law with a = 5
/// that branch is the whole deflection range, so every torque in
/// [-pi^3, pi^3] has exactly one equilibrium deflection.
class SpringModel {
 public:
  SpringModel() : SpringModel(5.0, std::numbers::pi, SpringLaw::Additive) {}
  SpringModel(double a, double gamma_max, SpringLaw law = SpringLaw::Additive);

  [[nodiscard]] double a() const { return a_; }
  [[nodiscard]] double gamma_max() const { return gamma_max_; }
  [[nodiscard]] SpringLaw law() const { return law_; }

  /// Throw Error(OutOfRange) when |gamma| > gamma_max.
  [[nodiscard]] double torque(double gamma) const;
  [[nodiscard]] double stiffness(double gamma) const;
  [[nodiscard]] double curvature(double gamma) const;

  [[nodiscard]] double torque_unchecked(double gamma) const;
  [[nodiscard]] double stiffness_unchecked(double gamma) const;

  /// Deflection range of the invertible branch.
  [[nodiscard]] double branch_low() const { return branch_lo_; }
  [[nodiscard]] double branch_high() const { return branch_hi_; }
  /// Realizable torque interval [torque(branch_low), torque(branch_high)].
  [[nodiscard]] double min_torque() const { return torque_lo_; }
  [[nodiscard]] double max_torque() const { return torque_hi_; }

  /// True when no deflection on the invertible branch is softer than gamma = 0
  /// (checked on a fine scan; holds for the additive law with a <= 6).
  [[nodiscard]] bool softest_at_zero() const { return softest_at_zero_; }

  /// Equilibrium deflection for a joint torque, or nullopt if unrealizable.
  [[nodiscard]] std::optional<double> try_deflection(double torque) const;
  /// Throws Error(TorqueInfeasible) when the torque is unrealizable.
  [[nodiscard]] double deflection(double torque) const;

  friend bool operator==(const SpringModel& a, const SpringModel& b) {
    return a.a_ == b.a_ && a.gamma_max_ == b.gamma_max_ && a.law_ == b.law_;
  }

 private:
  double a_;
  double gamma_max_;
  SpringLaw law_;
  double branch_lo_ = 0.0;
  double branch_hi_ = 0.0;
  double torque_lo_ = 0.0;
  double torque_hi_ = 0.0;
  bool softest_at_zero_ = true;
};

}  // namespace vsm
