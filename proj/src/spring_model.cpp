#include "vsm/spring_model.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "vsm/error.hpp"

namespace vsm {

namespace {

constexpr int kBranchScanSteps = 20000;

}  // namespace

std::string_view to_string(SpringLaw law) {
  return law == SpringLaw::Additive ? "additive" : "product";
}

std::optional<SpringLaw> parse_spring_law(std::string_view text) {
  if (text == "additive") return SpringLaw::Additive;
  if (text == "product") return SpringLaw::Product;
  return std::nullopt;
}

SpringModel::SpringModel(double a, double gamma_max, SpringLaw law) : a_(a), gamma_max_(gamma_max), law_(law) {
  if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorCode::InvalidArgument, "spring coefficient a must be positive");
  if (!(gamma_max > 0.0) || !std::isfinite(gamma_max)) {
    throw Error(ErrorCode::InvalidArgument, "spring gamma_max must be positive");
  }

  // Walk outwards from zero until the stiffness stops being positive.
  auto branch_end = [this](double direction) {
    const double step = gamma_max_ / kBranchScanSteps;
    double prev = 0.0;
    for (int i = 1; i <= kBranchScanSteps; ++i) {
      const double g = direction * step * i;
      if (!(stiffness_unchecked(g) > 0.0)) {
        if (i == 1) return 0.0;
        boost::math::tools::eps_tolerance<double> tol(50);
        auto [lo, hi] = boost::math::tools::bisect(
            [this](double x) { return stiffness_unchecked(x); }, std::min(prev, g), std::max(prev, g), tol);
        return direction > 0 ? lo : hi;
      }
      prev = g;
    }
    return direction * gamma_max_;
  };
  branch_hi_ = branch_end(1.0);
  branch_lo_ = branch_end(-1.0);
  torque_lo_ = torque_unchecked(branch_lo_);
  torque_hi_ = torque_unchecked(branch_hi_);

  const double k0 = stiffness_unchecked(0.0);
  for (int i = 0; i <= kBranchScanSteps && softest_at_zero_; ++i) {
    const double g = branch_lo_ + (branch_hi_ - branch_lo_) * i / kBranchScanSteps;
    softest_at_zero_ = stiffness_unchecked(g) >= k0 - 1e-12 * std::abs(k0);
  }
}

double SpringModel::torque_unchecked(double gamma) const {
  const double g3 = gamma * gamma * gamma;
  if (law_ == SpringLaw::Additive) return a_ * std::sin(gamma) + g3;
  return a_ * std::sin(gamma) * g3;
}

double SpringModel::stiffness_unchecked(double gamma) const {
  const double g2 = gamma * gamma;
  if (law_ == SpringLaw::Additive) return a_ * std::cos(gamma) + 3.0 * g2;
  return a_ * (std::cos(gamma) * g2 * gamma + 3.0 * g2 * std::sin(gamma));
}

double SpringModel::curvature(double gamma) const {
  if (std::abs(gamma) > gamma_max_) throw Error(ErrorCode::OutOfRange, "deflection exceeds gamma_max");
  if (law_ == SpringLaw::Additive) return -a_ * std::sin(gamma) + 6.0 * gamma;
  const double s = std::sin(gamma);
  const double c = std::cos(gamma);
  const double g2 = gamma * gamma;
  return a_ * (-s * g2 * gamma + 6.0 * c * g2 + 6.0 * gamma * s);
}

double SpringModel::torque(double gamma) const {
  if (std::abs(gamma) > gamma_max_) throw Error(ErrorCode::OutOfRange, "deflection exceeds gamma_max");
  return torque_unchecked(gamma);
}

double SpringModel::stiffness(double gamma) const {
  if (std::abs(gamma) > gamma_max_) throw Error(ErrorCode::OutOfRange, "deflection exceeds gamma_max");
  return stiffness_unchecked(gamma);
}

std::optional<double> SpringModel::try_deflection(double torque) const {
  if (!(torque >= torque_lo_ && torque <= torque_hi_)) return std::nullopt;
  if (torque == torque_lo_) return branch_lo_;
  if (torque == torque_hi_) return branch_hi_;
  if (torque == 0.0 && branch_lo_ <= 0.0 && branch_hi_ >= 0.0 && torque_unchecked(0.0) == 0.0) return 0.0;

  const double span = torque_hi_ - torque_lo_;
  const double guess = branch_lo_ + (torque - torque_lo_) / span * (branch_hi_ - branch_lo_);
  auto fn = [this, torque](double g) { return std::make_pair(torque_unchecked(g) - torque, stiffness_unchecked(g)); };
  std::uintmax_t max_iter = 100;
  const double gamma = boost::math::tools::newton_raphson_iterate(
      fn, guess, branch_lo_, branch_hi_, std::numeric_limits<double>::digits - 3, max_iter);
  return std::clamp(gamma, branch_lo_, branch_hi_);
}

double SpringModel::deflection(double torque) const {
  auto g = try_deflection(torque);
  if (!g) {
    throw Error(ErrorCode::TorqueInfeasible, "joint torque " + std::to_string(torque) + " outside realizable range [" +
                                                 std::to_string(torque_lo_) + ", " + std::to_string(torque_hi_) + "]");
  }
  return *g;
}

}  // namespace vsm
