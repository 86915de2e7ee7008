#include "homog/coefficient.hpp"

#include <cmath>

namespace homog {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

CoefficientField CoefficientField::identity() {
  return {[](const Eigen::Vector2d&) { return Eigen::Matrix2d::Identity().eval(); },
          1.0, 1.0};
}

CoefficientField CoefficientField::scaled_identity(double c) {
  return {[c](const Eigen::Vector2d&) { return (c * Eigen::Matrix2d::Identity()).eval(); },
          c, c};
}

CoefficientField CoefficientField::isotropic(
    std::function<double(const Eigen::Vector2d&)> a, double lower, double upper) {
  return {[a = std::move(a)](const Eigen::Vector2d& y) {
            return (a(y) * Eigen::Matrix2d::Identity()).eval();
          },
          lower, upper};
}

CoefficientField CoefficientField::oscillatory() {
  return isotropic(
      [](const Eigen::Vector2d& y) {
        return 1.0 / (2.0 + std::cos(2 * kPi * y.x()) * std::cos(2 * kPi * y.y()));
      },
      1.0 / 3.0, 1.0);
}

CoefficientField CoefficientField::laminate() {
  return isotropic(
      [](const Eigen::Vector2d& y) { return 1.0 / (2.0 + std::cos(2 * kPi * y.x())); },
      1.0 / 3.0, 1.0);
}

CoefficientField CoefficientField::rescaled(double epsilon) const {
  auto base = eval;
  return {[base, epsilon](const Eigen::Vector2d& x) { return base(x / epsilon); },
          gamma_lower, gamma_upper};
}

}  // namespace homog
