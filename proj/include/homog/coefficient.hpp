#pragma once

#include <Eigen/Core>

#include <functional>

namespace homog {

/// Symmetric 2x2 diffusion coefficient with declared ellipticity bounds.
/// Evaluations at quadrature points are spot-checked against the bounds
/// during assembly.
struct CoefficientField {
  std::function<Eigen::Matrix2d(const Eigen::Vector2d&)> eval;
  double gamma_lower = 1.0;
  double gamma_upper = 1.0;

  static CoefficientField identity();
  static CoefficientField scaled_identity(double c);
  /// Scalar field a(y) * I with declared bounds.
  static CoefficientField isotropic(std::function<double(const Eigen::Vector2d&)> a,
                                    double lower, double upper);
  /// 1 / (2 + cos(2 pi y1) cos(2 pi y2)), bounds [1/3, 1].
  static CoefficientField oscillatory();
  /// 1 / (2 + cos(2 pi y1)), bounds [1/3, 1].
  static CoefficientField laminate();
  /// A(x / epsilon) for a Y-periodic cell coefficient A.
  CoefficientField rescaled(double epsilon) const;
};

}  // namespace homog
