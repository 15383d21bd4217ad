#pragma once

#include <cmath>

#include "tvcm/error.hpp"

namespace tvcm {

/// Smoothly clipped absolute deviation penalty.
///   lambda |b|                                   |b| <= lambda
///   -(b^2 - 2 a lambda |b| + lambda^2) / (2(a-1))  lambda < |b| <= a lambda
///   (a + 1) lambda^2 / 2                         |b| > a lambda
inline double scad(double b, double lambda, double a) {
  if (!(a > 2.0)) throw Error(ErrorKind::InvalidHyperparameter, "SCAD requires a > 2");
  if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidHyperparameter, "SCAD requires lambda >= 0");
  const double x = std::abs(b);
  if (x <= lambda) return lambda * x;
  if (x <= a * lambda) return -(x * x - 2.0 * a * lambda * x + lambda * lambda) / (2.0 * (a - 1.0));
  return (a + 1.0) * lambda * lambda / 2.0;
}

struct ScadConfig {
  double lambda = 0.0;
  double a = 3.7;

  bool enabled() const { return lambda > 0.0; }
};

}  // namespace tvcm
