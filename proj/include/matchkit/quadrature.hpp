#pragma once

#include <functional>

namespace matchkit {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_depth = 50;
};

/// Adaptive Simpson integral of f over [a, b] (b < a allowed). Throws
/// QuadratureFailure when the tolerance cannot be met within max_depth or f
/// returns a non-finite value.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        QuadratureOptions options = {});

}  // namespace matchkit
