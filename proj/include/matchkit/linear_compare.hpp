#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "matchkit/cartpole.hpp"

namespace matchkit {

/// u = k_theta θ + k_x x + k_thetadot θ̇ + k_xdot ẋ.
struct LinearGains {
  double k_theta = 0.0;
  double k_x = 0.0;
  double k_thetadot = 0.0;
  double k_xdot = 0.0;

  double operator()(const CartState& s) const {
    return k_theta * s.theta + k_x * s.x + k_thetadot * s.theta_dot + k_xdot * s.x_dot;
  }
  Eigen::RowVector4d row() const { return {k_theta, k_x, k_thetadot, k_xdot}; }
};

/// The published comparison law u = 1021θ + 115.8x + 918.5θ̇ + 158.2ẋ.
LinearGains paper_gains();

/// Linearization of the cart at the upright equilibrium, state order
/// (θ, x, θ̇, ẋ):  θ̈ = (θ − bu)/(1 − b²),  ẍ = (u − bθ)/(1 − b²).
struct CartLinearization {
  Eigen::Matrix4d A;
  Eigen::Vector4d B;
};

CartLinearization linearize_cart(double b);

/// A + B·k for the convention u = k·s.
Eigen::Matrix4d closed_loop_matrix(const CartLinearization& lin, const LinearGains& k);

/// Single-input pole placement (Ackermann). Complex poles must come in
/// conjugate pairs (ComplexPolesNotConjugate); NotControllable if the
/// controllability matrix is numerically singular.
LinearGains pole_place(double b, std::span<const std::complex<double>> poles);

/// Closed-loop eigenvalues sorted by (real, imag).
std::vector<std::complex<double>> closed_loop_eigenvalues(double b, const LinearGains& k);

/// Largest distance between each requested pole and its nearest unused
/// achieved eigenvalue.
double pole_mismatch(std::span<const std::complex<double>> requested,
                     std::span<const std::complex<double>> achieved);

}  // namespace matchkit
