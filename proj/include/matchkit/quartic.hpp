#pragma once

// A two-degree-of-freedom system whose linearization at the origin cannot be
// stabilized: flat metric g = dx² + dy², V = −(3/2)x⁴ + 45x²y² + 32xy³,
// force only in y. The matching controller uses the flat model metric
// ĝ = [[2, −1], [−1, 1]], V̂ = (x² − 3xy)² + (x² − 4xy − 2y²)² and
// ĉ = (ẏ − ẋ) ∂/∂y.

#include <Eigen/Dense>

#include "matchkit/matching.hpp"

namespace matchkit {

struct QuarticState {
  double x = 0.0;
  double y = 0.0;
  double x_dot = 0.0;
  double y_dot = 0.0;
};

double potential_v(double x, double y);
Eigen::Vector2d potential_v_gradient(double x, double y);

double vhat_quartic(double x, double y);
Eigen::Vector2d vhat_quartic_gradient(double x, double y);

Eigen::Matrix2d quartic_ghat();

/// u = ∂V/∂y − (V̂_x + 2V̂_y) − (ẏ − ẋ).
double control_u_quartic(const QuarticState& s);

/// ẍ = 6x³ − 90xy² − 32y³,  ÿ = −90x²y − 96xy² + u.
QuarticState quartic_dynamics(const QuarticState& s, double u);

/// Ĥ = ½ĝ(v, v) + V̂ and its rate −(ẏ − ẋ)² along the controlled flow.
double hhat_quartic(const QuarticState& s);
double hhat_quartic_rate(const QuarticState& s);

/// 1/(√3 ε).
double blowup_time(double eps);
/// x = (1/ε − √3 t)⁻¹, y = 0. Throws PastBlowup when t ≥ blowup_time(eps).
QuarticState blowup_solution(double eps, double t);

/// Rank of [B, AB, A²B, A³B] for the origin linearization ẍ = 0, ÿ = u.
int linearized_controllability_rank();

/// Plant, model and P = dx ⊗ ∂/∂x (the unactuated direction) as geometric
/// objects, with λPX = ∂/∂x + ∂/∂y as the matching section.
SystemPair quartic_system_pair();
LambdaSection quartic_lambda_section();

}  // namespace matchkit
