#pragma once

// The inverted-pendulum cart in scaled coordinates, ordered (θ, x):
//   g = dθ² + 2b cos θ dθ dx + dx²,  V = cos θ,  θ = 0 upright.
// The closed-form matching controller family lives here along with its
// model metric ĝ, model potential V̂ and controlled energy Ĥ.

#include <string>

#include <Eigen/Dense>

#include "matchkit/matching.hpp"

namespace matchkit {

struct PhysicalCart {
  double M;       ///< base mass [kg]
  double m;       ///< pendulum mass [kg]
  double ell;     ///< hinge to centre of mass [m]
  double I;       ///< moment of inertia about the centre of mass [kg m²]
  double g_grav;  ///< [m/s²]

  /// The lab cart used for the published comparison.
  static PhysicalCart lab();
  void validate() const;
};

/// Units that turn the physical cart into the scaled one: position is
/// measured in `length`, time in `time`, energy in `energy`.
struct CartScales {
  double length;
  double time;
  double energy;
};

/// b = mℓ (M+m)^(−1/2) (mℓ² + I)^(−1/2); InvalidParameters unless b ∈ (0, 1).
double nondimensionalize(const PhysicalCart& p);
CartScales cart_scales(const PhysicalCart& p);

/// Named strictly positive function Φ(θ, x). Registry forms:
///   `const:c`        Φ = c
///   `poly:a,b,c`     Φ = a + b θ² + c x²   (a > 0, b ≥ 0, c ≥ 0)
class PhiFunction {
 public:
  PhiFunction() = default;
  static PhiFunction parse(const std::string& spec);
  static PhiFunction constant(double c);

  double operator()(double theta, double x) const {
    return a_ + b_ * theta * theta + c_ * x * x;
  }
  /// Minimum over the chart.
  double lower_bound() const { return a_; }
  const std::string& name() const { return name_; }

 private:
  double a_ = 1.0, b_ = 0.0, c_ = 0.0;
  std::string name_ = "const:1";
};

struct CartpoleController {
  double b = 0.188;
  double sigma0 = -0.05;
  double mu0 = 10.0;
  double r = 1000.0;
  double w1 = 1.5;
  PhiFunction phi;

  /// σ₀ = −.05, μ₀ = 10, r = 1000, w₁ = 1.5, Φ = 1 at the given b.
  static CartpoleController paper_defaults(double b = 0.188);

  /// Throws InvalidParameters unless b ∈ (0, 1), the stability conditions
  /// hold and Φ > 0. `allow_conservative` admits Φ ≡ 0 (ĉ ≡ 0).
  void validate(bool allow_conservative = false) const;
};

struct ValidityReport {
  bool ok = false;
  /// Right side of cos²θ > (σ₀²r + bμ₀)/(−σ₀bμ₀r).
  double cos2_bound = 0.0;
  /// arccos √cos2_bound; 0 when the cone is empty.
  double theta_max = 0.0;
};

ValidityReport validity(const CartpoleController& ctrl);

struct CartState {
  double theta = 0.0;
  double x = 0.0;
  double theta_dot = 0.0;
  double x_dot = 0.0;
};

/// det g = 1 − b² cos² θ.
double det_g(double b, double theta);
Eigen::Matrix2d g_cart(double b, double theta);

Eigen::Matrix2d ghat_cart(const CartpoleController& ctrl, double theta);
/// b/(σ₀μ₀) + (br/μ₀) cos²θ + σ₀r/μ₀².
double det_ghat(const CartpoleController& ctrl, double theta);

/// (1/σ₀)(cos θ − 1) + ½w₁(x − (μ₀/σ₀) sin θ)².
double vhat_cart(const CartpoleController& ctrl, double theta, double x);
Eigen::Vector2d vhat_cart_differential(const CartpoleController& ctrl, double theta,
                                       double x);
Eigen::Matrix2d vhat_hessian_origin(const CartpoleController& ctrl);

/// Model dissipation ĉ(v) = K (b cos θ ∂/∂θ − ∂/∂x) with
/// K = Φ(θ, x)(μ₀ cos θ θ̇ − σ₀ ẋ).
Eigen::Vector2d chat_cart(const CartpoleController& ctrl, const CartState& s);

/// The closed-form control law
///   u = (b + r det g/(μ₀ det ĝ))(cos θ sin θ − sin θ θ̇²)
///     − (w₁ det g/(σ₀ det ĝ))(x − (μ₀/σ₀) sin θ)
///     + det g Φ(θ, x)(μ₀ cos θ θ̇ − σ₀ ẋ).
/// Throws DegenerateModelMetric when |det ĝ| < 1e-12.
double control_u(const CartpoleController& ctrl, const CartState& s);

/// Ĥ = ½ĝ(v, v) + V̂.
double hhat(const CartpoleController& ctrl, const CartState& s);
/// −det ĝ Φ (μ₀ cos θ θ̇ − σ₀ ẋ)².
double dhhat_dt_formula(const CartpoleController& ctrl, const CartState& s);

/// Time derivative of the state under
///   θ̈ + b cos θ ẍ − sin θ = 0,   b cos θ θ̈ + ẍ − b sin θ θ̇² = u.
/// Components are (θ̇, ẋ, θ̈, ẍ) in the CartState slots.
CartState cart_dynamics(double b, const CartState& s, double u);
CartState closed_loop(const CartpoleController& ctrl, const CartState& s);

/// Open-loop energy ½g(v, v) + cos θ.
double cart_energy(double b, const CartState& s);

/// The plant, the closed-form model and P = (b cos θ dx + dθ) ⊗ ∂/∂θ as
/// generic geometric objects (analytic partials throughout). The model
/// metric's valid region is the cone cos²θ > cos2_bound.
SystemPair cart_system_pair(const CartpoleController& ctrl);

/// The cart plant metric alone.
MetricField cart_metric(double b);

}  // namespace matchkit
