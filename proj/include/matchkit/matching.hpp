#pragma once

// The matching machinery: the control force that makes a plant reproduce a
// model system, the residuals of the matching equations, the linear PDEs for
// λ, ĝ and V̂, and the rank-one characteristics solver for the cart.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "matchkit/geometry.hpp"

namespace matchkit {

/// (g, V, c): metric, potential and velocity-dependent force.
struct MechanicalSystem {
  MetricField metric;
  ScalarField potential;
  VelocityMap dissipation;
};

/// Plant (g, V, c), model (ĝ, V̂, ĉ) and the g-orthogonal projection P onto
/// the unactuated directions.
struct SystemPair {
  MechanicalSystem plant;
  MechanicalSystem model;
  ProjectionField projection;

  /// Throws InvalidParameters if dimensions differ or c, ĉ are not odd.
  void validate() const;
};

/// f = ∇_v v − ∇̂_v v + grad V − grad̂ V̂ + c(v) − ĉ(v).
Vec control_force(const SystemPair& sys, const Vec& q, const Vec& v);

struct MatchingResiduals {
  Vec quad;  ///< P(∇_v v − ∇̂_v v)
  Vec pot;   ///< P(grad V − grad̂ V̂)
  Vec diss;  ///< P(c(v) − ĉ(v))
};

MatchingResiduals matching_residuals(const SystemPair& sys, const Vec& q, const Vec& v);

/// λ restricted to Im P: the generator PX and its image λPX.
struct LambdaSection {
  VectorField base;   ///< PX
  VectorField image;  ///< λPX
};

/// g(∇_Z λPX, PX) − g(λPX, ∇_Z PX) for Z = ∂/∂q^direction.
double lambda_residual(const SystemPair& sys, const LambdaSection& lam, const Vec& q,
                       int direction);

/// λPX ĝ(Z,Z) + 2ĝ([Z, λPX], Z) − 2 Z g(PX, Z) + 2 g(PX, ∇_Z Z) for
/// Z = ∂/∂q^direction. Needs analytic or finite-difference partials of ĝ.
double ghat_residual(const SystemPair& sys, const LambdaSection& lam, const Vec& q,
                     int direction);

/// dV̂(λPX) − dV(PX).
double vhat_residual(const SystemPair& sys, const LambdaSection& lam, const Vec& q);

/// λ = ĝ⁻¹ g.
Mat extend_lambda(const MetricField& ghat, const MetricField& g, const Vec& q);

/// A cart section λ(∂/∂θ) = σ(θ)∂/∂θ + μ(θ)∂/∂x with both components and
/// their θ-derivatives. Only θ-dependence is supported: the λ-equation for
/// the cart metric forces ∂μ/∂x = 0 away from sin θ = 0.
struct CartSection {
  std::function<double(double)> sigma;
  std::function<double(double)> dsigma;
  std::function<double(double)> mu;
  std::function<double(double)> dmu;
  bool constant_sigma = false;

  /// σ ≡ σ₀, μ = μ₀ cos θ.
  static CartSection constant(double sigma0, double mu0);

  /// The section as a vector field on the (θ, x) chart, with PX = ∂/∂θ.
  LambdaSection lambda_section() const;
};

/// General solution of the cart λ-equation:
///   μ(θ) = μ₀ cos θ − (1/b) cos θ ∫₀^θ σ′(s) sec² s ds.
/// `dsigma` may be empty (central differences are used). The integral is
/// evaluated by adaptive Simpson to 1e-10; QuadratureFailure on failure.
CartSection lambda_general_cart(std::function<double(double)> sigma,
                                std::function<double(double)> dsigma, double mu0,
                                double b);

/// Initial data on Σ = {θ = 0}: ĝ₁₁(0, x) = h(x), V̂(0, x) = w(x).
struct CharacteristicData {
  CartSection section;
  std::function<double(double)> h;
  std::function<double(double)> w;
  /// Characteristics must stay strictly inside |θ| < theta_limit.
  double theta_limit = 1.5;
  /// Flow-time RK4 step.
  double dt = 1e-3;
};

struct CharacteristicGrid {
  double theta_lo, theta_hi;
  int theta_count;
  double x_lo, x_hi;
  int x_count;

  double theta(int i) const;
  double x(int j) const;
  std::size_t size() const {
    return static_cast<std::size_t>(theta_count) * static_cast<std::size_t>(x_count);
  }
};

/// Solved fields, row-major with index i * x_count + j for (θ_i, x_j).
struct CharacteristicSolution {
  CharacteristicGrid grid;
  std::vector<double> ghat11, ghat12, ghat22, vhat;
  std::vector<double> sigma, mu;  ///< λPX components per cell
  /// max |u(Δt) − u(2Δt)| / 15 over ĝ₁₁ and V̂.
  double richardson_estimate = 0.0;

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * grid.x_count + static_cast<std::size_t>(j);
  }
};

/// Propagates ĝ₁₁ and V̂ from Σ along the λPX flow of the cart with coupling
/// b, then completes ĝ₁₂, ĝ₂₂ from ĝλ(∂/∂θ) = g(∂/∂θ, ·). Cells are solved
/// in parallel; results do not depend on the thread count.
CharacteristicSolution solve_characteristics(const CharacteristicData& data, double b,
                                             const CharacteristicGrid& grid);

/// Single-threaded reference for solve_characteristics.
CharacteristicSolution solve_characteristics_serial(const CharacteristicData& data,
                                                    double b,
                                                    const CharacteristicGrid& grid);

/// CSV with header `theta,x,ghat11,ghat12,ghat22,vhat`.
void write_characteristics_csv(std::ostream& out, const CharacteristicSolution& sol);

}  // namespace matchkit
