#pragma once

// Numerical Riemannian geometry on a single n-dimensional coordinate chart.
//
// Index conventions: partials[l](i, j) = ∂_l g_ij, Christoffel(k, i, j) = Γᵏ_ij,
// and a vector-field Jacobian J(k, l) = ∂_l Wᵏ.

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace matchkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Central-difference step used wherever analytic derivatives are absent.
inline constexpr double kFiniteDifferenceStep = 1e-5;

/// One matrix per coordinate direction: partials[l](i, j) = ∂_l g_ij.
using MetricPartials = std::vector<Mat>;

/// Symmetric positive-definite metric with optional analytic partials.
class MetricField {
 public:
  using Components = std::function<Mat(const Vec&)>;
  using PartialsFn = std::function<MetricPartials(const Vec&)>;
  using Region = std::function<bool(const Vec&)>;

  /// `partials` may be empty; central differences with kFiniteDifferenceStep
  /// are used instead. `region` defaults to the whole chart.
  MetricField(int dim, Components components, PartialsFn partials = {},
              double det_margin = 1e-9, Region region = {});

  int dim() const { return dim_; }
  double det_margin() const { return det_margin_; }
  bool has_analytic_partials() const { return static_cast<bool>(partials_); }

  Mat components(const Vec& q) const;
  MetricPartials partials(const Vec& q) const;
  MetricPartials finite_difference_partials(const Vec& q) const;

  /// Inverse components; throws SingularMetric when |det| < det_margin or q
  /// lies outside the declared region.
  Mat inverse(const Vec& q) const;
  bool in_region(const Vec& q) const;

  double inner(const Vec& q, const Vec& x, const Vec& y) const;

  /// Solves g(q) w = rhs with the same validity checks as inverse().
  Vec solve(const Vec& q, const Vec& rhs) const;
  Mat solve(const Vec& q, const Mat& rhs) const;

 private:
  void check_invertible(const Vec& q, const Mat& g) const;

  int dim_;
  Components components_;
  PartialsFn partials_;
  double det_margin_;
  Region region_;
};

/// Scalar potential with optional analytic differential.
class ScalarField {
 public:
  using Value = std::function<double(const Vec&)>;
  using Differential = std::function<Vec(const Vec&)>;

  explicit ScalarField(Value value, Differential differential = {});

  double value(const Vec& q) const { return value_(q); }
  /// Components ∂V/∂xⁱ (a covector).
  Vec differential(const Vec& q) const;
  Vec finite_difference_differential(const Vec& q) const;
  bool has_analytic_differential() const {
    return static_cast<bool>(differential_);
  }

 private:
  Value value_;
  Differential differential_;
};

/// Fiber-preserving map (q, q̇) ↦ tangent vector.
class VelocityMap {
 public:
  using Fn = std::function<Vec(const Vec&, const Vec&)>;

  VelocityMap(Fn fn, bool odd);
  static VelocityMap zero(int dim);

  Vec operator()(const Vec& q, const Vec& v) const { return fn_(q, v); }
  bool odd() const { return odd_; }

 private:
  Fn fn_;
  bool odd_;
};

/// Vector field on the chart with optional analytic Jacobian.
class VectorField {
 public:
  using Value = std::function<Vec(const Vec&)>;
  using Jacobian = std::function<Mat(const Vec&)>;

  explicit VectorField(Value value, Jacobian jacobian = {});
  static VectorField constant(const Vec& w);

  Vec operator()(const Vec& q) const { return value_(q); }
  /// J(k, l) = ∂_l Wᵏ.
  Mat jacobian(const Vec& q) const;

 private:
  Value value_;
  Jacobian jacobian_;
};

/// g-orthogonal projection P, stored as its matrix in chart coordinates.
class ProjectionField {
 public:
  using MatrixFn = std::function<Mat(const Vec&)>;

  ProjectionField(MatrixFn matrix, MetricField metric);

  Mat matrix(const Vec& q) const { return matrix_(q); }
  Vec apply(const Vec& q, const Vec& x) const { return matrix_(q) * x; }
  const MetricField& metric() const { return metric_; }

  /// max |P² − P|.
  double idempotency_residual(const Vec& q) const;
  /// |g(PX, Y) − g(X, PY)|.
  double self_adjoint_residual(const Vec& q, const Vec& x, const Vec& y) const;

 private:
  MatrixFn matrix_;
  MetricField metric_;
};

/// Γᵏ_ij at one chart point.
class Christoffel {
 public:
  explicit Christoffel(int dim);

  int dim() const { return dim_; }
  double& operator()(int k, int i, int j) { return data_[index(k, i, j)]; }
  double operator()(int k, int i, int j) const { return data_[index(k, i, j)]; }

  /// Γᵏ_ij xⁱ yʲ.
  Vec contract(const Vec& x, const Vec& y) const;
  /// max |Γᵏ_ij − Γᵏ_ji|.
  double lower_symmetry_residual() const;

 private:
  std::size_t index(int k, int i, int j) const {
    return (static_cast<std::size_t>(k) * dim_ + i) * dim_ + j;
  }

  int dim_;
  std::vector<double> data_;
};

/// Γᵏ_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij).
Christoffel christoffel(const MetricField& metric, const Vec& q);

/// grad V = g⁻¹ dV.
Vec gradient(const MetricField& metric, const ScalarField& field, const Vec& q);

/// The quadratic term Γᵏ_ij vⁱ vʲ of the geodesic equation.
Vec covariant_acceleration(const MetricField& metric, const Vec& q, const Vec& v);

/// ∇_{∂_l} W for coordinate direction l.
Vec covariant_derivative(const MetricField& metric, const VectorField& field,
                         const Vec& q, int direction);

struct ConnectionReport {
  /// |X g(Y,Z) − g(∇_X Y, Z) − g(Y, ∇_X Z)|, with X g(Y,Z) by central
  /// differences of the metric components.
  double compatibility = 0.0;
  /// |∇_X Y − ∇_Y X − [X, Y]|_∞; [X, Y] = 0 for constant coordinate fields.
  double torsion = 0.0;
};

/// Checks metric compatibility and torsion-freeness for constant coordinate
/// vector fields X, Y, Z.
ConnectionReport verify_connection_axioms(const MetricField& metric, const Vec& q,
                                          const Vec& x, const Vec& y, const Vec& z);

/// Same checks against externally supplied connection coefficients.
ConnectionReport verify_connection_axioms(const MetricField& metric,
                                          const Christoffel& gamma, const Vec& q,
                                          const Vec& x, const Vec& y, const Vec& z);

}  // namespace matchkit
