#include "matchkit/geometry.hpp"

#include <cmath>
#include <sstream>

#include "matchkit/errors.hpp"

namespace matchkit {

MetricField::MetricField(int dim, Components components, PartialsFn partials,
                         double det_margin, Region region)
    : dim_(dim),
      components_(std::move(components)),
      partials_(std::move(partials)),
      det_margin_(det_margin),
      region_(std::move(region)) {
  if (dim_ <= 0) throw InvalidParameters("metric dimension must be positive");
  if (!components_) throw InvalidParameters("metric components are required");
}

Mat MetricField::components(const Vec& q) const { return components_(q); }

MetricPartials MetricField::partials(const Vec& q) const {
  if (partials_) return partials_(q);
  return finite_difference_partials(q);
}

MetricPartials MetricField::finite_difference_partials(const Vec& q) const {
  const double h = kFiniteDifferenceStep;
  MetricPartials out;
  out.reserve(dim_);
  for (int l = 0; l < dim_; ++l) {
    Vec qp = q, qm = q;
    qp[l] += h;
    qm[l] -= h;
    out.push_back((components_(qp) - components_(qm)) / (2.0 * h));
  }
  return out;
}

bool MetricField::in_region(const Vec& q) const { return !region_ || region_(q); }

void MetricField::check_invertible(const Vec& q, const Mat& g) const {
  const double det = g.determinant();
  if (!in_region(q) || !(std::abs(det) >= det_margin_)) {
    std::ostringstream msg;
    msg << "metric not invertible at q = [" << q.transpose() << "], det = " << det;
    throw SingularMetric(msg.str());
  }
}

Mat MetricField::inverse(const Vec& q) const {
  const Mat g = components_(q);
  check_invertible(q, g);
  return g.inverse();
}

Vec MetricField::solve(const Vec& q, const Vec& rhs) const {
  const Mat g = components_(q);
  check_invertible(q, g);
  return g.partialPivLu().solve(rhs);
}

Mat MetricField::solve(const Vec& q, const Mat& rhs) const {
  const Mat g = components_(q);
  check_invertible(q, g);
  return g.partialPivLu().solve(rhs);
}

double MetricField::inner(const Vec& q, const Vec& x, const Vec& y) const {
  return x.dot(components_(q) * y);
}

ScalarField::ScalarField(Value value, Differential differential)
    : value_(std::move(value)), differential_(std::move(differential)) {
  if (!value_) throw InvalidParameters("scalar field value is required");
}

Vec ScalarField::differential(const Vec& q) const {
  if (differential_) return differential_(q);
  return finite_difference_differential(q);
}

Vec ScalarField::finite_difference_differential(const Vec& q) const {
  const double h = kFiniteDifferenceStep;
  Vec out(q.size());
  for (Eigen::Index l = 0; l < q.size(); ++l) {
    Vec qp = q, qm = q;
    qp[l] += h;
    qm[l] -= h;
    out[l] = (value_(qp) - value_(qm)) / (2.0 * h);
  }
  return out;
}

VelocityMap::VelocityMap(Fn fn, bool odd) : fn_(std::move(fn)), odd_(odd) {}

VelocityMap VelocityMap::zero(int dim) {
  return VelocityMap([dim](const Vec&, const Vec&) { return Vec::Zero(dim).eval(); },
                     true);
}

VectorField::VectorField(Value value, Jacobian jacobian)
    : value_(std::move(value)), jacobian_(std::move(jacobian)) {}

VectorField VectorField::constant(const Vec& w) {
  const auto n = w.size();
  return VectorField([w](const Vec&) { return w; },
                     [n](const Vec&) { return Mat::Zero(n, n).eval(); });
}

Mat VectorField::jacobian(const Vec& q) const {
  if (jacobian_) return jacobian_(q);
  const double h = kFiniteDifferenceStep;
  const Vec w0 = value_(q);
  Mat out(w0.size(), q.size());
  for (Eigen::Index l = 0; l < q.size(); ++l) {
    Vec qp = q, qm = q;
    qp[l] += h;
    qm[l] -= h;
    out.col(l) = (value_(qp) - value_(qm)) / (2.0 * h);
  }
  return out;
}

ProjectionField::ProjectionField(MatrixFn matrix, MetricField metric)
    : matrix_(std::move(matrix)), metric_(std::move(metric)) {}

double ProjectionField::idempotency_residual(const Vec& q) const {
  const Mat p = matrix_(q);
  return (p * p - p).cwiseAbs().maxCoeff();
}

double ProjectionField::self_adjoint_residual(const Vec& q, const Vec& x,
                                              const Vec& y) const {
  const Mat p = matrix_(q);
  return std::abs(metric_.inner(q, p * x, y) - metric_.inner(q, x, p * y));
}

Christoffel::Christoffel(int dim)
    : dim_(dim), data_(static_cast<std::size_t>(dim) * dim * dim, 0.0) {}

Vec Christoffel::contract(const Vec& x, const Vec& y) const {
  Vec out = Vec::Zero(dim_);
  for (int k = 0; k < dim_; ++k)
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) out[k] += (*this)(k, i, j) * x[i] * y[j];
  return out;
}

double Christoffel::lower_symmetry_residual() const {
  double worst = 0.0;
  for (int k = 0; k < dim_; ++k)
    for (int i = 0; i < dim_; ++i)
      for (int j = i + 1; j < dim_; ++j)
        worst = std::max(worst, std::abs((*this)(k, i, j) - (*this)(k, j, i)));
  return worst;
}

Christoffel christoffel(const MetricField& metric, const Vec& q) {
  const int n = metric.dim();
  const Mat ginv = metric.inverse(q);
  const MetricPartials dg = metric.partials(q);

  // First kind: Γ_{l,ij} = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij).
  std::vector<double> lowered(static_cast<std::size_t>(n) * n * n);
  auto low = [&](int l, int i, int j) -> double& {
    return lowered[(static_cast<std::size_t>(l) * n + i) * n + j];
  };
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double v = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        low(l, i, j) = v;
        low(l, j, i) = v;
      }

  Christoffel gamma(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += ginv(k, l) * low(l, i, j);
        gamma(k, i, j) = s;
        gamma(k, j, i) = s;
      }
  return gamma;
}

Vec gradient(const MetricField& metric, const ScalarField& field, const Vec& q) {
  return metric.solve(q, field.differential(q));
}

Vec covariant_acceleration(const MetricField& metric, const Vec& q, const Vec& v) {
  return christoffel(metric, q).contract(v, v);
}

Vec covariant_derivative(const MetricField& metric, const VectorField& field,
                         const Vec& q, int direction) {
  const int n = metric.dim();
  const Christoffel gamma = christoffel(metric, q);
  const Vec w = field(q);
  Vec out = field.jacobian(q).col(direction);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) out[k] += gamma(k, direction, j) * w[j];
  return out;
}

ConnectionReport verify_connection_axioms(const MetricField& metric, const Vec& q,
                                          const Vec& x, const Vec& y, const Vec& z) {
  return verify_connection_axioms(metric, christoffel(metric, q), q, x, y, z);
}

ConnectionReport verify_connection_axioms(const MetricField& metric,
                                          const Christoffel& gamma, const Vec& q,
                                          const Vec& x, const Vec& y, const Vec& z) {
  const double h = kFiniteDifferenceStep;
  const double directional =
      (metric.inner(q + h * x, y, z) - metric.inner(q - h * x, y, z)) / (2.0 * h);
  const double connection =
      metric.inner(q, gamma.contract(x, y), z) + metric.inner(q, y, gamma.contract(x, z));

  ConnectionReport report;
  report.compatibility = std::abs(directional - connection);
  report.torsion = (gamma.contract(x, y) - gamma.contract(y, x)).cwiseAbs().maxCoeff();
  return report;
}

}  // namespace matchkit
