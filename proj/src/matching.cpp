#include "matchkit/matching.hpp"

#include <cmath>

#include "matchkit/errors.hpp"
#include "matchkit/quadrature.hpp"

namespace matchkit {

void SystemPair::validate() const {
  const int n = plant.metric.dim();
  if (model.metric.dim() != n || projection.metric().dim() != n)
    throw InvalidParameters("plant, model and projection dimensions differ");
  if (!plant.dissipation.odd() || !model.dissipation.odd())
    throw InvalidParameters("dissipation maps must be odd in velocity");
}

Vec control_force(const SystemPair& sys, const Vec& q, const Vec& v) {
  return covariant_acceleration(sys.plant.metric, q, v) -
         covariant_acceleration(sys.model.metric, q, v) +
         gradient(sys.plant.metric, sys.plant.potential, q) -
         gradient(sys.model.metric, sys.model.potential, q) +
         sys.plant.dissipation(q, v) - sys.model.dissipation(q, v);
}

MatchingResiduals matching_residuals(const SystemPair& sys, const Vec& q, const Vec& v) {
  const Mat p = sys.projection.matrix(q);
  MatchingResiduals r;
  r.quad = p * (covariant_acceleration(sys.plant.metric, q, v) -
                covariant_acceleration(sys.model.metric, q, v));
  r.pot = p * (gradient(sys.plant.metric, sys.plant.potential, q) -
               gradient(sys.model.metric, sys.model.potential, q));
  r.diss = p * (sys.plant.dissipation(q, v) - sys.model.dissipation(q, v));
  return r;
}

double lambda_residual(const SystemPair& sys, const LambdaSection& lam, const Vec& q,
                       int direction) {
  const MetricField& g = sys.plant.metric;
  const Vec px = lam.base(q);
  const Vec lpx = lam.image(q);
  const Vec d_lpx = covariant_derivative(g, lam.image, q, direction);
  const Vec d_px = covariant_derivative(g, lam.base, q, direction);
  return g.inner(q, d_lpx, px) - g.inner(q, lpx, d_px);
}

double ghat_residual(const SystemPair& sys, const LambdaSection& lam, const Vec& q,
                     int direction) {
  const MetricField& g = sys.plant.metric;
  const MetricField& ghat = sys.model.metric;
  const int l = direction;
  const int n = g.dim();

  const Vec w = lam.image(q);
  const Vec px = lam.base(q);
  const MetricPartials dghat = ghat.partials(q);
  const MetricPartials dg = g.partials(q);
  const Mat gq = g.components(q);

  // λPX applied to ĝ(Z, Z).
  double lhs = 0.0;
  for (int m = 0; m < n; ++m) lhs += w[m] * dghat[m](l, l);
  // [∂_l, W] = ∂_l W for a coordinate field.
  const Vec bracket = lam.image.jacobian(q).col(l);
  lhs += 2.0 * ghat.components(q).row(l).dot(bracket);

  // Z g(PX, Z) = ∂_l(g_lk PXᵏ).
  const double z_g = dg[l].row(l).dot(px) + gq.row(l).dot(lam.base.jacobian(q).col(l));
  const Vec zz = christoffel(g, q).contract(Vec::Unit(n, l), Vec::Unit(n, l));
  const double rhs = 2.0 * z_g - 2.0 * px.dot(gq * zz);
  return lhs - rhs;
}

double vhat_residual(const SystemPair& sys, const LambdaSection& lam, const Vec& q) {
  return sys.model.potential.differential(q).dot(lam.image(q)) -
         sys.plant.potential.differential(q).dot(lam.base(q));
}

Mat extend_lambda(const MetricField& ghat, const MetricField& g, const Vec& q) {
  return ghat.solve(q, g.components(q));
}

CartSection CartSection::constant(double sigma0, double mu0) {
  CartSection s;
  s.sigma = [sigma0](double) { return sigma0; };
  s.dsigma = [](double) { return 0.0; };
  s.mu = [mu0](double th) { return mu0 * std::cos(th); };
  s.dmu = [mu0](double th) { return -mu0 * std::sin(th); };
  s.constant_sigma = true;
  return s;
}

LambdaSection CartSection::lambda_section() const {
  auto sig = sigma, dsig = dsigma, m = mu, dm = dmu;
  VectorField image(
      [sig, m](const Vec& q) {
        Vec w(2);
        w << sig(q[0]), m(q[0]);
        return w;
      },
      [dsig, dm](const Vec& q) {
        Mat j = Mat::Zero(2, 2);
        j(0, 0) = dsig(q[0]);
        j(1, 0) = dm(q[0]);
        return j;
      });
  return LambdaSection{VectorField::constant(Vec::Unit(2, 0)), std::move(image)};
}

CartSection lambda_general_cart(std::function<double(double)> sigma,
                                std::function<double(double)> dsigma, double mu0,
                                double b) {
  if (!(b > 0.0)) throw InvalidParameters("b must be positive");
  if (!dsigma) {
    dsigma = [sigma](double th) {
      const double h = kFiniteDifferenceStep;
      return (sigma(th + h) - sigma(th - h)) / (2.0 * h);
    };
  }
  auto integral = [dsigma](double th) {
    return adaptive_simpson(
        [dsigma](double s) {
          const double cs = std::cos(s);
          return dsigma(s) / (cs * cs);
        },
        0.0, th);
  };

  CartSection s;
  s.sigma = sigma;
  s.dsigma = dsigma;
  s.mu = [integral, mu0, b](double th) {
    return std::cos(th) * (mu0 - integral(th) / b);
  };
  // d/dθ of the above: −sin θ (μ₀ − I/b) − σ′(θ) sec θ / b.
  s.dmu = [integral, dsigma, mu0, b](double th) {
    return -std::sin(th) * (mu0 - integral(th) / b) - dsigma(th) / (b * std::cos(th));
  };
  return s;
}

}  // namespace matchkit
