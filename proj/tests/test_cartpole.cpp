#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "matchkit/cart_params.hpp"
#include "matchkit/cartpole.hpp"
#include "matchkit/errors.hpp"

namespace matchkit {
namespace {

const CartpoleController kPaper = CartpoleController::paper_defaults();

TEST(Nondimensionalize, LabCart) {
  const PhysicalCart p = PhysicalCart::lab();
  const double oracle = p.m * p.ell / std::sqrt((p.M + p.m) * (p.m * p.ell * p.ell + p.I));
  EXPECT_NEAR(nondimensionalize(p), oracle, 1e-15);
  EXPECT_NEAR(nondimensionalize(p), 0.188, 5e-4);
}

TEST(Nondimensionalize, DecreasingInInertia) {
  PhysicalCart p = PhysicalCart::lab();
  double previous = nondimensionalize(p);
  for (double inertia : {1.0, 10.0, 1e3, 1e6}) {
    p.I = inertia;
    const double b = nondimensionalize(p);
    EXPECT_LT(b, previous);
    previous = b;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(Nondimensionalize, PointMassWithoutBaseIsRejected) {
  PhysicalCart p = PhysicalCart::lab();
  p.M = 0.0;
  p.I = 0.0;
  EXPECT_THROW(nondimensionalize(p), InvalidParameters);
}

TEST(Nondimensionalize, ScalesAreConsistent) {
  const PhysicalCart p = PhysicalCart::lab();
  const CartScales s = cart_scales(p);
  // Energy/(mass·length²/time²) must be dimensionless and equal (mgℓ)·T²/((M+m)L²).
  const double inertia = p.m * p.ell * p.ell + p.I;
  EXPECT_NEAR(s.energy * s.time * s.time / inertia, 1.0, 1e-12);
  EXPECT_NEAR((p.M + p.m) * s.length * s.length / inertia, 1.0, 1e-12);
}

TEST(Validity, PaperConstants) {
  const ValidityReport v = validity(kPaper);
  EXPECT_TRUE(v.ok);
  EXPECT_NEAR(v.cos2_bound, (0.05 * 0.05 * 1000 + 0.188 * 10) / (0.05 * 0.188 * 10 * 1000), 1e-12);
  EXPECT_NEAR(v.cos2_bound, 0.0466, 1e-4);
  EXPECT_NEAR(v.theta_max, 1.353, 1e-3);
}

TEST(Validity, PositiveSigmaRejected) {
  CartpoleController c = kPaper;
  c.sigma0 = 0.05;
  EXPECT_FALSE(validity(c).ok);
  EXPECT_THROW(c.validate(), InvalidParameters);
}

TEST(Validity, SmallRRejected) {
  CartpoleController c = kPaper;
  c.r = 1e-9;
  EXPECT_FALSE(validity(c).ok);
  c.r = 0.0;
  EXPECT_FALSE(validity(c).ok);
}

TEST(Validity, PhiMustBePositiveUnlessConservative) {
  CartpoleController c = kPaper;
  c.phi = PhiFunction::constant(0.0);
  EXPECT_THROW(c.validate(), InvalidParameters);
  EXPECT_NO_THROW(c.validate(true));
}

TEST(ModelMetric, DeterminantValues) {
  EXPECT_NEAR(det_ghat(kPaper, 0.0), -0.376 + 18.8 - 0.5, 1e-12);
  EXPECT_NEAR(det_ghat(kPaper, M_PI / 2), -0.876, 1e-12);
  for (double th : {0.0, 0.4, 1.0, 2.0})
    EXPECT_NEAR(det_ghat(kPaper, th), ghat_cart(kPaper, th).determinant(), 1e-9);
}

TEST(ModelMetric, GhatLambdaEqualsGUpright) {
  const Eigen::Matrix2d g = ghat_cart(kPaper, 0.0);
  EXPECT_NEAR(kPaper.sigma0 * g(0, 0) + kPaper.mu0 * g(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(kPaper.sigma0 * g(0, 1) + kPaper.mu0 * g(1, 1), kPaper.b, 1e-12);
}

TEST(ModelMetric, PositiveDefiniteExactlyInsideCone) {
  const double bound = validity(kPaper).cos2_bound;
  for (int n = 0; n <= 2000; ++n) {
    const double th = -M_PI + 2 * M_PI * n / 2000.0;
    const double c2 = std::cos(th) * std::cos(th);
    if (std::abs(c2 - bound) < 1e-6) continue;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(ghat_cart(kPaper, th));
    EXPECT_EQ(es.eigenvalues().minCoeff() > 0.0, c2 > bound) << "theta = " << th;
  }
}

TEST(ModelPotential, HessianAtOrigin) {
  Eigen::Matrix2d expected;
  expected << 60020, 300, 300, 1.5;
  EXPECT_LT((vhat_hessian_origin(kPaper) - expected).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(vhat_hessian_origin(kPaper).determinant(), -kPaper.w1 / kPaper.sigma0, 1e-6);
  // Independent check by second differences of vhat_cart.
  const double h = 1e-4;
  auto v = [](double th, double x) { return vhat_cart(kPaper, th, x); };
  const double vtt = (v(h, 0) - 2 * v(0, 0) + v(-h, 0)) / (h * h);
  const double vxx = (v(0, h) - 2 * v(0, 0) + v(0, -h)) / (h * h);
  const double vtx = (v(h, h) - v(h, -h) - v(-h, h) + v(-h, -h)) / (4 * h * h);
  EXPECT_NEAR(vtt, 60020, 1e-2);
  EXPECT_NEAR(vxx, 1.5, 1e-4);
  EXPECT_NEAR(vtx, 300, 1e-3);
}

TEST(ModelPotential, PositiveDefinitenessCondition) {
  CartpoleController c = kPaper;
  for (double w1 : {0.1, 1.5, 20.0})
    for (double s0 : {-0.01, -0.05, -1.0}) {
      c.w1 = w1;
      c.sigma0 = s0;
      EXPECT_GT(vhat_hessian_origin(c).determinant(), 0.0);
    }
}

TEST(ModelPotential, Periodic) {
  EXPECT_NEAR(vhat_cart(kPaper, 2 * M_PI, 0.0), 0.0, 1e-9);
  EXPECT_EQ(vhat_cart(kPaper, 0.0, 0.0), 0.0);
}

TEST(ModelPotential, DifferentialMatchesFiniteDifference) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> box(-1.3, 1.3);
  for (int n = 0; n < 50; ++n) {
    const double th = box(rng), x = box(rng), h = 1e-6;
    const Eigen::Vector2d d = vhat_cart_differential(kPaper, th, x);
    EXPECT_NEAR(d[0], (vhat_cart(kPaper, th + h, x) - vhat_cart(kPaper, th - h, x)) / (2 * h), 1e-3);
    EXPECT_NEAR(d[1], (vhat_cart(kPaper, th, x + h) - vhat_cart(kPaper, th, x - h)) / (2 * h), 1e-5);
  }
}

TEST(ControlLaw, ZeroAtOrigin) { EXPECT_EQ(control_u(kPaper, CartState{}), 0.0); }

TEST(ControlLaw, KnownValue) {
  EXPECT_NEAR(control_u(kPaper, CartState{0.0, 0.1, 0.0, 0.0}), 0.16146, 1e-4);
}

TEST(ControlLaw, UprightAtCartOriginIsPureDamping) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> box(-3.0, 3.0);
  const double det_g = 1.0 - kPaper.b * kPaper.b;
  for (int n = 0; n < 20; ++n) {
    const double td = box(rng), xd = box(rng);
    EXPECT_NEAR(control_u(kPaper, CartState{0.0, 0.0, td, xd}),
                det_g * (kPaper.mu0 * td - kPaper.sigma0 * xd), 1e-12);
  }
}

TEST(ControlLaw, DegenerateModelMetricThrows) {
  // cos²θ at which det ĝ vanishes.
  const double c2 = -(kPaper.b / (kPaper.sigma0 * kPaper.mu0) +
                      kPaper.sigma0 * kPaper.r / (kPaper.mu0 * kPaper.mu0)) /
                    (kPaper.b * kPaper.r / kPaper.mu0);
  const double th = std::acos(std::sqrt(c2));
  EXPECT_NEAR(det_ghat(kPaper, th), 0.0, 1e-12);
  EXPECT_THROW(control_u(kPaper, CartState{th, 0.0, 0.1, 0.0}), DegenerateModelMetric);
}

TEST(Energy, ZeroAtOrigin) {
  EXPECT_EQ(hhat(kPaper, CartState{}), 0.0);
  EXPECT_EQ(dhhat_dt_formula(kPaper, CartState{}), 0.0);
}

TEST(Energy, ZeroModeHasZeroRate) {
  // μ₀ cos θ θ̇ = σ₀ ẋ.
  const double th = 0.3, td = 0.2;
  const double xd = kPaper.mu0 * std::cos(th) * td / kPaper.sigma0;
  EXPECT_NEAR(dhhat_dt_formula(kPaper, CartState{th, 0.5, td, xd}), 0.0, 1e-12);
}

TEST(Energy, KnownRate) {
  EXPECT_NEAR(dhhat_dt_formula(kPaper, CartState{0.0, 0.0, 0.1, 0.0}), -17.924, 1e-2);
}

TEST(Energy, RateAgreesWithChainRule) {
  // dĤ/dt = ∂Ĥ/∂s · f(s) by finite differences of hhat along the closed loop.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> angle(-1.2, 1.2), box(-1.0, 1.0);
  for (int n = 0; n < 50; ++n) {
    const CartState s{angle(rng), box(rng), box(rng), box(rng)};
    const CartState f = closed_loop(kPaper, s);
    const double h = 1e-6;
    auto shifted = [&](double e) {
      return hhat(kPaper, CartState{s.theta + e * f.theta, s.x + e * f.x,
                                    s.theta_dot + e * f.theta_dot, s.x_dot + e * f.x_dot});
    };
    const double numeric = (shifted(h) - shifted(-h)) / (2 * h);
    EXPECT_NEAR(numeric, dhhat_dt_formula(kPaper, s),
                1e-5 * std::max(1.0, std::abs(numeric)));
  }
}

TEST(Dynamics, UprightEquilibrium) {
  const CartState d = cart_dynamics(kPaper.b, CartState{}, 0.0);
  EXPECT_EQ(d.theta + d.x + d.theta_dot + d.x_dot, 0.0);
}

TEST(Dynamics, Horizontal) {
  const CartState d = cart_dynamics(kPaper.b, CartState{M_PI / 2, 0.0, 0.0, 0.0}, 0.0);
  EXPECT_NEAR(d.theta_dot, 1.0, 1e-15);
  EXPECT_NEAR(d.x_dot, 0.0, 1e-15);
}

TEST(Dynamics, SolvesEquationsOfMotion) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  for (int n = 0; n < 50; ++n) {
    const CartState s{box(rng), box(rng), box(rng), box(rng)};
    const double u = box(rng), b = kPaper.b, c = std::cos(s.theta), sn = std::sin(s.theta);
    const CartState d = cart_dynamics(b, s, u);
    EXPECT_NEAR(d.theta_dot + b * c * d.x_dot - sn, 0.0, 1e-12);
    EXPECT_NEAR(b * c * d.theta_dot + d.x_dot - b * sn * s.theta_dot * s.theta_dot, u, 1e-12);
  }
}

TEST(Phi, Parse) {
  EXPECT_EQ(PhiFunction::parse("const:2.5")(1.0, 3.0), 2.5);
  const PhiFunction p = PhiFunction::parse("poly:1,2,3");
  EXPECT_EQ(p(1.0, 2.0), 1 + 2 + 12);
  EXPECT_EQ(p.lower_bound(), 1.0);
  for (const char* bad : {"", "const", "const:", "const:-1", "poly:1,2", "poly:0,1,1",
                          "poly:1,-1,0", "poly:1,2,3,4", "spline:1", "const:1x"})
    EXPECT_THROW(PhiFunction::parse(bad), InvalidParameters) << bad;
}

TEST(Params, DefaultsRoundTrip) {
  const CartpoleController c = controller_from_json(nlohmann::json::object());
  EXPECT_EQ(c.b, 0.188);
  EXPECT_EQ(c.sigma0, -0.05);
  const CartpoleController again = controller_from_json(controller_to_json(c));
  EXPECT_EQ(again.r, c.r);
  EXPECT_EQ(again.phi.name(), c.phi.name());
}

TEST(Params, PhysicalBlock) {
  const auto c = controller_from_json(
      nlohmann::json::parse(R"({"physical":{"M":5.02,"m":0.454,"l":0.425,"I":0.11,"g":9.81}})"));
  EXPECT_NEAR(c.b, 0.188, 5e-4);
}

TEST(Params, Rejections) {
  for (const char* bad :
       {R"({"bogus":1})", R"({"b":"x"})", R"({"b":1.5})", R"({"b":0.2,"physical":{}})",
        R"({"physical":{"M":1}})", R"({"phi":3})", R"({"sigma0":0.1})", R"([1,2])"})
    EXPECT_THROW(controller_from_json(nlohmann::json::parse(bad)), InvalidParameters) << bad;
  EXPECT_THROW(load_controller("/nonexistent/params.json"), InvalidParameters);
}

}  // namespace
}  // namespace matchkit
