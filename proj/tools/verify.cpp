#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "matchkit/cartpole.hpp"
#include "matchkit/errors.hpp"
#include "matchkit/matching.hpp"
#include "matchkit/quartic.hpp"
#include "matchkit/sim.hpp"

namespace matchkit::cli {

namespace {

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

/// Max |5-point dĤ/dt − recorded rate| and max positive numeric rate.
std::pair<double, double> rate_audit(const Trajectory& traj) {
  const auto& s = traj.samples;
  double dev = 0.0, pos = 0.0;
  for (std::size_t i = 2; i + 2 < s.size(); ++i) {
    const double d = (-s[i + 2].hhat + 8.0 * s[i + 1].hhat - 8.0 * s[i - 1].hhat + s[i - 2].hhat) /
                     (12.0 * traj.dt);
    dev = std::max(dev, std::abs(d - s[i].hhat_rate));
    pos = std::max(pos, d);
  }
  return {dev, pos};
}

}  // namespace

std::vector<Check> verify_matching(const VerifyOptions& opts) {
  const CartpoleController ctrl = CartpoleController::paper_defaults();
  const SystemPair sys = cart_system_pair(ctrl);
  const LambdaSection lam = CartSection::constant(ctrl.sigma0, ctrl.mu0).lambda_section();
  const double theta_max = validity(ctrl).theta_max;

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> angle(-0.95 * theta_max, 0.95 * theta_max);
  std::uniform_real_distribution<double> box(-2.0, 2.0);

  Check quad{"matching.quadratic", 0.0, opts.tol};
  Check pot{"matching.potential", 0.0, opts.tol};
  Check diss{"matching.dissipation", 0.0, opts.tol};
  Check law{"matching.closed_form_vs_generic_force", 0.0, 1e-6};
  Check lam_eq{"matching.lambda_equation", 0.0, opts.tol};
  Check ghat_eq{"matching.ghat_equation", 0.0, opts.tol};
  Check vhat_eq{"matching.vhat_equation", 0.0, opts.tol};
  Check extend{"matching.lambda_extension_self_adjoint", 0.0, opts.tol};
  Check symmetry{"geometry.christoffel_symmetry", 0.0, opts.tol};
  Check compat{"geometry.metric_compatibility", 0.0, 1e-6};
  Check proj{"geometry.projection_laws", 0.0, opts.tol};

  for (int n = 0; n < opts.samples; ++n) {
    Vec q(2), v(2);
    q << angle(rng), box(rng);
    v << box(rng), box(rng);
    const MatchingResiduals r = matching_residuals(sys, q, v);
    quad.max_residual = std::max(quad.max_residual, r.quad.norm());
    pot.max_residual = std::max(pot.max_residual, r.pot.norm());
    diss.max_residual = std::max(diss.max_residual, r.diss.norm());

    const Vec lowered = sys.plant.metric.components(q) * control_force(sys, q, v);
    const double u = control_u(ctrl, CartState{q[0], q[1], v[0], v[1]});
    law.max_residual = std::max(law.max_residual, rel_diff(lowered[1], u));
    law.max_residual = std::max(law.max_residual, std::abs(lowered[0]) / std::max(1.0, std::abs(u)));

    for (int d = 0; d < 2; ++d) {
      lam_eq.max_residual = std::max(lam_eq.max_residual, std::abs(lambda_residual(sys, lam, q, d)));
      ghat_eq.max_residual = std::max(ghat_eq.max_residual, std::abs(ghat_residual(sys, lam, q, d)));
    }
    vhat_eq.max_residual = std::max(vhat_eq.max_residual, std::abs(vhat_residual(sys, lam, q)));

    // g = ĝλ with λ g-self-adjoint: gλ is symmetric.
    const Mat l = extend_lambda(sys.model.metric, sys.plant.metric, q);
    const Mat gl = sys.plant.metric.components(q) * l;
    extend.max_residual = std::max(extend.max_residual, (gl - gl.transpose()).cwiseAbs().maxCoeff());

    const Christoffel gamma = christoffel(sys.plant.metric, q);
    symmetry.max_residual = std::max(symmetry.max_residual, gamma.lower_symmetry_residual());
    Vec x(2), y(2), z(2);
    x << box(rng), box(rng);
    y << box(rng), box(rng);
    z << box(rng), box(rng);
    const ConnectionReport rep = verify_connection_axioms(sys.plant.metric, q, x, y, z);
    compat.max_residual = std::max(compat.max_residual, rep.compatibility);
    symmetry.max_residual = std::max(symmetry.max_residual, rep.torsion);
    proj.max_residual = std::max({proj.max_residual, sys.projection.idempotency_residual(q),
                                  sys.projection.self_adjoint_residual(q, x, y)});
  }
  return {quad, pot, diss, law, lam_eq, ghat_eq, vhat_eq, extend, symmetry, compat, proj};
}

std::vector<Check> verify_energy(const VerifyOptions&) {
  const CartpoleController ctrl = CartpoleController::paper_defaults();
  const State fig2{0.5, 0.0, -0.5, 0.0};
  const Trajectory traj = integrate(cart_nonlinear(ctrl), fig2, 1e-3, 20.0);
  const EnergyAudit audit = energy_audit(traj, ctrl);

  CartpoleController conservative = ctrl;
  conservative.phi = PhiFunction::constant(0.0);
  // RK4 drift scales as dt⁴: 2.7e-7 at dt = 1e-3, under 1e-9 at 2.5e-4.
  const EnergyAudit cons =
      energy_audit(integrate(cart_nonlinear(conservative), fig2, 2.5e-4, 10.0), conservative);

  const Trajectory open = integrate(cart_open_loop(ctrl.b), {0.1, 0.0, 0.0, 0.0}, 1e-3, 10.0);
  double open_drift = 0.0;
  for (const Sample& s : open.samples)
    open_drift = std::max(open_drift, std::abs(s.hhat - open.samples.front().hhat));

  return {{"energy.rate_identity", audit.max_deviation, 1e-4},
          {"energy.max_positive_rate", audit.max_positive_rate, 1e-6},
          {"energy.conservative_drift", cons.drift_abs, 1e-8},
          {"energy.open_loop_drift", open_drift, 1e-8}};
}

std::vector<Check> verify_characteristics(const VerifyOptions&) {
  const CartpoleController ctrl = CartpoleController::paper_defaults();
  CharacteristicData data;
  data.section = CartSection::constant(ctrl.sigma0, ctrl.mu0);
  data.h = [&ctrl](double) { return 1.0 / ctrl.sigma0 + ctrl.r; };
  data.w = [&ctrl](double x) { return 0.5 * ctrl.w1 * x * x; };
  const CharacteristicGrid grid{-1.2, 1.2, 50, -2.0, 2.0, 50};
  const CharacteristicSolution sol = solve_characteristics(data, ctrl.b, grid);

  Check g11{"characteristics.ghat11", 0.0, 1e-6};
  Check g12{"characteristics.ghat12", 0.0, 1e-6};
  Check g22{"characteristics.ghat22", 0.0, 1e-6};
  Check vh{"characteristics.vhat", 0.0, 1e-6};
  for (int i = 0; i < grid.theta_count; ++i)
    for (int j = 0; j < grid.x_count; ++j) {
      const std::size_t k = sol.index(i, j);
      const Eigen::Matrix2d exact = ghat_cart(ctrl, grid.theta(i));
      g11.max_residual = std::max(g11.max_residual, std::abs(sol.ghat11[k] - exact(0, 0)));
      g12.max_residual = std::max(g12.max_residual, std::abs(sol.ghat12[k] - exact(0, 1)));
      g22.max_residual = std::max(g22.max_residual, std::abs(sol.ghat22[k] - exact(1, 1)));
      vh.max_residual = std::max(
          vh.max_residual, std::abs(sol.vhat[k] - vhat_cart(ctrl, grid.theta(i), grid.x(j))));
    }
  return {g11, g12, g22, vh, {"characteristics.richardson_estimate", sol.richardson_estimate, 1e-6}};
}

std::vector<Check> verify_quartic(const VerifyOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  const SystemPair sys = quartic_system_pair();
  const LambdaSection lam = quartic_lambda_section();

  Check pde{"quartic.vhat_pde", 0.0, 1e-9};
  Check law{"quartic.closed_form_vs_generic_force", 0.0, 1e-6};
  Check match{"quartic.matching", 0.0, opts.tol};
  for (int n = 0; n < opts.samples; ++n) {
    const QuarticState s{box(rng), box(rng), box(rng), box(rng)};
    const Eigen::Vector2d dvh = vhat_quartic_gradient(s.x, s.y);
    pde.max_residual = std::max(
        pde.max_residual, std::abs(dvh.x() + dvh.y() - potential_v_gradient(s.x, s.y).x()));
    Vec q(2), v(2);
    q << s.x, s.y;
    v << s.x_dot, s.y_dot;
    const Vec f = control_force(sys, q, v);
    const double u = control_u_quartic(s);
    law.max_residual = std::max({law.max_residual, rel_diff(f[1], u),
                                 std::abs(f[0]) / std::max(1.0, std::abs(u))});
    const MatchingResiduals r = matching_residuals(sys, q, v);
    match.max_residual = std::max({match.max_residual, r.quad.norm(), r.pot.norm(),
                                   r.diss.norm(), std::abs(vhat_residual(sys, lam, q))});
  }

  // Open loop from the blow-up data, compared while the exact x stays ≤ 10.
  const double eps = 0.1;
  const QuarticState b0 = blowup_solution(eps, 0.0);
  const double t_end = (1.0 / eps - 0.1) / std::sqrt(3.0);
  const Trajectory open =
      integrate(quartic_open_loop(), {b0.x, b0.y, b0.x_dot, b0.y_dot}, 1e-4, t_end);
  Check blow{"quartic.blowup_tracking", 0.0, 1e-4};
  for (const Sample& s : open.samples) {
    if (s.t >= t_end) break;
    const double exact = blowup_solution(eps, s.t).x;
    blow.max_residual = std::max({blow.max_residual, std::abs(s.state[0] - exact) / exact,
                                  std::abs(s.state[1])});
  }

  const Trajectory closed = integrate(quartic_controlled(), {1.0, -0.5, 0.3, 0.2}, 1e-3, 10.0);
  const auto [dev, pos] = rate_audit(closed);

  const Eigen::Matrix2d ghat = quartic_ghat();
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(ghat).eigenvalues().minCoeff();

  return {pde,
          law,
          match,
          blow,
          {"quartic.controllability_rank_minus_2",
           std::abs(linearized_controllability_rank() - 2.0), 0.0},
          {"quartic.rate_identity", dev, 1e-4},
          {"quartic.max_positive_rate", pos, 1e-6},
          {"quartic.ghat_not_positive_definite", min_eig > 0.0 ? 0.0 : 1.0, 0.0}};
}

std::vector<Check> run_suite(const std::string& suite, const VerifyOptions& opts) {
  if (suite == "matching") return verify_matching(opts);
  if (suite == "energy") return verify_energy(opts);
  if (suite == "characteristics") return verify_characteristics(opts);
  if (suite == "quartic") return verify_quartic(opts);
  if (suite == "all") {
    std::vector<Check> out;
    for (const char* s : {"matching", "energy", "characteristics", "quartic"}) {
      auto part = run_suite(s, opts);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  throw InvalidParameters("unknown suite '" + suite + "'");
}

nlohmann::json to_json(const std::vector<Check>& checks) {
  nlohmann::json doc;
  bool all = true;
  doc["checks"] = nlohmann::json::array();
  for (const Check& c : checks) {
    doc["checks"].push_back(
        {{"name", c.name}, {"max_residual", c.max_residual}, {"tol", c.tol}, {"pass", c.pass()}});
    all = all && c.pass();
  }
  doc["pass"] = all;
  return doc;
}

}  // namespace matchkit::cli
