#include <algorithm>
#include <cmath>
#include <limits>

#include "matchkit/errors.hpp"
#include "matchkit/quartic.hpp"
#include "matchkit/sim.hpp"

namespace matchkit {

namespace {

QuarticState to_quartic(const State& s) { return {s[0], s[1], s[2], s[3]}; }
State from_quartic(const QuarticState& q) { return {q.x, q.y, q.x_dot, q.y_dot}; }

bool all_finite(const State& s) {
  return std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
}

bool within_guard(const State& s) {
  return std::all_of(s.begin(), s.end(),
                     [](double v) { return std::abs(v) <= kDivergenceGuard; });
}

}  // namespace

ClosedLoopSystem cart_nonlinear(const CartpoleController& ctrl) {
  ClosedLoopSystem sys;
  sys.kind = SystemKind::cartpole;
  sys.id = "nonlinear";
  sys.control = [ctrl](const State& s) { return control_u(ctrl, to_cart(s)); };
  sys.dynamics = [b = ctrl.b](const State& s, double u) {
    return to_state(cart_dynamics(b, to_cart(s), u));
  };
  sys.hhat = [ctrl](const State& s) { return hhat(ctrl, to_cart(s)); };
  sys.hhat_rate = [ctrl](const State& s) { return dhhat_dt_formula(ctrl, to_cart(s)); };
  return sys;
}

ClosedLoopSystem cart_linear(double b, const LinearGains& k,
                             const CartpoleController& reference) {
  ClosedLoopSystem sys = cart_nonlinear(reference);
  sys.id = "linear";
  sys.control = [k](const State& s) { return k(to_cart(s)); };
  sys.dynamics = [b](const State& s, double u) {
    return to_state(cart_dynamics(b, to_cart(s), u));
  };
  return sys;
}

ClosedLoopSystem cart_open_loop(double b) {
  ClosedLoopSystem sys;
  sys.kind = SystemKind::cartpole;
  sys.id = "none";
  sys.control = [](const State&) { return 0.0; };
  sys.dynamics = [b](const State& s, double u) {
    return to_state(cart_dynamics(b, to_cart(s), u));
  };
  sys.hhat = [b](const State& s) { return cart_energy(b, to_cart(s)); };
  sys.hhat_rate = [](const State&) { return 0.0; };
  return sys;
}

ClosedLoopSystem quartic_controlled() {
  ClosedLoopSystem sys;
  sys.kind = SystemKind::quartic;
  sys.id = "nonlinear";
  sys.control = [](const State& s) { return control_u_quartic(to_quartic(s)); };
  sys.dynamics = [](const State& s, double u) {
    return from_quartic(quartic_dynamics(to_quartic(s), u));
  };
  sys.hhat = [](const State& s) { return hhat_quartic(to_quartic(s)); };
  sys.hhat_rate = [](const State& s) { return hhat_quartic_rate(to_quartic(s)); };
  return sys;
}

ClosedLoopSystem quartic_open_loop() {
  ClosedLoopSystem sys = quartic_controlled();
  sys.id = "none";
  sys.control = [](const State&) { return 0.0; };
  sys.hhat = [](const State& s) {
    return 0.5 * (s[2] * s[2] + s[3] * s[3]) + potential_v(s[0], s[1]);
  };
  sys.hhat_rate = [](const State&) { return 0.0; };
  return sys;
}

State rk4_step(const ClosedLoopSystem& sys, const State& s, double dt) {
  auto f = [&sys](const State& y) { return sys.dynamics(y, sys.control(y)); };
  auto axpy = [](const State& y, double c, const State& k) {
    State out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] + c * k[i];
    return out;
  };
  const State k1 = f(s);
  const State k2 = f(axpy(s, 0.5 * dt, k1));
  const State k3 = f(axpy(s, 0.5 * dt, k2));
  const State k4 = f(axpy(s, dt, k3));
  State out;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

Trajectory integrate(const ClosedLoopSystem& sys, const State& s0, double dt, double t_max) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameters("dt must be positive");
  if (!(t_max > 0.0) || !std::isfinite(t_max))
    throw InvalidParameters("t_max must be positive");
  if (!all_finite(s0)) throw NonFiniteState("initial state is not finite");

  Trajectory traj;
  traj.kind = sys.kind;
  traj.controller_id = sys.id;
  traj.dt = dt;
  const auto steps = static_cast<long long>(std::llround(t_max / dt));
  traj.samples.reserve(static_cast<std::size_t>(steps) + 1);

  // Returns false when the guard trips.
  auto record = [&](double t, const State& s) {
    double u = std::numeric_limits<double>::quiet_NaN();
    if (all_finite(s)) {
      try {
        u = sys.control(s);
      } catch (const DegenerateModelMetric&) {
      }
    }
    Sample sample{t, s, u, 0.0, 0.0};
    if (sys.hhat) sample.hhat = sys.hhat(s);
    if (sys.hhat_rate) sample.hhat_rate = sys.hhat_rate(s);
    traj.samples.push_back(sample);
    return std::isfinite(u) && within_guard(s);
  };

  State s = s0;
  if (!record(0.0, s)) {
    traj.diverged = true;
    return traj;
  }
  for (long long n = 1; n <= steps; ++n) {
    try {
      s = rk4_step(sys, s, dt);
    } catch (const DegenerateModelMetric&) {
      traj.diverged = true;
      break;
    }
    if (!record(static_cast<double>(n) * dt, s)) {
      traj.diverged = true;
      break;
    }
  }
  return traj;
}

const char* to_string(OutcomeTag tag) {
  switch (tag) {
    case OutcomeTag::settled:
      return "settled";
    case OutcomeTag::diverged:
      return "diverged";
    case OutcomeTag::undetermined:
      break;
  }
  return "undetermined";
}

void OutcomeTracker::add(double t, const State& s) {
  double worst = 0.0;
  for (double v : s) worst = std::max(worst, std::isfinite(v) ? std::abs(v) : INFINITY);
  max_excursion_ = std::max(max_excursion_, worst);
  const bool inside = worst <= opts_.settle_eps;
  if (inside && !inside_) entered_ = t;
  inside_ = inside;
  last_t_ = t;
  any_ = true;
}

Outcome OutcomeTracker::finish() const {
  Outcome out;
  out.max_excursion = max_excursion_;
  if (diverged_) {
    out.tag = OutcomeTag::diverged;
  } else if (any_ && inside_ && last_t_ - entered_ >= opts_.hold - 1e-9) {
    out.tag = OutcomeTag::settled;
    out.settle_time = entered_;
  } else {
    out.tag = OutcomeTag::undetermined;
  }
  return out;
}

Outcome classify(const Trajectory& traj, ClassifyOptions opts) {
  OutcomeTracker tracker(opts);
  for (const Sample& s : traj.samples) tracker.add(s.t, s.state);
  if (traj.diverged) tracker.mark_diverged();
  return tracker.finish();
}

EnergyAudit energy_audit(const Trajectory& traj, const CartpoleController& ctrl) {
  EnergyAudit audit;
  const auto& samples = traj.samples;
  const std::size_t n = samples.size();
  if (n == 0) return audit;
  const double bound = validity(ctrl).cos2_bound;

  std::vector<char> inside(n);
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(samples[i].state[0]);
    inside[i] = c * c > bound;
    h[i] = hhat(ctrl, to_cart(samples[i].state));
  }

  const double dt = traj.dt;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    if (!(inside[i - 2] && inside[i - 1] && inside[i] && inside[i + 1] && inside[i + 2]))
      continue;
    const double formula = dhhat_dt_formula(ctrl, to_cart(samples[i].state));
    const double five = (-h[i + 2] + 8.0 * h[i + 1] - 8.0 * h[i - 1] + h[i - 2]) / (12.0 * dt);
    const double two = (h[i + 1] - h[i - 1]) / (2.0 * dt);
    audit.max_deviation = std::max(audit.max_deviation, std::abs(five - formula));
    audit.max_deviation_two_point = std::max(audit.max_deviation_two_point, std::abs(two - formula));
    audit.max_positive_rate = std::max(audit.max_positive_rate, five);
    ++audit.samples_checked;
  }

  if (inside[0]) {
    for (std::size_t i = 0; i < n && inside[i]; ++i)
      audit.drift_abs = std::max(audit.drift_abs, std::abs(h[i] - h[0]));
    audit.drift_rel = audit.drift_abs / std::max(1.0, std::abs(h[0]));
  }
  return audit;
}

}  // namespace matchkit
