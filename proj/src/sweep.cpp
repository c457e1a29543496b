#include <algorithm>
#include <cmath>
#include <sstream>

#include "matchkit/errors.hpp"
#include "matchkit/sim.hpp"

namespace matchkit {

double Range::at(int i) const {
  if (count == 1) return lo;
  return lo + (hi - lo) * i / (count - 1);
}

double SweepGrid::theta_of(std::size_t k) const {
  return theta0.at(static_cast<int>(k / static_cast<std::size_t>(thetadot0.count)));
}

double SweepGrid::thetadot_of(std::size_t k) const {
  return thetadot0.at(static_cast<int>(k % static_cast<std::size_t>(thetadot0.count)));
}

namespace {

/// Streaming version of integrate + classify for the cart: same arithmetic,
/// no stored samples, no type-erased calls.
template <class Control>
Outcome run_cell(double b, const Control& control, const State& s0, double dt,
                 double t_max, const ClassifyOptions& opts) {
  auto f = [&](const State& y) {
    return to_state(cart_dynamics(b, to_cart(y), control(y)));
  };
  auto axpy = [](const State& y, double c, const State& k) {
    State out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] + c * k[i];
    return out;
  };
  auto healthy = [&](const State& s) {
    for (double v : s)
      if (!(std::abs(v) <= kDivergenceGuard)) return false;
    try {
      return std::isfinite(control(s));
    } catch (const DegenerateModelMetric&) {
      return false;
    }
  };

  OutcomeTracker tracker(opts);
  State s = s0;
  tracker.add(0.0, s);
  if (!healthy(s)) {
    tracker.mark_diverged();
    return tracker.finish();
  }
  const auto steps = static_cast<long long>(std::llround(t_max / dt));
  for (long long n = 1; n <= steps; ++n) {
    try {
      const State k1 = f(s);
      const State k2 = f(axpy(s, 0.5 * dt, k1));
      const State k3 = f(axpy(s, 0.5 * dt, k2));
      const State k4 = f(axpy(s, dt, k3));
      for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    } catch (const DegenerateModelMetric&) {
      tracker.mark_diverged();
      break;
    }
    tracker.add(static_cast<double>(n) * dt, s);
    if (!healthy(s)) {
      tracker.mark_diverged();
      break;
    }
  }
  return tracker.finish();
}

void validate(const SweepConfig& cfg, const SweepGrid& grid) {
  if (grid.theta0.count < 1 || grid.thetadot0.count < 1)
    throw InvalidParameters("sweep grid counts must be positive");
  if (grid.size() > cfg.max_cells) {
    std::ostringstream msg;
    msg << "sweep grid has " << grid.size() << " cells, above the maximum " << cfg.max_cells;
    throw InvalidParameters(msg.str());
  }
  if (!(cfg.dt > 0.0) || !(cfg.t_max > 0.0))
    throw InvalidParameters("dt and t_max must be positive");
  cfg.ctrl.validate(true);
}

SweepCell run(const SweepConfig& cfg, const SweepGrid& grid, std::size_t k) {
  SweepCell cell;
  cell.index = k;
  cell.theta0 = grid.theta_of(k);
  cell.thetadot0 = grid.thetadot_of(k);
  const State s0{cell.theta0, 0.0, cell.thetadot0, 0.0};
  const double b = cfg.ctrl.b;
  if (cfg.run_linear) {
    const LinearGains gains = cfg.gains;
    cell.linear = run_cell(
        b, [&gains](const State& s) { return gains(to_cart(s)); }, s0, cfg.dt, cfg.t_max,
        cfg.classify);
  }
  if (cfg.run_nonlinear) {
    const CartpoleController& ctrl = cfg.ctrl;
    cell.nonlinear = run_cell(
        b, [&ctrl](const State& s) { return control_u(ctrl, to_cart(s)); }, s0, cfg.dt,
        cfg.t_max, cfg.classify);
  }
  return cell;
}

bool settled(const std::optional<Outcome>& o) {
  return o && o->tag == OutcomeTag::settled;
}

bool diverged(const std::optional<Outcome>& o) {
  return o && o->tag == OutcomeTag::diverged;
}

}  // namespace

SweepStats SweepResult::stats() const {
  SweepStats st;
  st.cells = cells.size();
  for (const SweepCell& c : cells) {
    const bool lin = settled(c.linear);
    const bool non = settled(c.nonlinear);
    st.linear_settled += lin;
    st.nonlinear_settled += non;
    st.linear_diverged += diverged(c.linear);
    st.nonlinear_diverged += diverged(c.nonlinear);
    st.containment_violations += lin && !non;
    st.nonlinear_only += non && !lin;
    if (lin && non) {
      ++st.both_settled;
      st.linear_faster += *c.linear->settle_time < *c.nonlinear->settle_time;
    }
  }
  return st;
}

SweepResult sweep_range(const SweepConfig& cfg, const SweepGrid& grid, std::size_t begin,
                        std::size_t end) {
  validate(cfg, grid);
  end = std::min(end, grid.size());
  SweepResult result;
  result.grid = grid;
  for (std::size_t k = begin; k < end; ++k) result.cells.push_back(run(cfg, grid, k));
  return result;
}

SweepResult sweep_serial(const SweepConfig& cfg, const SweepGrid& grid) {
  return sweep_range(cfg, grid, 0, grid.size());
}

SweepResult sweep(const SweepConfig& cfg, const SweepGrid& grid) {
  validate(cfg, grid);
  SweepResult result;
  result.grid = grid;
  result.cells.resize(grid.size());
  const auto n = static_cast<long long>(grid.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long long k = 0; k < n; ++k)
    result.cells[static_cast<std::size_t>(k)] = run(cfg, grid, static_cast<std::size_t>(k));
  return result;
}

namespace {

bool same_range(const Range& a, const Range& b) {
  return a.lo == b.lo && a.hi == b.hi && a.count == b.count;
}

}  // namespace

SweepResult merge(const SweepResult& a, const SweepResult& b) {
  if (!same_range(a.grid.theta0, b.grid.theta0) ||
      !same_range(a.grid.thetadot0, b.grid.thetadot0))
    throw InvalidParameters("cannot merge sweeps over different grids");
  SweepResult out;
  out.grid = a.grid;
  out.cells.reserve(a.cells.size() + b.cells.size());
  std::merge(a.cells.begin(), a.cells.end(), b.cells.begin(), b.cells.end(),
             std::back_inserter(out.cells),
             [](const SweepCell& x, const SweepCell& y) { return x.index < y.index; });
  for (std::size_t i = 1; i < out.cells.size(); ++i)
    if (out.cells[i].index == out.cells[i - 1].index)
      throw InvalidParameters("cannot merge sweeps with overlapping cells");
  return out;
}

}  // namespace matchkit
