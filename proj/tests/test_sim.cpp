#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "matchkit/errors.hpp"
#include "matchkit/sim.hpp"

namespace matchkit {
namespace {

const CartpoleController kPaper = CartpoleController::paper_defaults();
const State kFigure2{0.5, 0.0, -0.5, 0.0};
const State kFigure3{1.25, 0.0, 1.3, 0.0};

Trajectory constant_trajectory(const State& s, int n, double dt) {
  Trajectory t;
  t.dt = dt;
  for (int i = 0; i < n; ++i) t.samples.push_back(Sample{i * dt, s, 0.0, 0.0, 0.0});
  return t;
}

TEST(Integrate, OpenLoopOriginStaysPut) {
  const Trajectory t = integrate(cart_open_loop(kPaper.b), State{}, 1e-3, 1.0);
  ASSERT_EQ(t.samples.size(), 1001u);
  for (const Sample& s : t.samples)
    for (double v : s.state) ASSERT_EQ(v, 0.0);
}

TEST(Integrate, SampleSpacingIsDt) {
  const Trajectory t = integrate(cart_open_loop(kPaper.b), {0.1, 0, 0, 0}, 0.01, 1.0);
  for (std::size_t i = 1; i < t.samples.size(); ++i)
    ASSERT_NEAR(t.samples[i].t - t.samples[i - 1].t, 0.01, 1e-12);
  EXPECT_NEAR(t.samples.back().t, 1.0, 1e-12);
}

TEST(Integrate, OpenLoopEnergyConserved) {
  const Trajectory t = integrate(cart_open_loop(kPaper.b), {0.1, 0, 0, 0}, 1e-3, 10.0);
  double drift = 0.0;
  for (const Sample& s : t.samples)
    drift = std::max(drift, std::abs(cart_energy(kPaper.b, to_cart(s.state)) -
                                     cart_energy(kPaper.b, to_cart(t.samples[0].state))));
  EXPECT_LT(drift, 1e-8);
}

TEST(Integrate, InvalidArguments) {
  const auto sys = cart_open_loop(kPaper.b);
  EXPECT_THROW(integrate(sys, State{}, 0.0, 1.0), InvalidParameters);
  EXPECT_THROW(integrate(sys, State{}, 1e-3, -1.0), InvalidParameters);
  EXPECT_THROW(integrate(sys, {std::numeric_limits<double>::quiet_NaN(), 0, 0, 0}, 1e-3, 1.0),
               NonFiniteState);
}

TEST(Integrate, GuardStopsDivergence) {
  const Trajectory t = integrate(cart_linear(kPaper.b, paper_gains(), kPaper), kFigure3, 1e-3, 20.0);
  EXPECT_TRUE(t.diverged);
  bool tripped = false;
  for (double v : t.samples.back().state) tripped |= std::abs(v) > kDivergenceGuard;
  tripped |= !std::isfinite(t.samples.back().u);
  EXPECT_TRUE(tripped);
}

TEST(Integrate, Deterministic) {
  const auto a = integrate(cart_nonlinear(kPaper), kFigure2, 1e-3, 5.0);
  const auto b = integrate(cart_nonlinear(kPaper), kFigure2, 1e-3, 5.0);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) ASSERT_EQ(a.samples[i].state, b.samples[i].state);
}

TEST(Integrate, FourthOrder) {
  const auto sys = cart_nonlinear(kPaper);
  auto end = [&](double dt) { return integrate(sys, kFigure2, dt, 20.0).samples.back().state; };
  const double dt = 1e-2;
  const State ref = end(dt / 8), coarse = end(dt), fine = end(dt / 2);
  double e1 = 0.0, e2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    e1 = std::max(e1, std::abs(coarse[i] - ref[i]));
    e2 = std::max(e2, std::abs(fine[i] - ref[i]));
  }
  EXPECT_GE(e1 / e2, 8.0);
  EXPECT_LE(e1 / e2, 32.0);
}

TEST(Classify, ZeroTrajectorySettlesImmediately) {
  const Outcome o = classify(constant_trajectory(State{}, 3001, 1e-3));
  EXPECT_EQ(o.tag, OutcomeTag::settled);
  ASSERT_TRUE(o.settle_time.has_value());
  EXPECT_EQ(*o.settle_time, 0.0);
  EXPECT_EQ(o.max_excursion, 0.0);
}

TEST(Classify, TooShortHoldIsUndetermined) {
  const Outcome o = classify(constant_trajectory(State{}, 1000, 1e-3));
  EXPECT_EQ(o.tag, OutcomeTag::undetermined);
  EXPECT_FALSE(o.settle_time.has_value());
}

TEST(Classify, LeavingTheBallResetsTheWindow) {
  Trajectory t = constant_trajectory(State{}, 5001, 1e-3);
  t.samples[4000].state[1] = 0.5;
  const Outcome o = classify(t);
  EXPECT_EQ(o.tag, OutcomeTag::undetermined);
  EXPECT_EQ(o.max_excursion, 0.5);
  t.samples[2000].state[1] = 0.5;
  t.samples[4000].state[1] = 0.0;
  const Outcome late = classify(t);
  EXPECT_EQ(late.tag, OutcomeTag::settled);
  EXPECT_NEAR(*late.settle_time, 2.001, 1e-12);
}

TEST(Classify, DivergedFlag) {
  Trajectory t = constant_trajectory(State{}, 3001, 1e-3);
  t.diverged = true;
  EXPECT_EQ(classify(t).tag, OutcomeTag::diverged);
}

TEST(Classify, LinearFigureScenarios) {
  const auto lin = cart_linear(kPaper.b, paper_gains(), kPaper);
  EXPECT_EQ(classify(integrate(lin, kFigure2, 1e-3, 20.0)).tag, OutcomeTag::settled);
  EXPECT_EQ(classify(integrate(lin, kFigure3, 1e-3, 20.0)).tag, OutcomeTag::diverged);
}

TEST(Classify, NonlinearFigureThreeStaysBounded) {
  const Trajectory t = integrate(cart_nonlinear(kPaper), kFigure3, 1e-3, 20.0);
  EXPECT_FALSE(t.diverged);
  EXPECT_LT(classify(t).max_excursion, 0.1 * kDivergenceGuard);
}

TEST(EnergyAudit, ZeroTrajectory) {
  const EnergyAudit a = energy_audit(constant_trajectory(State{}, 100, 1e-3), kPaper);
  EXPECT_EQ(a.max_deviation, 0.0);
  EXPECT_EQ(a.max_positive_rate, 0.0);
  EXPECT_EQ(a.drift_abs, 0.0);
}

TEST(EnergyAudit, FigureTwoNonlinear) {
  const Trajectory t = integrate(cart_nonlinear(kPaper), kFigure2, 1e-3, 20.0);
  const EnergyAudit a = energy_audit(t, kPaper);
  EXPECT_GT(a.samples_checked, 10000u);
  EXPECT_LT(a.max_positive_rate, 1e-6);
  EXPECT_LT(a.max_deviation, 1e-4);
}

TEST(EnergyAudit, ConservativeControllerKeepsEnergy) {
  CartpoleController c = kPaper;
  c.phi = PhiFunction::constant(0.0);
  const EnergyAudit coarse = energy_audit(integrate(cart_nonlinear(c), kFigure2, 1e-3, 10.0), c);
  const EnergyAudit fine = energy_audit(integrate(cart_nonlinear(c), kFigure2, 2.5e-4, 10.0), c);
  EXPECT_LT(fine.drift_abs, 1e-8);
  // Fourth-order truncation: a 4× smaller step shrinks the drift by about 256.
  EXPECT_GT(coarse.drift_abs / fine.drift_abs, 100.0);
  EXPECT_LT(coarse.drift_rel, 1e-8);
}

TEST(EnergyAudit, SkipsSamplesOutsideCone) {
  Trajectory t = constant_trajectory({1.5, 0, 0, 0}, 100, 1e-3);  // cos²(1.5) < bound
  EXPECT_EQ(energy_audit(t, kPaper).samples_checked, 0u);
}

SweepConfig fast_config() {
  SweepConfig cfg;
  cfg.ctrl = kPaper;
  cfg.t_max = 3.0;
  cfg.dt = 2e-3;
  return cfg;
}

TEST(Sweep, OriginCellSettlesForBoth) {
  SweepConfig cfg = fast_config();
  const SweepResult r = sweep(cfg, SweepGrid{{0, 0, 1}, {0, 0, 1}});
  ASSERT_EQ(r.cells.size(), 1u);
  EXPECT_EQ(r.cells[0].linear->tag, OutcomeTag::settled);
  EXPECT_EQ(r.cells[0].nonlinear->tag, OutcomeTag::settled);
  EXPECT_EQ(r.stats().containment_violations, 0u);
}

TEST(Sweep, SerialAndParallelIdentical) {
  const SweepGrid grid{{-1.5, 1.5, 6}, {-1.5, 1.5, 5}};
  const SweepResult a = sweep(fast_config(), grid), b = sweep_serial(fast_config(), grid);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t k = 0; k < a.cells.size(); ++k) {
    EXPECT_EQ(a.cells[k].index, k);
    EXPECT_EQ(a.cells[k].linear->tag, b.cells[k].linear->tag);
    EXPECT_EQ(a.cells[k].linear->max_excursion, b.cells[k].linear->max_excursion);
    EXPECT_EQ(a.cells[k].nonlinear->max_excursion, b.cells[k].nonlinear->max_excursion);
    EXPECT_EQ(a.cells[k].linear->settle_time, b.cells[k].linear->settle_time);
  }
}

TEST(Sweep, CellsMatchIntegrateAndClassify) {
  SweepConfig cfg = fast_config();
  const SweepGrid grid{{-1.0, 1.25, 4}, {-0.5, 1.3, 3}};
  const SweepResult r = sweep(cfg, grid);
  for (const SweepCell& c : r.cells) {
    const State s0{c.theta0, 0.0, c.thetadot0, 0.0};
    const Outcome lin = classify(integrate(cart_linear(kPaper.b, cfg.gains, kPaper), s0, cfg.dt, cfg.t_max));
    const Outcome non = classify(integrate(cart_nonlinear(kPaper), s0, cfg.dt, cfg.t_max));
    EXPECT_EQ(c.linear->tag, lin.tag);
    EXPECT_EQ(c.linear->max_excursion, lin.max_excursion);
    EXPECT_EQ(c.nonlinear->tag, non.tag);
    EXPECT_EQ(c.nonlinear->max_excursion, non.max_excursion);
  }
}

std::string csv(const SweepResult& r) {
  std::ostringstream out;
  write_sweep_csv(out, r);
  return out.str();
}

TEST(Sweep, MergeIsAssociative) {
  const SweepConfig cfg = fast_config();
  const SweepGrid grid{{-1.2, 1.2, 5}, {-1.0, 1.0, 4}};
  const SweepResult whole = sweep(cfg, grid);
  const SweepResult a = sweep_range(cfg, grid, 0, 7);
  const SweepResult b = sweep_range(cfg, grid, 7, 13);
  const SweepResult c = sweep_range(cfg, grid, 13, 20);
  const SweepResult left = merge(merge(a, b), c);
  const SweepResult right = merge(a, merge(c, b));
  EXPECT_TRUE(left.complete());
  EXPECT_EQ(csv(left), csv(whole));
  EXPECT_EQ(csv(right), csv(whole));
  EXPECT_THROW(merge(a, a), InvalidParameters);
  EXPECT_THROW(merge(a, sweep_range(cfg, SweepGrid{{0, 1, 2}, {0, 1, 2}}, 0, 1)),
               InvalidParameters);
}

TEST(Sweep, RejectsOversizedGrid) {
  SweepConfig cfg = fast_config();
  cfg.max_cells = 10;
  EXPECT_THROW(sweep(cfg, SweepGrid{{0, 1, 4}, {0, 1, 4}}), InvalidParameters);
  EXPECT_THROW(sweep(fast_config(), SweepGrid{{0, 1, 0}, {0, 1, 4}}), InvalidParameters);
}

TEST(Sweep, SingleController) {
  SweepConfig cfg = fast_config();
  cfg.run_linear = false;
  const SweepResult r = sweep(cfg, SweepGrid{{0, 0.1, 2}, {0, 0, 1}});
  EXPECT_FALSE(r.cells[0].linear.has_value());
  EXPECT_TRUE(r.cells[0].nonlinear.has_value());
  EXPECT_NE(csv(r).find("0,0,,,"), std::string::npos);
}

TEST(Csv, TrajectoryLayout) {
  const Trajectory t = integrate(cart_nonlinear(kPaper), kFigure2, 0.5, 1.0);
  std::ostringstream out;
  write_trajectory_csv(out, t);
  std::istringstream in(out.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "t,theta,theta_dot,x,x_dot,u,hhat,dhhat_dt");
  EXPECT_EQ(first.rfind("0,0.5,-0.5,0,0,", 0), 0u) << first;
  // 17 significant digits survive a round trip.
  std::istringstream fields(first);
  std::string cell;
  for (int i = 0; i < 6; ++i) std::getline(fields, cell, ',');
  EXPECT_EQ(std::stod(cell), t.samples[0].u);
}

TEST(Csv, QuarticLayout) {
  const Trajectory t = integrate(quartic_controlled(), {1, 2, 3, 4}, 0.1, 0.1);
  std::ostringstream out;
  write_trajectory_csv(out, t);
  EXPECT_EQ(out.str().rfind("t,x,y,x_dot,y_dot,u,hhat\n0,1,2,3,4,", 0), 0u);
}

TEST(Csv, SweepLayout) {
  const SweepResult r = sweep(fast_config(), SweepGrid{{0, 0, 1}, {0, 0, 1}});
  EXPECT_EQ(csv(r),
            "theta0,thetadot0,outcome_linear,settle_linear,outcome_nonlinear,settle_nonlinear\n"
            "0,0,settled,0,settled,0\n");
}

}  // namespace
}  // namespace matchkit
