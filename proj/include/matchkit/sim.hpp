#pragma once

// Closed-loop simulation: fixed-step RK4, outcome classification, the
// energy audit along a trajectory and the basin-of-attraction sweep.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "matchkit/cartpole.hpp"
#include "matchkit/linear_compare.hpp"

namespace matchkit {

/// Cart: (θ, x, θ̇, ẋ). Quartic: (x, y, ẋ, ẏ).
using State = std::array<double, 4>;

enum class SystemKind { cartpole, quartic };

inline State to_state(const CartState& s) { return {s.theta, s.x, s.theta_dot, s.x_dot}; }
inline CartState to_cart(const State& s) { return {s[0], s[1], s[2], s[3]}; }

/// A closed loop as plain functions of the state. `hhat` and `hhat_rate`
/// are diagnostics recorded with every sample.
struct ClosedLoopSystem {
  SystemKind kind = SystemKind::cartpole;
  std::string id;
  std::function<double(const State&)> control;
  std::function<State(const State&, double u)> dynamics;
  std::function<double(const State&)> hhat;
  std::function<double(const State&)> hhat_rate;
};

/// Paper control law with controller `ctrl`.
ClosedLoopSystem cart_nonlinear(const CartpoleController& ctrl);
/// u = k·s. Ĥ of `reference` is recorded as a diagnostic.
ClosedLoopSystem cart_linear(double b, const LinearGains& k,
                             const CartpoleController& reference);
/// u = 0; the recorded energy is ½g(v, v) + cos θ with zero rate.
ClosedLoopSystem cart_open_loop(double b);
ClosedLoopSystem quartic_controlled();
/// u = 0; the recorded energy is ½|v|² + V.
ClosedLoopSystem quartic_open_loop();

struct Sample {
  double t = 0.0;
  State state{};
  double u = 0.0;
  double hhat = 0.0;
  double hhat_rate = 0.0;
};

struct Trajectory {
  SystemKind kind = SystemKind::cartpole;
  std::vector<Sample> samples;
  std::string controller_id;
  double dt = 0.0;
  std::string integrator = "rk4";
  /// Set when the divergence guard tripped; the last sample is the first
  /// state that tripped it.
  bool diverged = false;
};

inline constexpr double kDivergenceGuard = 1e4;

/// Classical RK4 with fixed step dt up to t_max (round(t_max/dt) steps).
/// Halts early once a state component exceeds kDivergenceGuard in absolute
/// value or u is not finite (including a degenerate model metric).
/// InvalidParameters unless dt, t_max > 0; NonFiniteState for a non-finite s0.
Trajectory integrate(const ClosedLoopSystem& sys, const State& s0, double dt, double t_max);

/// One RK4 step; exposed for the order check.
State rk4_step(const ClosedLoopSystem& sys, const State& s, double dt);

enum class OutcomeTag { settled, diverged, undetermined };
const char* to_string(OutcomeTag tag);

struct Outcome {
  OutcomeTag tag = OutcomeTag::undetermined;
  std::optional<double> settle_time;
  double max_excursion = 0.0;
};

struct ClassifyOptions {
  double settle_eps = 1e-2;
  double hold = 2.0;
};

/// Streaming classifier: feed samples in time order, then call finish().
/// Settled means every component stayed within settle_eps from settle_time
/// to the final sample and that stretch lasts at least `hold`.
class OutcomeTracker {
 public:
  explicit OutcomeTracker(ClassifyOptions opts = {}) : opts_(opts) {}
  void add(double t, const State& s);
  void mark_diverged() { diverged_ = true; }
  Outcome finish() const;

 private:
  ClassifyOptions opts_;
  bool diverged_ = false;
  bool any_ = false;
  bool inside_ = false;
  double entered_ = 0.0;
  double last_t_ = 0.0;
  double max_excursion_ = 0.0;
};

Outcome classify(const Trajectory& traj, ClassifyOptions opts = {});

struct EnergyAudit {
  /// Max |dĤ/dt (5-point centered difference) − formula| within the cone.
  double max_deviation = 0.0;
  /// The same with the 2-point centered difference.
  double max_deviation_two_point = 0.0;
  /// Max positive numerical dĤ/dt (0 if never positive).
  double max_positive_rate = 0.0;
  /// Max |Ĥ(t) − Ĥ(0)| and the same divided by max(1, |Ĥ(0)|), over the
  /// leading stretch of samples that stays inside the cone.
  double drift_abs = 0.0;
  double drift_rel = 0.0;
  std::size_t samples_checked = 0;
};

/// Audits a cart trajectory against Ĥ and dĤ/dt of `ctrl`, using only
/// samples with cos²θ above the validity bound.
EnergyAudit energy_audit(const Trajectory& traj, const CartpoleController& ctrl);

/// lo, lo + step, ..., hi with `count` points (count 1 gives lo).
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;
  double at(int i) const;
};

struct SweepGrid {
  Range theta0;
  Range thetadot0;
  std::size_t size() const {
    return static_cast<std::size_t>(theta0.count) * static_cast<std::size_t>(thetadot0.count);
  }
  /// Cell k = i·thetadot0.count + j.
  double theta_of(std::size_t k) const;
  double thetadot_of(std::size_t k) const;
};

struct SweepConfig {
  CartpoleController ctrl;
  LinearGains gains = paper_gains();
  bool run_linear = true;
  bool run_nonlinear = true;
  double dt = 1e-3;
  double t_max = 20.0;
  ClassifyOptions classify;
  std::size_t max_cells = 1'000'000;
};

struct SweepCell {
  std::size_t index = 0;
  double theta0 = 0.0;
  double thetadot0 = 0.0;
  std::optional<Outcome> linear;
  std::optional<Outcome> nonlinear;
};

struct SweepStats {
  std::size_t cells = 0;
  std::size_t linear_settled = 0;
  std::size_t nonlinear_settled = 0;
  std::size_t linear_diverged = 0;
  std::size_t nonlinear_diverged = 0;
  /// Settled under linear but not under nonlinear.
  std::size_t containment_violations = 0;
  /// Settled under nonlinear but not under linear.
  std::size_t nonlinear_only = 0;
  /// Cells where both settle and the linear law settles first.
  std::size_t linear_faster = 0;
  std::size_t both_settled = 0;
};

/// Cells ordered by index. A partial result holds a subset of the grid.
struct SweepResult {
  SweepGrid grid;
  std::vector<SweepCell> cells;
  bool complete() const { return cells.size() == grid.size(); }
  SweepStats stats() const;
};

/// OpenMP over cells. InvalidParameters if the grid exceeds max_cells.
SweepResult sweep(const SweepConfig& cfg, const SweepGrid& grid);
SweepResult sweep_serial(const SweepConfig& cfg, const SweepGrid& grid);
/// Cells [begin, end) only.
SweepResult sweep_range(const SweepConfig& cfg, const SweepGrid& grid, std::size_t begin,
                        std::size_t end);
/// Union of two partial results over the same grid, ordered by index.
/// InvalidParameters on a grid mismatch or overlapping cells.
SweepResult merge(const SweepResult& a, const SweepResult& b);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace matchkit
