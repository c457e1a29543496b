#include <cstdio>
#include <ostream>

#include "matchkit/sim.hpp"

namespace matchkit {

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  char line[512];
  if (traj.kind == SystemKind::cartpole) {
    out << "t,theta,theta_dot,x,x_dot,u,hhat,dhhat_dt\n";
    for (const Sample& s : traj.samples) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    s.t, s.state[0], s.state[2], s.state[1], s.state[3], s.u, s.hhat,
                    s.hhat_rate);
      out << line;
    }
  } else {
    out << "t,x,y,x_dot,y_dot,u,hhat\n";
    for (const Sample& s : traj.samples) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t,
                    s.state[0], s.state[1], s.state[2], s.state[3], s.u, s.hhat);
      out << line;
    }
  }
}

namespace {

void write_outcome(std::ostream& out, const std::optional<Outcome>& o) {
  if (!o) {
    out << ",";
    return;
  }
  out << to_string(o->tag) << ",";
  if (o->settle_time) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *o->settle_time);
    out << buf;
  }
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "theta0,thetadot0,outcome_linear,settle_linear,outcome_nonlinear,settle_nonlinear\n";
  char buf[128];
  for (const SweepCell& c : result.cells) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", c.theta0, c.thetadot0);
    out << buf;
    write_outcome(out, c.linear);
    out << ",";
    write_outcome(out, c.nonlinear);
    out << "\n";
  }
}

}  // namespace matchkit
