// matchkit: simulate, sweep, verify, gains and poleplace subcommands.
// Exit codes: 0 success, 1 failed checks or a required outcome not met,
// 2 invalid arguments or parameters.

#include <charconv>
#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "matchkit/cart_params.hpp"
#include "matchkit/cartpole.hpp"
#include "matchkit/errors.hpp"
#include "matchkit/linear_compare.hpp"
#include "matchkit/sim.hpp"
#include "verify.hpp"

namespace {

using matchkit::InvalidParameters;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInvalid = 2;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& text, const std::string& what) {
  // from_chars rejects a leading '+'.
  const std::string_view body =
      !text.empty() && text[0] == '+' ? std::string_view(text).substr(1) : std::string_view(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
  if (body.empty() || ec != std::errc{} || ptr != body.data() + body.size() || !std::isfinite(v))
    throw InvalidParameters("malformed number '" + text + "' in " + what);
  return v;
}

/// "lo:hi:n".
matchkit::Range parse_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw InvalidParameters("range '" + text + "' must be lo:hi:n");
  matchkit::Range r;
  r.lo = to_double(parts[0], text);
  r.hi = to_double(parts[1], text);
  const double n = to_double(parts[2], text);
  if (n < 1 || n != std::floor(n) || n > 1e6)
    throw InvalidParameters("range count in '" + text + "' must be a positive integer");
  r.count = static_cast<int>(n);
  return r;
}

/// "re", "re+imi" or "re-imi".
std::complex<double> parse_pole(const std::string& text) {
  if (text.empty() || text.back() != 'i') return {to_double(text, "poles"), 0.0};
  const std::string body = text.substr(0, text.size() - 1);
  const auto split_at = body.find_first_of("+-", 1);
  if (split_at == std::string::npos) return {0.0, to_double(body, "poles")};
  return {to_double(body.substr(0, split_at), "poles"),
          to_double(body.substr(split_at), "poles")};
}

matchkit::LinearGains parse_gains(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) throw InvalidParameters("gains must be four comma-separated numbers");
  return {to_double(parts[0], "gains"), to_double(parts[1], "gains"),
          to_double(parts[2], "gains"), to_double(parts[3], "gains")};
}

json outcome_json(const matchkit::Outcome& o) {
  json j{{"outcome", matchkit::to_string(o.tag)}, {"max_excursion", o.max_excursion}};
  j["settle_time"] = o.settle_time ? json(*o.settle_time) : json(nullptr);
  return j;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidParameters("cannot open output file '" + path + "'");
  return out;
}

matchkit::CartpoleController controller(const std::string& params_path) {
  if (params_path.empty()) {
    auto c = matchkit::CartpoleController::paper_defaults();
    c.validate();
    return c;
  }
  return matchkit::load_controller(params_path);
}

struct SimulateArgs {
  std::string system = "cartpole";
  std::string controller = "nonlinear";
  std::string params;
  std::string gains;
  double theta0 = 0.0, thetadot0 = 0.0, x0 = 0.0, xdot0 = 0.0, y0 = 0.0, ydot0 = 0.0;
  double dt = 1e-3;
  double tmax = 20.0;
  std::string out;
  bool require_settled = false;
};

int run_simulate(const SimulateArgs& a) {
  matchkit::ClosedLoopSystem sys;
  matchkit::State s0{};
  if (a.system == "cartpole") {
    const auto ctrl = controller(a.params);
    if (a.controller == "nonlinear") {
      sys = matchkit::cart_nonlinear(ctrl);
    } else if (a.controller == "linear") {
      const auto k = a.gains.empty() ? matchkit::paper_gains() : parse_gains(a.gains);
      sys = matchkit::cart_linear(ctrl.b, k, ctrl);
    } else {
      sys = matchkit::cart_open_loop(ctrl.b);
    }
    s0 = {a.theta0, a.x0, a.thetadot0, a.xdot0};
  } else {
    if (a.controller == "linear")
      throw InvalidParameters("the quartic system has no linear controller");
    sys = a.controller == "none" ? matchkit::quartic_open_loop() : matchkit::quartic_controlled();
    s0 = {a.x0, a.y0, a.xdot0, a.ydot0};
  }

  const auto traj = matchkit::integrate(sys, s0, a.dt, a.tmax);
  const auto outcome = matchkit::classify(traj);
  json summary = outcome_json(outcome);
  summary["system"] = a.system;
  summary["controller"] = traj.controller_id;
  summary["samples"] = traj.samples.size();
  summary["dt"] = a.dt;

  if (a.out.empty()) {
    matchkit::write_trajectory_csv(std::cout, traj);
    std::cerr << summary.dump(2) << "\n";
  } else {
    auto file = open_output(a.out);
    matchkit::write_trajectory_csv(file, traj);
    std::cout << summary.dump(2) << "\n";
  }
  if (a.require_settled && outcome.tag != matchkit::OutcomeTag::settled) return kFailed;
  return kOk;
}

struct SweepArgs {
  std::string theta0 = "-1.5:1.5:100";
  std::string thetadot0 = "-1.5:1.5:100";
  std::string controllers = "both";
  std::string params;
  std::string gains;
  double dt = 1e-3;
  double tmax = 20.0;
  std::string out;
  bool serial = false;
};

int run_sweep(const SweepArgs& a) {
  matchkit::SweepConfig cfg;
  cfg.ctrl = controller(a.params);
  if (!a.gains.empty()) cfg.gains = parse_gains(a.gains);
  cfg.run_linear = a.controllers != "nonlinear";
  cfg.run_nonlinear = a.controllers != "linear";
  cfg.dt = a.dt;
  cfg.t_max = a.tmax;
  const matchkit::SweepGrid grid{parse_range(a.theta0), parse_range(a.thetadot0)};

  const auto result = a.serial ? matchkit::sweep_serial(cfg, grid) : matchkit::sweep(cfg, grid);
  if (!a.out.empty()) {
    auto file = open_output(a.out);
    matchkit::write_sweep_csv(file, result);
  }
  const auto st = result.stats();
  json doc{{"cells", st.cells},
           {"linear_settled", st.linear_settled},
           {"nonlinear_settled", st.nonlinear_settled},
           {"linear_diverged", st.linear_diverged},
           {"nonlinear_diverged", st.nonlinear_diverged},
           {"containment_violations", st.containment_violations},
           {"nonlinear_only_settled", st.nonlinear_only},
           {"both_settled", st.both_settled},
           {"linear_settles_first", st.linear_faster}};
  std::cout << doc.dump(2) << "\n";
  return kOk;
}

int run_verify(const std::string& suite, const matchkit::cli::VerifyOptions& opts) {
  if (opts.samples < 1) throw InvalidParameters("--samples must be positive");
  if (!(opts.tol > 0.0)) throw InvalidParameters("--tol must be positive");
  const auto checks = matchkit::cli::run_suite(suite, opts);
  json doc = matchkit::cli::to_json(checks);
  doc["suite"] = suite;
  doc["seed"] = opts.seed;
  doc["samples"] = opts.samples;
  std::cout << doc.dump(2) << "\n";
  return doc["pass"].get<bool>() ? kOk : kFailed;
}

int run_gains(const matchkit::PhysicalCart& p) {
  const double b = matchkit::nondimensionalize(p);
  const auto scales = matchkit::cart_scales(p);
  const auto report = matchkit::validity(matchkit::CartpoleController::paper_defaults(b));
  char rounded[32];
  std::snprintf(rounded, sizeof rounded, "%.3f", b);
  json doc{{"b", b},
           {"b_rounded", rounded},
           {"scales", {{"length", scales.length}, {"time", scales.time}, {"energy", scales.energy}}},
           {"validity",
            {{"ok", report.ok},
             {"cos2_bound", report.cos2_bound},
             {"theta_max", report.theta_max}}}};
  std::cout << doc.dump(2) << "\n";
  return kOk;
}

int run_poleplace(double b, const std::string& poles_text) {
  std::vector<std::complex<double>> poles;
  for (const auto& p : split(poles_text, ',')) poles.push_back(parse_pole(p));
  if (poles.size() != 4) throw InvalidParameters("exactly four poles are required");
  const auto k = matchkit::pole_place(b, poles);
  const auto eig = matchkit::closed_loop_eigenvalues(b, k);
  json achieved = json::array();
  for (const auto& e : eig) achieved.push_back({e.real(), e.imag()});
  json doc{{"b", b},
           {"gains",
            {{"k_theta", k.k_theta},
             {"k_x", k.k_x},
             {"k_thetadot", k.k_thetadot},
             {"k_xdot", k.k_xdot}}},
           {"eigenvalues", achieved},
           {"max_mismatch", matchkit::pole_mismatch(poles, eig)}};
  std::cout << doc.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matching controllers for the inverted-pendulum cart and a quartic example"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Integrate one closed-loop trajectory");
  simulate->add_option("--system", sim.system)->check(CLI::IsMember({"cartpole", "quartic"}));
  simulate->add_option("--controller", sim.controller)
      ->check(CLI::IsMember({"nonlinear", "linear", "none"}));
  simulate->add_option("--params", sim.params, "Controller JSON file")->check(CLI::ExistingFile);
  simulate->add_option("--gains", sim.gains, "k_theta,k_x,k_thetadot,k_xdot");
  simulate->add_option("--theta0", sim.theta0);
  simulate->add_option("--thetadot0", sim.thetadot0);
  simulate->add_option("--x0", sim.x0);
  simulate->add_option("--xdot0", sim.xdot0);
  simulate->add_option("--y0", sim.y0);
  simulate->add_option("--ydot0", sim.ydot0);
  simulate->add_option("--dt", sim.dt);
  simulate->add_option("--tmax", sim.tmax);
  simulate->add_option("--out", sim.out, "Trajectory CSV (default: stdout)");
  simulate->add_flag("--require-settled", sim.require_settled,
                     "Exit 1 unless the run classifies as settled");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Basin-of-attraction sweep over (theta0, thetadot0)");
  sweep->add_option("--theta0", sw.theta0, "lo:hi:n");
  sweep->add_option("--thetadot0", sw.thetadot0, "lo:hi:n");
  sweep->add_option("--controllers", sw.controllers)
      ->check(CLI::IsMember({"both", "linear", "nonlinear"}));
  sweep->add_option("--params", sw.params)->check(CLI::ExistingFile);
  sweep->add_option("--gains", sw.gains);
  sweep->add_option("--dt", sw.dt);
  sweep->add_option("--tmax", sw.tmax);
  sweep->add_option("--out", sw.out, "Sweep CSV");
  sweep->add_flag("--serial", sw.serial, "Use the serial reference implementation");

  std::string suite = "all";
  matchkit::cli::VerifyOptions vopts;
  auto* verify = app.add_subcommand("verify", "Run residual checks and print them as JSON");
  verify->add_option("--suite", suite)
      ->check(CLI::IsMember({"matching", "energy", "characteristics", "quartic", "all"}));
  verify->add_option("--samples", vopts.samples);
  verify->add_option("--seed", vopts.seed);
  verify->add_option("--tol", vopts.tol);

  matchkit::PhysicalCart phys = matchkit::PhysicalCart::lab();
  auto* gains = app.add_subcommand("gains", "Scaled coupling b and validity report");
  gains->add_option("--M", phys.M);
  gains->add_option("--m", phys.m);
  gains->add_option("--l", phys.ell);
  gains->add_option("--I", phys.I);
  gains->add_option("--g", phys.g_grav);

  double pp_b = 0.188;
  std::string poles = "-5,-6,-2,-2";
  auto* poleplace = app.add_subcommand("poleplace", "Place the linearized closed-loop poles");
  poleplace->add_option("--b", pp_b);
  poleplace->add_option("--poles", poles, "Comma-separated; complex as a+bi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*sweep) return run_sweep(sw);
    if (*verify) return run_verify(suite, vopts);
    if (*gains) return run_gains(phys);
    if (*poleplace) return run_poleplace(pp_b, poles);
  } catch (const matchkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kInvalid;
}
