#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "matchkit/errors.hpp"
#include "matchkit/matching.hpp"
#include "matchkit/quadrature.hpp"

namespace matchkit {

double CharacteristicGrid::theta(int i) const {
  if (theta_count == 1) return theta_lo;
  return theta_lo + (theta_hi - theta_lo) * i / (theta_count - 1);
}

double CharacteristicGrid::x(int j) const {
  if (x_count == 1) return x_lo;
  return x_lo + (x_hi - x_lo) * j / (x_count - 1);
}

namespace {

struct Cell {
  double ghat11, ghat12, ghat22, vhat, sigma, mu;
  double richardson;
};

void check_inside(const CharacteristicData& data, double theta) {
  if (!(std::abs(theta) < data.theta_limit)) {
    std::ostringstream msg;
    msg << "characteristic reached theta = " << theta << " outside |theta| < "
        << data.theta_limit;
    throw CharacteristicEscape(msg.str());
  }
}

/// Flow time along λPX from Σ to the level set {θ = theta}.
double flow_time(const CartSection& s, double theta) {
  if (theta == 0.0) return 0.0;
  if (s.constant_sigma) return theta / s.sigma(0.0);
  try {
    return adaptive_simpson([&s](double th) { return 1.0 / s.sigma(th); }, 0.0, theta);
  } catch (const QuadratureFailure&) {
    throw CharacteristicEscape("sigma vanishes between the surface and the grid point");
  }
}

/// The λPX flow from Σ to {θ = θ_i} for one grid row. The coefficients of
/// the transport equations depend on θ alone, so every characteristic ending
/// on the row is an x-translate of the same curve and ĝ₁₁ along it is an
/// affine function of its initial value: ĝ₁₁ = alpha·h(a) + beta.
struct RowFlow {
  double displacement = 0.0;  ///< x − a
  double alpha = 1.0;
  double beta = 0.0;
  double dvhat = 0.0;  ///< V̂ − w(a)
};

RowFlow integrate_row(const CharacteristicData& data, double t, int steps) {
  const CartSection& s = data.section;
  // θ, x − a, alpha, beta, V̂ − w(a)
  using State = std::array<double, 5>;
  auto rhs = [&](const State& y) {
    const double th = y[0];
    check_inside(data, th);
    const double sig = s.sigma(th);
    const double m = s.mu(th);
    const double dm = s.dmu(th);
    // dĝ₁₁/dt = c ĝ₁₁ + d after eliminating ĝ₁₂ = (1 − σĝ₁₁)/μ from the
    // ĝ-equation with Z = ∂/∂θ.
    const double c = -2.0 * s.dsigma(th) + 2.0 * dm * sig / m;
    const double d = -2.0 * dm / m;
    return State{sig, m, c * y[2], c * y[3] + d, -std::sin(th)};
  };
  State y{0.0, 0.0, 1.0, 0.0, 0.0};
  const double h = t / steps;
  auto axpy = [](const State& u, double c, const State& v) {
    State w;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = u[i] + c * v[i];
    return w;
  };
  for (int n = 0; n < steps; ++n) {
    const State k1 = rhs(y);
    const State k2 = rhs(axpy(y, 0.5 * h, k1));
    const State k3 = rhs(axpy(y, 0.5 * h, k2));
    const State k4 = rhs(axpy(y, h, k3));
    for (std::size_t c = 0; c < y.size(); ++c)
      y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
  }
  return RowFlow{y[1], y[2], y[3], y[4]};
}

struct Row {
  double theta;
  RowFlow fine, coarse;
};

Row solve_row(const CharacteristicData& data, double theta) {
  check_inside(data, theta);
  const double t = flow_time(data.section, theta);
  if (!std::isfinite(t)) throw CharacteristicEscape("flow time is not finite");
  // Even step count so the 2Δt comparison run lands on the same end point.
  const int steps = 2 * static_cast<int>(std::ceil(std::abs(t) / (2.0 * data.dt)));
  Row row{theta, {}, {}};
  if (steps > 0) {
    row.fine = integrate_row(data, t, steps);
    row.coarse = integrate_row(data, t, steps / 2);
  }
  if (data.section.mu(theta) == 0.0)
    throw CharacteristicEscape("mu vanishes; ghat12 is undetermined");
  return row;
}

Cell solve_cell(const CharacteristicData& data, double b, const Row& row, double x) {
  const CartSection& s = data.section;
  auto evaluate = [&](const RowFlow& f) {
    const double a = x - f.displacement;
    return std::array<double, 2>{f.alpha * data.h(a) + f.beta, data.w(a) + f.dvhat};
  };
  const auto fine = evaluate(row.fine);
  const auto coarse = evaluate(row.coarse);

  Cell cell{};
  cell.richardson =
      std::max(std::abs(fine[0] - coarse[0]), std::abs(fine[1] - coarse[1])) / 15.0;
  cell.sigma = s.sigma(row.theta);
  cell.mu = s.mu(row.theta);
  cell.ghat11 = fine[0];
  cell.vhat = fine[1];
  cell.ghat12 = (1.0 - cell.sigma * cell.ghat11) / cell.mu;
  cell.ghat22 = (b * std::cos(row.theta) - cell.sigma * cell.ghat12) / cell.mu;
  return cell;
}

void validate(const CharacteristicData& data, const CharacteristicGrid& grid) {
  if (!data.section.sigma || !data.section.mu || !data.section.dsigma || !data.section.dmu)
    throw InvalidParameters("characteristic section is incomplete");
  if (!data.h || !data.w) throw InvalidParameters("initial data h and w are required");
  if (data.section.sigma(0.0) == 0.0)
    throw InvalidParameters("sigma(0) = 0: the surface theta = 0 is characteristic");
  if (!(data.dt > 0.0)) throw InvalidParameters("dt must be positive");
  if (grid.theta_count < 1 || grid.x_count < 1)
    throw InvalidParameters("grid counts must be positive");
}

CharacteristicSolution allocate(const CharacteristicGrid& grid) {
  CharacteristicSolution sol;
  sol.grid = grid;
  const std::size_t n = grid.size();
  sol.ghat11.resize(n);
  sol.ghat12.resize(n);
  sol.ghat22.resize(n);
  sol.vhat.resize(n);
  sol.sigma.resize(n);
  sol.mu.resize(n);
  return sol;
}

void store(CharacteristicSolution& sol, std::size_t k, const Cell& c) {
  sol.ghat11[k] = c.ghat11;
  sol.ghat12[k] = c.ghat12;
  sol.ghat22[k] = c.ghat22;
  sol.vhat[k] = c.vhat;
  sol.sigma[k] = c.sigma;
  sol.mu[k] = c.mu;
}

}  // namespace

CharacteristicSolution solve_characteristics_serial(const CharacteristicData& data,
                                                    double b,
                                                    const CharacteristicGrid& grid) {
  validate(data, grid);
  CharacteristicSolution sol = allocate(grid);
  for (int i = 0; i < grid.theta_count; ++i) {
    const Row row = solve_row(data, grid.theta(i));
    for (int j = 0; j < grid.x_count; ++j) {
      const Cell c = solve_cell(data, b, row, grid.x(j));
      store(sol, sol.index(i, j), c);
      sol.richardson_estimate = std::max(sol.richardson_estimate, c.richardson);
    }
  }
  return sol;
}

CharacteristicSolution solve_characteristics(const CharacteristicData& data, double b,
                                             const CharacteristicGrid& grid) {
  validate(data, grid);
  CharacteristicSolution sol = allocate(grid);
  const int rows = grid.theta_count;
  std::vector<double> richardson(grid.size(), 0.0);
  std::vector<std::string> failures(static_cast<std::size_t>(rows));

#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < rows; ++i) {
    try {
      const Row row = solve_row(data, grid.theta(i));
      for (int j = 0; j < grid.x_count; ++j) {
        const std::size_t k = sol.index(i, j);
        const Cell c = solve_cell(data, b, row, grid.x(j));
        store(sol, k, c);
        richardson[k] = c.richardson;
      }
    } catch (const CharacteristicEscape& e) {
      failures[static_cast<std::size_t>(i)] = e.what();
    }
  }
  // Report the first failing row, as the serial sweep would.
  for (const auto& f : failures)
    if (!f.empty()) throw CharacteristicEscape(f);
  for (double r : richardson) sol.richardson_estimate = std::max(sol.richardson_estimate, r);
  return sol;
}

void write_characteristics_csv(std::ostream& out, const CharacteristicSolution& sol) {
  out << "theta,x,ghat11,ghat12,ghat22,vhat\n";
  char line[256];
  for (int i = 0; i < sol.grid.theta_count; ++i)
    for (int j = 0; j < sol.grid.x_count; ++j) {
      const std::size_t k = sol.index(i, j);
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    sol.grid.theta(i), sol.grid.x(j), sol.ghat11[k], sol.ghat12[k],
                    sol.ghat22[k], sol.vhat[k]);
      out << line;
    }
}

}  // namespace matchkit
