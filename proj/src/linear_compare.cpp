#include "matchkit/linear_compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "matchkit/errors.hpp"

namespace matchkit {

LinearGains paper_gains() { return LinearGains{1021.0, 115.8, 918.5, 158.2}; }

CartLinearization linearize_cart(double b) {
  if (!(b > 0.0 && b < 1.0)) throw InvalidParameters("b must lie in (0, 1)");
  const double d = 1.0 - b * b;
  CartLinearization lin;
  lin.A.setZero();
  lin.A(0, 2) = 1.0;
  lin.A(1, 3) = 1.0;
  lin.A(2, 0) = 1.0 / d;
  lin.A(3, 0) = -b / d;
  lin.B << 0.0, 0.0, -b / d, 1.0 / d;
  return lin;
}

Eigen::Matrix4d closed_loop_matrix(const CartLinearization& lin, const LinearGains& k) {
  return lin.A + lin.B * k.row();
}

namespace {

void check_conjugate_pairs(std::span<const std::complex<double>> poles) {
  std::vector<bool> used(poles.size(), false);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    const auto p = poles[i];
    const double scale = std::max(1.0, std::abs(p));
    if (std::abs(p.imag()) <= 1e-12 * scale || used[i]) continue;
    bool found = false;
    for (std::size_t j = i + 1; j < poles.size() && !found; ++j) {
      if (!used[j] && std::abs(poles[j] - std::conj(p)) <= 1e-12 * scale) {
        used[j] = true;
        found = true;
      }
    }
    if (!found) throw ComplexPolesNotConjugate("complex pole without its conjugate");
    used[i] = true;
  }
}

}  // namespace

LinearGains pole_place(double b, std::span<const std::complex<double>> poles) {
  if (poles.size() != 4) throw InvalidParameters("the cart needs exactly four poles");
  check_conjugate_pairs(poles);
  const CartLinearization lin = linearize_cart(b);

  // Desired characteristic polynomial, coefficients c[k] of s^k.
  std::vector<std::complex<double>> c{1.0};
  for (const auto& p : poles) {
    std::vector<std::complex<double>> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= p * c[k];
    }
    c = std::move(next);
  }

  Eigen::Matrix4d ctrb;
  Eigen::Vector4d col = lin.B;
  for (int k = 0; k < 4; ++k) {
    ctrb.col(k) = col;
    col = lin.A * col;
  }
  Eigen::FullPivLU<Eigen::Matrix4d> lu(ctrb);
  lu.setThreshold(1e-12);
  if (lu.rank() < 4) throw NotControllable("controllability matrix is singular");

  // Coefficient matching, equivalent to Ackermann's formula but without
  // forming C⁻¹φ(A). With d = 1 − b², det(sI − A − Bk) is
  //   s⁴ + ((b k_θ̇ − k_ẋ) s³ + (b k_θ − k_x − 1) s² + k_ẋ s + k_x) / d.
  const double d = 1.0 - b * b;
  LinearGains k;
  k.k_x = d * c[0].real();
  k.k_xdot = d * c[1].real();
  k.k_thetadot = (d * c[3].real() + k.k_xdot) / b;
  k.k_theta = (d * c[2].real() + k.k_x + 1.0) / b;
  return k;
}

namespace {

/// Diagonal similarity by powers of two that equalizes row and column
/// norms (Parlett and Reinsch); eigenvalues are unchanged.
Eigen::Matrix4d balance(Eigen::Matrix4d a) {
  bool converged = false;
  while (!converged) {
    converged = true;
    for (int i = 0; i < 4; ++i) {
      double col = 0.0, row = 0.0;
      for (int j = 0; j < 4; ++j) {
        if (j == i) continue;
        col += std::abs(a(j, i));
        row += std::abs(a(i, j));
      }
      if (col == 0.0 || row == 0.0) continue;
      double f = 1.0;
      const double total = col + row;
      while (col < row / 2.0) {
        col *= 2.0;
        row /= 2.0;
        f *= 2.0;
      }
      while (col >= row * 2.0) {
        col /= 2.0;
        row *= 2.0;
        f /= 2.0;
      }
      if (col + row < 0.95 * total) {
        converged = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
  return a;
}

}  // namespace

std::vector<std::complex<double>> closed_loop_eigenvalues(double b, const LinearGains& k) {
  const Eigen::EigenSolver<Eigen::Matrix4d> es(balance(closed_loop_matrix(linearize_cart(b), k)),
                                               false);
  std::vector<std::complex<double>> out(4);
  for (int i = 0; i < 4; ++i) out[i] = es.eigenvalues()[i];
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& z) {
    return a.real() < z.real() || (a.real() == z.real() && a.imag() < z.imag());
  });
  return out;
}

double pole_mismatch(std::span<const std::complex<double>> requested,
                     std::span<const std::complex<double>> achieved) {
  if (requested.size() != achieved.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(achieved.size(), false);
  double worst = 0.0;
  for (const auto& p : requested) {
    std::size_t best = achieved.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < achieved.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(achieved[j] - p);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

}  // namespace matchkit
