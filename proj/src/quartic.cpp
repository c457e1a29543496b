#include "matchkit/quartic.hpp"

#include <cmath>
#include <sstream>

#include "matchkit/errors.hpp"

namespace matchkit {

double potential_v(double x, double y) {
  return -1.5 * x * x * x * x + 45.0 * x * x * y * y + 32.0 * x * y * y * y;
}

Eigen::Vector2d potential_v_gradient(double x, double y) {
  return {-6.0 * x * x * x + 90.0 * x * y * y + 32.0 * y * y * y,
          90.0 * x * x * y + 96.0 * x * y * y};
}

double vhat_quartic(double x, double y) {
  const double a = x * x - 3.0 * x * y;
  const double b = x * x - 4.0 * x * y - 2.0 * y * y;
  return a * a + b * b;
}

Eigen::Vector2d vhat_quartic_gradient(double x, double y) {
  const double a = x * x - 3.0 * x * y;
  const double b = x * x - 4.0 * x * y - 2.0 * y * y;
  return {2.0 * a * (2.0 * x - 3.0 * y) + 2.0 * b * (2.0 * x - 4.0 * y),
          2.0 * a * (-3.0 * x) + 2.0 * b * (-4.0 * x - 4.0 * y)};
}

Eigen::Matrix2d quartic_ghat() {
  Eigen::Matrix2d g;
  g << 2.0, -1.0, -1.0, 1.0;
  return g;
}

double control_u_quartic(const QuarticState& s) {
  const Eigen::Vector2d dv = potential_v_gradient(s.x, s.y);
  const Eigen::Vector2d dvh = vhat_quartic_gradient(s.x, s.y);
  return dv.y() - (dvh.x() + 2.0 * dvh.y()) - (s.y_dot - s.x_dot);
}

QuarticState quartic_dynamics(const QuarticState& s, double u) {
  const Eigen::Vector2d dv = potential_v_gradient(s.x, s.y);
  return QuarticState{s.x_dot, s.y_dot, -dv.x(), -dv.y() + u};
}

double hhat_quartic(const QuarticState& s) {
  const Eigen::Vector2d v(s.x_dot, s.y_dot);
  return 0.5 * v.dot(quartic_ghat() * v) + vhat_quartic(s.x, s.y);
}

double hhat_quartic_rate(const QuarticState& s) {
  const double d = s.y_dot - s.x_dot;
  return -d * d;
}

double blowup_time(double eps) {
  if (!(eps > 0.0)) throw InvalidParameters("eps must be positive");
  return 1.0 / (std::sqrt(3.0) * eps);
}

QuarticState blowup_solution(double eps, double t) {
  if (t >= blowup_time(eps)) {
    std::ostringstream msg;
    msg << "t = " << t << " is at or past the blow-up time " << blowup_time(eps);
    throw PastBlowup(msg.str());
  }
  const double x = 1.0 / (1.0 / eps - std::sqrt(3.0) * t);
  return QuarticState{x, 0.0, std::sqrt(3.0) * x * x, 0.0};
}

int linearized_controllability_rank() {
  // State (x, y, ẋ, ẏ); the Hessian of V vanishes at the origin.
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  a(0, 2) = 1.0;
  a(1, 3) = 1.0;
  const Eigen::Vector4d b(0.0, 0.0, 0.0, 1.0);
  Eigen::Matrix4d c;
  Eigen::Vector4d col = b;
  for (int k = 0; k < 4; ++k) {
    c.col(k) = col;
    col = a * col;
  }
  Eigen::FullPivLU<Eigen::Matrix4d> lu(c);
  return static_cast<int>(lu.rank());
}

SystemPair quartic_system_pair() {
  MetricField flat(
      2, [](const Vec&) { return Mat(Mat::Identity(2, 2)); },
      [](const Vec&) { return MetricPartials{Mat::Zero(2, 2), Mat::Zero(2, 2)}; });
  MetricField ghat(
      2, [](const Vec&) { return Mat(quartic_ghat()); },
      [](const Vec&) { return MetricPartials{Mat::Zero(2, 2), Mat::Zero(2, 2)}; });
  ScalarField v([](const Vec& q) { return potential_v(q[0], q[1]); },
                [](const Vec& q) { return Vec(potential_v_gradient(q[0], q[1])); });
  ScalarField vhat([](const Vec& q) { return vhat_quartic(q[0], q[1]); },
                   [](const Vec& q) { return Vec(vhat_quartic_gradient(q[0], q[1])); });
  VelocityMap chat(
      [](const Vec&, const Vec& vel) {
        Vec out(2);
        out << 0.0, vel[1] - vel[0];
        return out;
      },
      true);
  ProjectionField p(
      [](const Vec&) {
        Mat m = Mat::Zero(2, 2);
        m(0, 0) = 1.0;
        return m;
      },
      flat);
  return SystemPair{MechanicalSystem{flat, v, VelocityMap::zero(2)},
                    MechanicalSystem{ghat, vhat, chat}, p};
}

LambdaSection quartic_lambda_section() {
  return LambdaSection{VectorField::constant(Vec::Unit(2, 0)),
                       VectorField::constant(Vec::Ones(2))};
}

}  // namespace matchkit
