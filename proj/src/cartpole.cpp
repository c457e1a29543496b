#include "matchkit/cartpole.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "matchkit/errors.hpp"

namespace matchkit {

PhysicalCart PhysicalCart::lab() { return PhysicalCart{5.02, 0.454, 0.425, 0.11, 9.81}; }

void PhysicalCart::validate() const {
  if (!(M > 0.0) || !(m > 0.0) || !(ell > 0.0) || !(I >= 0.0) || !(g_grav > 0.0))
    throw InvalidParameters("physical cart requires M, m, l, g > 0 and I >= 0");
}

double nondimensionalize(const PhysicalCart& p) {
  if (!(p.m > 0.0) || !(p.ell > 0.0) || !(p.M >= 0.0) || !(p.I >= 0.0))
    throw InvalidParameters("physical cart requires m, l > 0 and M, I >= 0");
  const double b = p.m * p.ell / std::sqrt((p.M + p.m) * (p.m * p.ell * p.ell + p.I));
  if (!(b > 0.0 && b < 1.0)) {
    std::ostringstream msg;
    msg << "coupling b = " << b << " is outside (0, 1)";
    throw InvalidParameters(msg.str());
  }
  p.validate();
  return b;
}

CartScales cart_scales(const PhysicalCart& p) {
  nondimensionalize(p);
  const double inertia = p.m * p.ell * p.ell + p.I;
  return CartScales{std::sqrt(inertia / (p.M + p.m)),
                    std::sqrt(inertia / (p.m * p.g_grav * p.ell)),
                    p.m * p.g_grav * p.ell};
}

namespace {

double parse_number(std::string_view text, const std::string& spec) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty())
    throw InvalidParameters("malformed number in phi spec '" + spec + "'");
  return value;
}

}  // namespace

PhiFunction PhiFunction::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw InvalidParameters("phi spec '" + spec + "' must be const:c or poly:a,b,c");
  const std::string kind = spec.substr(0, colon);
  const std::string_view rest = std::string_view(spec).substr(colon + 1);

  PhiFunction phi;
  phi.name_ = spec;
  if (kind == "const") {
    phi.a_ = parse_number(rest, spec);
    if (!(phi.a_ >= 0.0) || !std::isfinite(phi.a_))
      throw InvalidParameters("phi constant must be finite and non-negative");
    return phi;
  }
  if (kind == "poly") {
    std::vector<double> coeffs;
    std::size_t start = 0;
    while (start <= rest.size()) {
      const auto comma = rest.find(',', start);
      const auto end = comma == std::string_view::npos ? rest.size() : comma;
      coeffs.push_back(parse_number(rest.substr(start, end - start), spec));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (coeffs.size() != 3)
      throw InvalidParameters("poly phi takes exactly three coefficients a,b,c");
    phi.a_ = coeffs[0];
    phi.b_ = coeffs[1];
    phi.c_ = coeffs[2];
    if (!(phi.a_ > 0.0) || !(phi.b_ >= 0.0) || !(phi.c_ >= 0.0))
      throw InvalidParameters("poly phi needs a > 0 and b, c >= 0");
    return phi;
  }
  throw InvalidParameters("unknown phi kind '" + kind + "'");
}

PhiFunction PhiFunction::constant(double c) {
  std::ostringstream name;
  name << "const:" << c;
  return parse(name.str());
}

CartpoleController CartpoleController::paper_defaults(double b) {
  CartpoleController c;
  c.b = b;
  return c;
}

void CartpoleController::validate(bool allow_conservative) const {
  if (!(b > 0.0 && b < 1.0)) throw InvalidParameters("b must lie in (0, 1)");
  if (!(r > 0.0)) throw InvalidParameters("r must be positive");
  const ValidityReport v = validity(*this);
  if (!v.ok) {
    std::ostringstream msg;
    msg << "controller violates mu0 > 0, sigma0 < 0, w1 > 0, cone bound < 1 (bound = "
        << v.cos2_bound << ")";
    throw InvalidParameters(msg.str());
  }
  if (!allow_conservative && !(phi.lower_bound() > 0.0))
    throw InvalidParameters("phi must be strictly positive");
}

ValidityReport validity(const CartpoleController& c) {
  ValidityReport report;
  report.cos2_bound =
      (c.sigma0 * c.sigma0 * c.r + c.b * c.mu0) / (-c.sigma0 * c.b * c.mu0 * c.r);
  report.ok = c.mu0 > 0.0 && c.sigma0 < 0.0 && c.w1 > 0.0 && c.r > 0.0 && c.b > 0.0 &&
              std::isfinite(report.cos2_bound) && report.cos2_bound < 1.0;
  report.theta_max = report.ok ? std::acos(std::sqrt(std::max(report.cos2_bound, 0.0))) : 0.0;
  return report;
}

double det_g(double b, double theta) {
  const double c = std::cos(theta);
  return 1.0 - b * b * c * c;
}

Eigen::Matrix2d g_cart(double b, double theta) {
  const double bc = b * std::cos(theta);
  Eigen::Matrix2d g;
  g << 1.0, bc, bc, 1.0;
  return g;
}

Eigen::Matrix2d ghat_cart(const CartpoleController& k, double theta) {
  const double c = std::cos(theta);
  const double g12 = -(k.sigma0 / k.mu0) * k.r * c;
  Eigen::Matrix2d g;
  g << 1.0 / k.sigma0 + k.r * c * c, g12, g12,
      k.b / k.mu0 + k.sigma0 * k.sigma0 * k.r / (k.mu0 * k.mu0);
  return g;
}

double det_ghat(const CartpoleController& k, double theta) {
  const double c = std::cos(theta);
  return k.b / (k.sigma0 * k.mu0) + k.b * k.r / k.mu0 * c * c +
         k.sigma0 * k.r / (k.mu0 * k.mu0);
}

double vhat_cart(const CartpoleController& k, double theta, double x) {
  const double z = x - k.mu0 / k.sigma0 * std::sin(theta);
  return (std::cos(theta) - 1.0) / k.sigma0 + 0.5 * k.w1 * z * z;
}

Eigen::Vector2d vhat_cart_differential(const CartpoleController& k, double theta,
                                       double x) {
  const double z = x - k.mu0 / k.sigma0 * std::sin(theta);
  return {-std::sin(theta) / k.sigma0 - k.w1 * z * k.mu0 / k.sigma0 * std::cos(theta),
          k.w1 * z};
}

Eigen::Matrix2d vhat_hessian_origin(const CartpoleController& k) {
  const double ratio = k.mu0 / k.sigma0;
  Eigen::Matrix2d h;
  h << ratio * ratio * k.w1 - 1.0 / k.sigma0, -ratio * k.w1, -ratio * k.w1, k.w1;
  return h;
}

Eigen::Vector2d chat_cart(const CartpoleController& k, const CartState& s) {
  const double c = std::cos(s.theta);
  const double gain =
      k.phi(s.theta, s.x) * (k.mu0 * c * s.theta_dot - k.sigma0 * s.x_dot);
  return {gain * k.b * c, -gain};
}

double control_u(const CartpoleController& k, const CartState& s) {
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  const double dg = 1.0 - k.b * k.b * c * c;
  const double dh = det_ghat(k, s.theta);
  if (!(std::abs(dh) >= 1e-12)) throw DegenerateModelMetric("det ghat vanishes");
  return (k.b + k.r * dg / (k.mu0 * dh)) * (c * sn - sn * s.theta_dot * s.theta_dot) -
         k.w1 * dg / (k.sigma0 * dh) * (s.x - k.mu0 / k.sigma0 * sn) +
         dg * k.phi(s.theta, s.x) * (k.mu0 * c * s.theta_dot - k.sigma0 * s.x_dot);
}

double hhat(const CartpoleController& k, const CartState& s) {
  const Eigen::Vector2d v(s.theta_dot, s.x_dot);
  return 0.5 * v.dot(ghat_cart(k, s.theta) * v) + vhat_cart(k, s.theta, s.x);
}

double dhhat_dt_formula(const CartpoleController& k, const CartState& s) {
  const double mode = k.mu0 * std::cos(s.theta) * s.theta_dot - k.sigma0 * s.x_dot;
  return -det_ghat(k, s.theta) * k.phi(s.theta, s.x) * mode * mode;
}

CartState cart_dynamics(double b, const CartState& s, double u) {
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  const double bc = b * c;
  const double dg = 1.0 - bc * bc;
  const double r0 = sn;
  const double r1 = u + b * sn * s.theta_dot * s.theta_dot;
  return CartState{s.theta_dot, s.x_dot, (r0 - bc * r1) / dg, (r1 - bc * r0) / dg};
}

CartState closed_loop(const CartpoleController& k, const CartState& s) {
  return cart_dynamics(k.b, s, control_u(k, s));
}

double cart_energy(double b, const CartState& s) {
  const Eigen::Vector2d v(s.theta_dot, s.x_dot);
  return 0.5 * v.dot(g_cart(b, s.theta) * v) + std::cos(s.theta);
}

MetricField cart_metric(double b) {
  return MetricField(
      2, [b](const Vec& q) { return Mat(g_cart(b, q[0])); },
      [b](const Vec& q) {
        const double d = -b * std::sin(q[0]);
        Mat dth(2, 2);
        dth << 0.0, d, d, 0.0;
        return MetricPartials{dth, Mat::Zero(2, 2)};
      });
}

SystemPair cart_system_pair(const CartpoleController& k) {
  const double b = k.b;
  MetricField g = cart_metric(b);
  ScalarField v([](const Vec& q) { return std::cos(q[0]); },
                [](const Vec& q) {
                  Vec d(2);
                  d << -std::sin(q[0]), 0.0;
                  return d;
                });

  const double bound = validity(k).cos2_bound;
  MetricField ghat(
      2, [k](const Vec& q) { return Mat(ghat_cart(k, q[0])); },
      [k](const Vec& q) {
        const double c = std::cos(q[0]);
        const double sn = std::sin(q[0]);
        const double d12 = (k.sigma0 / k.mu0) * k.r * sn;
        Mat dth(2, 2);
        dth << -2.0 * k.r * c * sn, d12, d12, 0.0;
        return MetricPartials{dth, Mat::Zero(2, 2)};
      },
      1e-9,
      [bound](const Vec& q) {
        const double c = std::cos(q[0]);
        return c * c > bound;
      });
  ScalarField vhat([k](const Vec& q) { return vhat_cart(k, q[0], q[1]); },
                   [k](const Vec& q) { return Vec(vhat_cart_differential(k, q[0], q[1])); });
  VelocityMap chat(
      [k](const Vec& q, const Vec& vel) {
        return Vec(chat_cart(k, CartState{q[0], q[1], vel[0], vel[1]}));
      },
      true);

  ProjectionField p(
      [b](const Vec& q) {
        Mat m(2, 2);
        m << 1.0, b * std::cos(q[0]), 0.0, 0.0;
        return m;
      },
      g);

  return SystemPair{MechanicalSystem{g, v, VelocityMap::zero(2)},
                    MechanicalSystem{ghat, vhat, chat}, p};
}

}  // namespace matchkit
