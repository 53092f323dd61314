#include "bsq/toy.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bsq::toy;
using std::numbers::pi;

namespace {
// Polar form: J = int_0^{pi/2} cos p sin p int_0^inf (d1 theta0)(mu r cos p, r sin p / mu) dr / r dp.
double J_polar(double mu, const Theta0& th) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto inner = [&](double p) {
    double c = std::cos(p), s = std::sin(p);
    double rmax = std::min(c > 0 ? 1.0 / (mu * c) : 1e300, s > 0 ? mu / s : 1e300);  // support edge
    auto f = [&](double r) { return r > 0 ? th.d1theta(mu * r * c, r * s / mu) / r : 0.0; };
    return c * s * GK::integrate(f, 0.0, rmax, 15, 1e-13);
  };
  return GK::integrate(inner, 0.0, pi / 2, 15, 1e-12);
}
}  // namespace

TEST_CASE("bump") {
  CHECK(bump(0.0) == 1.0);
  CHECK(bump(1.0) == 0.0);
  CHECK(bump(-1.5) == 0.0);
  const double h = 1e-5, x = 0.4;
  CHECK(bump_d1(x) == doctest::Approx((bump(x + h) - bump(x - h)) / (2 * h)).epsilon(1e-8));
  CHECK(bump_d2(x) == doctest::Approx((bump_d1(x + h) - bump_d1(x - h)) / (2 * h)).epsilon(1e-7));
}

TEST_CASE("samples") {
  Theta0 h = holder_sample(0.1);
  CHECK(h.holder_exp == 0.1);
  CHECK(h.holder > 0.0);
  // odd in x2, even in x1
  CHECK(h.theta(0.3, -0.2) == doctest::Approx(-h.theta(0.3, 0.2)));
  CHECK(h.theta(-0.3, 0.2) == doctest::Approx(h.theta(0.3, 0.2)));
  const double e = 1e-6;
  CHECK(h.d1theta(0.4, 0.3) == doctest::Approx((h.theta(0.4 + e, 0.3) - h.theta(0.4 - e, 0.3)) / (2 * e)).epsilon(1e-7));
  for (double x1 : {0.01, 0.2, 0.6})
    for (double x2 : {0.1, 0.5})
      CHECK(std::abs(h.theta(x1, x2) - h.theta(0, x2)) <= h.holder * std::pow(x1, h.holder_exp) * x2 * (1 + 1e-12));
  Theta0 z = zero_sample();
  CHECK(z.theta(0.2, 0.3) == 0.0);
}

TEST_CASE("J integral") {
  Theta0 h = holder_sample(0.1);
  CHECK(J_integral(1.0, zero_sample()) == 0.0);
  for (double mu : {1.0, 2.0}) CHECK(J_integral(mu, h) == doctest::Approx(J_polar(mu, h)).epsilon(1e-7));
  CHECK(J_integral(1.0, smooth_sample()) == doctest::Approx(J_polar(1.0, smooth_sample())).epsilon(1e-7));
  for (double mu : {1.0, 4.0}) {
    JParts p = J_parts(mu, h);
    CHECK(p.J1 + p.J2 == doctest::Approx(J_integral(mu, h)).epsilon(1e-6));
  }
  // J decays at least like mu^-2 along mu = 1, 2, 4, 8 (least-squares slope in log-log)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double mu : {1.0, 2.0, 4.0, 8.0}) {
    double x = std::log(mu), y = std::log(std::abs(J_integral(mu, h)));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  CHECK((4 * sxy - sx * sy) / (4 * sxx - sx * sx) <= -1.9);
}

TEST_CASE("K constant") {
  Theta0 h = holder_sample(0.1);
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto f = [](double z) { return std::abs(z * z * (z * z - 3)) / std::pow(1 + z * z, 3); };
  double C = GK::integrate(f, 0.0, std::sqrt(3.0), 10, 1e-14) +
             GK::integrate(f, std::sqrt(3.0), std::numeric_limits<double>::infinity(), 10, 1e-14);
  CHECK(K_constant(h) == doctest::Approx(4 * h.holder * (pi / 4 + C / h.holder_exp)).epsilon(1e-10));
}

TEST_CASE("toy evolution") {
  Theta0 h = holder_sample(0.1);
  ToyOptions z;
  z.T = 5;
  z.zero_coupling = true;
  ToyTrajectory tz = evolve_toy(h, z);
  for (const auto& p : tz.points) {
    CHECK(p.mu == 1.0);
    CHECK(p.I == doctest::Approx(p.t).epsilon(1e-12));
  }
  ToyOptions o;
  o.T = 10;
  double last[3];
  int k = 0;
  for (double dt : {0.2, 0.1, 0.05}) {
    o.dt = dt;
    ToyTrajectory tr = evolve_toy(h, o);
    REQUIRE_FALSE(tr.aborted);
    last[k++] = tr.points.back().mu;
    if (dt == 0.1) {
      CHECK(trapezoid_I_error(tr) < 1e-3);
      CHECK(max_K_ratio(tr) <= K_constant(h));
      // points well inside the support of the stretched profile; near the edge the time difference dominates
      CHECK(omega_residual(tr, h, {{0.01, 0.3}, {0.02, 0.1}, {0.03, 0.5}}) < 1e-4);
      for (std::size_t i = 1; i < tr.points.size(); ++i) CHECK(tr.points[i].I > tr.points[i - 1].I);
    }
  }
  // RK4: successive differences shrink by about 2^4
  double ratio = (last[0] - last[1]) / (last[1] - last[2]);
  CHECK(ratio > 10.0);
  CHECK(ratio < 20.0);
  ToyOptions bad;
  bad.dt = -1;
  CHECK_THROWS(evolve_toy(h, bad));
  CHECK_THROWS(holder_sample(0.0));
}
