#include "bsq/inequality.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bsq::ineq;
using std::numbers::pi;

namespace {
const Certificate* find_part(const Certificate& c, const std::string& name) {
  if (c.name == name) return &c;
  for (const auto& p : c.parts)
    if (auto* f = find_part(p, name)) return f;
  return nullptr;
}
double half_line(const std::function<double(double)>& f) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto tail = [&](double u) {
    double v = f(1.0 / u) / (u * u);
    return std::isfinite(v) ? v : 0.0;
  };
  return ts.integrate(f, 0.0, 1.0) + ts.integrate(tail, 0.0, 1.0);
}
}  // namespace

TEST_CASE("exact polynomials and rational functions") {
  Poly one_r({1, 1});
  Poly sq = pow(one_r, 2);
  CHECK(sq == Poly({1, 2, 1}));
  CHECK(sq.degree() == 2);
  CHECK(sq(Q(1, 2)) == Q(9, 4));
  CHECK(sq.derivative() == Poly({2, 2}));
  CHECK((sq - sq).is_zero());
  CHECK((Q(3) * one_r) == Poly({3, 3}));
  RatFn a(Poly({-1, 0, 1}), Poly({-1, 1}));  // (R^2-1)/(R-1)
  CHECK(identity_residual(a, RatFn(one_r)).is_zero());
  RatFn inv(Poly::constant(1), one_r);
  CHECK(inv.derivative()(Q(1)) == Q(-1, 4));
  CHECK((inv * RatFn(one_r))(Q(7)) == Q(1));
  CHECK((inv + inv)(Q(1)) == Q(1));
  CHECK((inv / inv)(Q(5)) == Q(1));
}

TEST_CASE("interval arithmetic encloses") {
  Interval p = pi_interval();
  CHECK(p.lo <= Q(pi));
  CHECK(Q(pi) <= p.hi);
  CHECK(p.width() > 0);
  CHECK(static_cast<double>(p.width()) < 2e-15);
  Interval a(Q(-1), Q(2)), b(Q(3), Q(4));
  Interval m = a * b;
  CHECK(m.lo == Q(-4));
  CHECK(m.hi == Q(8));
  Interval d = a / b;
  CHECK(d.lo == Q(-1, 3));
  CHECK(d.hi == Q(2, 3));
  CHECK((a - a).lo == Q(-3));
}

TEST_CASE("c(alpha) quadrature") {
  for (double a : {0.001, 0.05, 0.1, 0.5}) CHECK(std::abs(c_quadrature(a) - 4.0 / (pi * (a + 2.0))) < 1e-13);
}

TEST_CASE("lemma one against the closed-form maximum") {
  const double kappa = 1.0;
  Certificate c = verify_lemma_one(kappa, {0.1, 0.5, 1.0, 2.0}, {0.01, 0.1});
  CHECK(all_verified(c));
  for (double lam : {0.1, 0.5, 1.0, 2.0}) {
    const Certificate* p = find_part(c, "lemma_one.lambda=" + std::string(lam == 0.1 ? "0.1" : lam == 0.5 ? "0.5" : lam == 1.0 ? "1" : "2"));
    REQUIRE(p);
    double fmax = kappa / (lam + kappa) * std::pow(lam / (lam + kappa), lam / kappa);
    CHECK(p->margin == doctest::Approx(kappa / lam - fmax).epsilon(1e-10));
  }
  CHECK_THROWS(verify_lemma_one(1.0, {3.0}, {0.1}));
  CHECK_THROWS(verify_lemma_one(0.0, {1.0}, {0.1}));
}

TEST_CASE("exact certificates") {
  Certificate d = verify_damping_coefficients();
  CHECK(d.status == Status::verified);
  CHECK(d.method == Method::exact_rational);
  CHECK(d.parts.size() >= 2);
  Certificate b = verify_D_bounds({0.01, 0.1, 1.0, 10.0, 100.0});
  CHECK(all_verified(b));
  for (const auto& p : b.parts) CHECK(p.margin >= 0.0);
  Certificate i = verify_integrals();
  CHECK(all_verified(i));
  Certificate k = verify_cancel_coe_and_cw_count(0.1);
  CHECK(all_verified(k));
  // same inputs, same certificate
  Certificate b2 = verify_D_bounds({0.01, 0.1, 1.0, 10.0, 100.0});
  CHECK(b2.margin == b.margin);
  CHECK(b2.witness == b.witness);
}

TEST_CASE("cancellation identity: separable oracles") {
  // Omega = sin2b R e^-R: Omega_* = (pi/4) R e^-R, L12~ = -(pi/4)(1 - e^-R),
  // int L12~^2 R^-2 dR = (pi^2/16) 2 ln 2.
  auto om2 = [](double R, double b) { return std::sin(2 * b) * R * std::exp(-R); };
  CancelSides s = cancellation_sides(om2, 2.0, 0.5);
  const double want = -pi * pi * std::log(2.0) / 16.0;
  CHECK(std::abs(s.rhs1 - want) < 1e-12);
  CHECK(std::abs(s.lhs1 - want) < 1e-12);
  CHECK(std::abs(s.lhs2 - s.rhs2) < 1e-12 * std::abs(s.lhs2));
  // Omega = sin2b R^2 e^-R at k = 3: L12~ = -(pi/4)(1 - (1+R) e^-R)
  auto om3 = [](double R, double b) { return std::sin(2 * b) * R * R * std::exp(-R); };
  auto lt = [](double R) { return -pi / 4 * (-std::expm1(-R) - R * std::exp(-R)); };
  double n3 = half_line([&](double R) { return R > 1e-100 && R < 1e100 ? lt(R) * lt(R) / (R * R * R) : 0.0; });
  CancelSides t = cancellation_sides(om3, 3.0, 1.0);
  CHECK(std::abs(t.rhs1 + n3) < 1e-10 * n3);
  CHECK(std::abs(t.lhs1 - t.rhs1) < 1e-10 * n3);
  CHECK(std::abs(t.lhs2 - t.rhs2) < 1e-10 * std::abs(t.lhs2));
  CancelSides z = cancellation_sides([](double, double) { return 0.0; }, 2.0, 0.5);
  CHECK(z.lhs1 == 0.0);
  CHECK(z.rhs1 == 0.0);
}

TEST_CASE("cancellation lemma on trial fields") {
  Certificate c = verify_cancellation_lemma(2.0, 3, 1, 0.1);
  CHECK(c.status == Status::verified);
  CHECK(c.margin > 0.0);
  CHECK(verify_cancellation_lemma(2.0, 3, 1, 0.1).witness == c.witness);
  // an impossible tolerance must fail and say where
  Certificate f = verify_cancellation_lemma(2.0, 1, 1, 0.1, -1.0);
  CHECK(f.status == Status::failed);
  CHECK(f.witness.find("field seed") != std::string::npos);
  CHECK_THROWS(verify_cancellation_lemma(5.0, 1, 1, 0.1));
  TrialVorticity v = trial_vorticity(7);
  CHECK(v(1e-4, 0.3) / v(2e-4, 0.3) == doctest::Approx(0.25).epsilon(1e-3));  // vanishes like R^2
  CHECK(trial_vorticity(7).a == v.a);
}

TEST_CASE("G correction") {
  const double a = 0.1;
  auto om = [](double R) { return R * std::exp(-R); };
  for (double R : {0.1, 1.0, 10.0}) CHECK(G_split(om, a, R) == doctest::Approx(G_double(om, a, R)).epsilon(1e-9));
  // ODE in x = ln R by central differences
  const double R = 1.5, h = 1e-3;
  auto G = [&](double x) { return G_split(om, a, std::exp(x)); };
  double x = std::log(R);
  double g1 = (G(x - 2 * h) - 8 * G(x - h) + 8 * G(x + h) - G(x + 2 * h)) / (12 * h);
  double g2 = (-G(x - 2 * h) + 16 * G(x - h) - 30 * G(x) + 16 * G(x + h) - G(x + 2 * h)) / (12 * h * h);
  CHECK(a * a * g2 + 4 * a * g1 == doctest::Approx(4 / pi * om(R)).epsilon(1e-6));
  CHECK(std::abs(G_split(om, a, 1e6)) < 1e-4);
  Certificate c = verify_G_correction(a);
  CHECK(all_verified(c));
  CHECK_THROWS(verify_G_correction(1.5));
}
