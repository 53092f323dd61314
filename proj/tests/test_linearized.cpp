#include "bsq/dynamics.hpp"
#include "bsq/linearized.hpp"

#include <doctest.h>

#include <cmath>

using namespace bsq;

namespace {
Grid make(double alpha, int nr = 64, int nb = 48) {
  GridConfig c;
  c.alpha = alpha;
  c.n_r = nr;
  c.n_beta = nb;
  return build_grid(c);
}
// f = R^2/(1+R)^3 times a, R f' = R^2 (2-R)/(1+R)^4.
Field rad(const Grid& g, bool deriv) {
  Eigen::VectorXd v(g.nr());
  for (int i = 0; i < g.nr(); ++i) {
    double R = g.r[i];
    v[i] = deriv ? R * R * (2 - R) / std::pow(1 + R, 4) : R * R / std::pow(1 + R, 3);
  }
  return radial_field(g, v);
}
Field ang(const Grid& g, double (*fn)(double)) {
  Eigen::VectorXd v(g.nb());
  for (int j = 0; j < g.nb(); ++j) v[j] = fn(g.beta[j]);
  return angular_field(g, v);
}
Field w1(const Grid& g) { return radial_field(g, (1.0 / (1.0 + g.r.array())).matrix()); }
LinState trial(const Grid& g, std::uint64_t s) {
  return {random_trial_field(g, 3 * s + 1), random_trial_field(g, 3 * s + 2), random_trial_field(g, 3 * s + 3)};
}
double rel(const Field& a, const Field& b) { return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff(); }
}  // namespace

TEST_CASE("local operators on closed-form fields") {
  // D_b is a finite-difference stencil in u: check the error and its decay under refinement
  double e10[2];
  for (int k = 0; k < 2; ++k) {
    Grid g = make(0.1, 96, k ? 96 : 48);
    Field f = rad(g, false), rf = rad(g, true);
    Field s2 = ang(g, [](double b) { return std::sin(2 * b); });
    Field c2 = ang(g, [](double b) { return 2 * std::sin(2 * b) * std::cos(2 * b); });  // D_b = sin2b d/db
    Field one = Field::Ones(g.nr(), g.nb()), w = w1(g);
    LinState s = zero_triple(g);
    s.omega = f.cwiseProduct(s2);
    s.eta = f;
    Field want = -rf.cwiseProduct(s2) - 3.0 * w.cwiseProduct(f).cwiseProduct(c2) - s.omega + f;
    e10[k] = rel(apply_local(g, LocalOp::L10, s), want);
    // radial-only fields see no angular stencil
    Field want2 = -rf + (3.0 * w - 2.0 * one).cwiseProduct(f);
    CHECK(rel(apply_local(g, LocalOp::L20, s), want2) < 1e-12);
    s.xi = f;
    Field want3 = -rf - (3.0 * w + 2.0 * one).cwiseProduct(f);
    CHECK(rel(apply_local(g, LocalOp::L30, s), want3) < 1e-12);
  }
  CHECK(e10[0] < 1e-4);
  CHECK(e10[1] < e10[0] / 16.0);
}

TEST_CASE("full operator: zero in, zero out; linear") {
  Grid g = make(0.1);
  ProfileTriple p = approx_steady_state(g);
  CHECK(max_abs(apply_linear(g, zero_triple(g), p)) == 0.0);
  LinState a = trial(g, 1), b = trial(g, 2);
  LinState lhs = apply_linear(g, 2.0 * a + b, p);
  LinState rhs = 2.0 * apply_linear(g, a, p) + apply_linear(g, b, p);
  CHECK(max_abs(lhs - rhs) < 1e-10 * max_abs(rhs));
  CHECK(apply_full(g, FullOp::L2, a, p).isApprox(apply_linear(g, a, p).eta));
}

TEST_CASE("damping forms") {
  Grid g = make(0.1);
  const double s = 0.99;
  DampingReport d = damping_check(g, s, 30);
  CHECK(d.constant == doctest::Approx(-0.25 + 3 * (1 - s)).epsilon(1e-12));
  CHECK(d.violations == 0);
  CHECK(d.worst_margin <= 1e-6);
  CHECK(d.worst_ibp_gap < 1e-6);
  DampingReport x = damping_check_xi(g, s, s, 30);
  CHECK(x.constant == doctest::Approx(-0.5 + 3 * (1 - s)).epsilon(1e-12));
  CHECK(x.violations == 0);
  CHECK(x.worst_ibp_gap < 1e-6);
  CHECK(damping_check(g, s, 5).worst_margin == damping_check(g, s, 5).worst_margin);
}

TEST_CASE("norms") {
  Grid g = make(0.1);
  Field z = Field::Zero(g.nr(), g.nb());
  CHECK(l2w_norm(g, z, WeightKind::phi1) == 0.0);
  CHECK(hm_norm(g, z, 3, WeightFamily::phi) == 0.0);
  CHECK(c1_norm(g, z) == 0.0);
  CHECK(w_inf_norm(g, z, 2) == 0.0);
  Field f = random_trial_field(g, 9);
  CHECK(l2w_norm(g, 3.0 * f, WeightKind::phi1) == doctest::Approx(3.0 * l2w_norm(g, f, WeightKind::phi1)));
  CHECK(hm_norm(g, f, 2, WeightFamily::psi) <= hm_norm(g, f, 3, WeightFamily::psi));
  CHECK(std::isfinite(c1_norm(g, f)));
  // Omega_bar is O(alpha) under the c_omega = -3 normalization: halving alpha halves the norm
  Grid h = make(0.05);
  double r = l2w_norm(h, approx_steady_state(h).omega_bar, WeightKind::phi1) /
             l2w_norm(g, approx_steady_state(g).omega_bar, WeightKind::phi1);
  CHECK(r == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("energy") {
  Grid g = make(0.1);
  ProfileTriple p = approx_steady_state(g);
  MuConfig mu;
  EnergyReport z = energy(g, zero_triple(g), p, mu);
  CHECK(z.E_total == 0.0);
  CHECK(z.E0 == 0.0);
  LinState s = trial(g, 3);
  EnergyReport e = energy(g, s, p, mu);
  CHECK(e.E0 > 0.0);
  CHECK(std::isfinite(e.E3));
  CHECK(e.E3 >= e.E0);
  CHECK(e.mu0 == doctest::Approx(mu0_constant(profile_c(g))));
  WeightCache wc(g);
  CHECK(energy_e0(g, wc, s, p, mu) == doctest::Approx(e.E0).epsilon(1e-12));
  // E0 is a norm: homogeneous of degree one
  CHECK(energy(g, 2.0 * s, p, mu).E0 == doctest::Approx(2.0 * e.E0).epsilon(1e-12));
}

TEST_CASE("linearized decay") {
  Grid g = make(0.1, 48, 32);
  ProfileTriple p = approx_steady_state(g);
  DecayOptions o;
  o.T = 0.5;
  o.dt = 0.01;
  DecayReport z = decay_rate(g, zero_triple(g), p, LinearMode::full_linear, o);
  CHECK(z.zero_state);
  DecayReport d = decay_rate(g, trial(g, 4), p, LinearMode::full_linear, o);
  CHECK_FALSE(d.zero_state);
  CHECK(d.monotone);
  CHECK(d.e0.back() < d.e0.front());
  CHECK(d.rate > 0.0);
}

TEST_CASE("identities behind the energy estimates") {
  Grid g = make(0.1);
  ProfileTriple p = approx_steady_state(g);
  LinState s = trial(g, 5);
  double scale = max_abs(s);
  CHECK(db_commutation_residual(g, s) < 1e-9 * scale);
  CHECK(nota_ux2_residual(g, s.omega) < 1e-13 * std::max(1.0, s.omega.cwiseAbs().maxCoeff() / g.alpha));
  Field phi = weight_field(g, WeightKind::phi1);
  Field gf = random_trial_field(g, 17);
  auto [lhs, rhs] = ux_bound_sides(g, s.omega, gf, phi);
  CHECK(lhs <= rhs * (1 + 1e-12));
  AngularEnergyCheck a = angular_energy_check(g, s, p);
  CHECK(std::isfinite(a.c_needed));
  CHECK(l12_tilde_radial_norm2(g, s.omega) >= 0.0);
}
