#include "bsq/dynamics.hpp"
#include "bsq/linearized.hpp"

#include <doctest.h>

#include <cmath>

using namespace bsq;
using std::numbers::pi;

namespace {
Grid make(double alpha, int nr = 64, int nb = 48) {
  GridConfig c;
  c.alpha = alpha;
  c.n_r = nr;
  c.n_beta = nb;
  return build_grid(c);
}
double relerr(const Triple& a, const Triple& b) { return max_abs(a - b) / max_abs(b); }
Triple random_triple(const Grid& g, std::uint64_t s) {
  return {random_trial_field(g, 3 * s + 1), random_trial_field(g, 3 * s + 2), random_trial_field(g, 3 * s + 3)};
}
}  // namespace

TEST_CASE("rescaled state keeps c_theta = c_l + 2 c_omega") {
  RescaledState s;
  s.set_scaling(-1.25, 7.0);
  CHECK(s.c_theta == 7.0 - 2.5);
}

TEST_CASE("normalization") {
  Grid g = make(0.1);
  Normalization z = normalization(g, Field::Zero(g.nr(), g.nb()));
  CHECK(z.c_omega == 0.0);
  CHECK(z.c_l == 0.0);
  ProfileTriple p = approx_steady_state(g);
  Normalization n = normalization(g, p.omega_bar);
  CHECK(n.c_omega == doctest::Approx(-3.0).epsilon(1e-10));
  CHECK(n.c_l == doctest::Approx((1 - g.alpha) / g.alpha * n.c_omega).epsilon(1e-14));
  Field pos = random_trial_field(g, 4).cwiseAbs();
  CHECK(normalization(g, pos).c_omega < 0.0);
}

TEST_CASE("leading system against the self-similar trajectory") {
  Grid g = make(0.1, 256, 32);
  double c = profile_c(g);
  double err[2];
  int k = 0;
  for (double dt : {0.01, 0.005}) {
    Triple s = leading_exact(g, 0.0, 1.0, c);
    int n = static_cast<int>(std::round(0.5 / dt));
    for (int i = 0; i < n; ++i)
      s = rk4_step([&](const Triple& x) { return leading_rhs(g, x, LeadingForm::physical); }, s, dt);
    err[k++] = relerr(s, leading_exact(g, 0.5, 1.0, c));
  }
  CHECK(err[0] < 1e-4);
  CHECK(err[0] / err[1] == doctest::Approx(16.0).epsilon(0.15));
}

TEST_CASE("leading system: eta = 0 freezes Omega") {
  Grid g = make(0.1);
  Triple s = zero_triple(g);
  s.omega = random_trial_field(g, 2);
  Triple d = leading_rhs(g, s, LeadingForm::physical);
  CHECK(d.omega.cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.eta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rescaled leading system fixed point") {
  Grid g = make(0.1, 128, 32);
  double c = profile_c(g);
  Triple eq = leading_exact(g, 0.0, 1.0, c), s = eq;
  auto f = [&](const Triple& x) { return leading_rhs(g, x, LeadingForm::rescaled, -1.0, 1.0 / g.alpha); };
  CHECK(max_abs(f(eq)) / max_abs(eq) < 1e-10);
  for (int i = 0; i < 100; ++i) s = rk4_step(f, s, 0.01);
  CHECK(relerr(s, eq) < 1e-10);
}

TEST_CASE("full right side") {
  Grid g = make(0.1);
  StreamSolver solver(g);
  Triple z = zero_triple(g);
  CHECK(max_abs(full_rhs(g, solver, z, -1.0, 3.0)) == 0.0);
  ProfileTriple p = approx_steady_state(g);
  Triple prof{p.omega_bar, p.eta_bar, p.xi_bar};
  Triple F = full_rhs(g, solver, prof, profile_derivs(p), p.c_omega_bar, p.c_l_bar);
  ResidualReport r = residual(g, p);
  CHECK(relerr(F, r.F) < 1e-8);
}

TEST_CASE("scaling invariance of the unrescaled equations") {
  Grid g = make(0.05, 64, 48);
  Triple init = random_triple(g, 0);
  for (double tau_s : {0.5, 2.0}) CHECK(scaling_commutation_error(g, init, 1.0, tau_s, 0.2, 0.01) < 1e-8);
  CHECK(scaling_commutation_error(g, init, 1.5, 1.0, 0.2, 0.01) < 1e-8);
}

TEST_CASE("profile residual") {
  Grid g = make(0.1, 64, 48);
  ProfileTriple p = approx_steady_state(g);
  ResidualReport r = residual(g, p);
  CHECK(r.slope_omega >= 1.9);
  CHECK(std::isfinite(r.h3_omega));
  CHECK(std::isfinite(r.h3_eta));
  ProfileOptions flat;
  flat.flat_gamma = true;
  ResidualReport rf = residual(g, approx_steady_state(g, flat));
  CHECK(rf.slope_omega == doctest::Approx(1.0).epsilon(0.15));
  Grid h = make(0.05, 64, 48);
  ResidualReport r2 = residual(h, approx_steady_state(h));
  CHECK(r.h3_omega / r2.h3_omega == doctest::Approx(4.0).epsilon(0.35));
}

TEST_CASE("blowup time") {
  std::vector<double> tau, m1, mh, me, pos, osc;
  for (int i = 0; i <= 40000; ++i) {
    double t = i * 1e-3;
    tau.push_back(t);
    m1.push_back(-1.0);
    mh.push_back(-0.5);
    me.push_back(-1.0 - std::exp(-t));
    pos.push_back(t < 1.0 ? -1.0 : 0.1);
    osc.push_back(-1.0 + 0.4 * std::sin(3.0 * t));
  }
  BlowupReport b1 = blowup_time(tau, m1, 0.1);
  CHECK(b1.blowup);
  CHECK(std::abs(b1.T_star - 1.0) < 1e-10);
  for (std::size_t i = 0; i < tau.size(); i += 997) CHECK(std::abs(b1.t_of_tau[i] - (1.0 - std::exp(-tau[i]))) < 1e-12);
  CHECK(std::abs(blowup_time(tau, mh, 0.1).T_star - 2.0) < 1e-10);
  // T* = int_0^inf exp(-t - (1 - e^-t)) dt = 1 - 1/e (u = e^-t)
  CHECK(std::abs(blowup_time(tau, me, 0.1).T_star - (1.0 - std::exp(-1.0))) < 1e-6);
  BlowupReport bp = blowup_time(tau, pos, 0.1);
  CHECK_FALSE(bp.blowup);
  CHECK(!bp.note.empty());
  BlowupReport bo = blowup_time(tau, osc, 0.1);
  for (std::size_t i = 1; i < tau.size(); i += 101) {
    CHECK(bo.C_omega[i] > std::exp(-1.5 * tau[i]));
    CHECK(bo.C_omega[i] < std::exp(-0.5 * tau[i]));
  }
  CHECK(bo.T_star > 2.0 / 3.0);
  CHECK(bo.T_star < 2.0);
  // M grows like alpha int C^-1
  CHECK(b1.M.back() == doctest::Approx(0.1 * std::expm1(40.0)).epsilon(1e-6));
}

TEST_CASE("L12(0) obeys its ODE along the linearized flow") {
  Grid g = make(0.05, 64, 48);
  ProfileTriple p = approx_steady_state(g);
  L12OdeCheck chk = l12_ode_check(g, p, random_triple(g, 0), 0.5, 0.005);
  CHECK(chk.max_rel_fd < 1e-6);
  CHECK(chk.max_rel_exact < 1e-12);
}

TEST_CASE("nonlinear run near the profile") {
  Grid g = make(0.05, 48, 32);
  ProfileTriple p = approx_steady_state(g);
  RunOptions ro;
  ro.t_end = 3.0;
  ro.dt = 0.01;
  Trajectory tr = run(g, p, 1e-3 * random_triple(g, 0), ro);
  REQUIRE_FALSE(tr.aborted);
  REQUIRE(tr.points.size() > 2);
  std::vector<double> tau, cw;
  for (std::size_t i = 0; i < tr.points.size(); ++i) {
    tau.push_back(tr.points[i].tau);
    cw.push_back(tr.points[i].c_omega);
    if (i) CHECK(tr.points[i].t_of_tau >= tr.points[i - 1].t_of_tau);
    CHECK(tr.points[i].c_omega < 0.0);
  }
  BlowupReport b = blowup_time(tau, cw, g.alpha);
  for (std::size_t i = 0; i < tau.size(); ++i) CHECK(b.C_omega[i] == doctest::Approx(tr.C_omega[i]).epsilon(1e-4));
  CHECK(b.T_star > 2.0 / 3.0);
  CHECK(b.T_star < 2.0);
  // dt above the transport limit is reported, not silently taken
  StreamSolution s = solve_stream(g, p.omega_bar);
  TransportCoeffs tc = transport_coeffs(g, s);
  CHECK(transport_dt(g, tc.c_r, tc.c_b, 0.5) > 0.0);
}
