#include "bsq/dynamics.hpp"

#include "bsq/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bsq {

namespace {

constexpr double kPi = std::numbers::pi;

Field inv1pR(const Grid& g) { return radial_field(g, (1.0 / (1.0 + g.r.array())).matrix()); }

double support_radius(const Grid& g, const Field& f) {
  double m = f.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  Vec row = f.cwiseAbs().rowwise().maxCoeff();
  for (int i = g.nr() - 1; i >= 0; --i)
    if (row(i) > 1e-12 * m) return g.r(i);
  return 0.0;
}

}  // namespace

Normalization normalization(const Grid& g, const Field& omega) {
  Normalization n;
  n.c_omega = -(2.0 / (kPi * g.alpha)) * l12_zero(g, omega);
  n.c_l = (1.0 - g.alpha) / g.alpha * n.c_omega;
  return n;
}

Triple leading_rhs(const Grid& g, const Triple& s, LeadingForm form, double c_omega, double c_l) {
  const double a = g.alpha;
  Vec l = l12(g, s.omega);
  Field lead = radial_field(g, (2.0 / (kPi * a)) * l);
  Triple out;
  out.xi = Field::Zero(s.omega.rows(), s.omega.cols());
  if (form == LeadingForm::physical) {
    out.omega = s.eta;
    out.eta = lead.cwiseProduct(s.eta);
    return out;
  }
  out.omega = c_omega * s.omega + s.eta - a * c_l * D_R(g, s.omega);
  out.eta = (lead.array() + 2.0 * c_omega).matrix().cwiseProduct(s.eta) - a * c_l * D_R(g, s.eta);
  return out;
}

Triple leading_exact(const Grid& g, double t, double T, double c) {
  const double tau = T - t;
  Vec z = g.r / tau;
  Vec om(g.nr()), et(g.nr());
  for (int i = 0; i < g.nr(); ++i) std::tie(om(i), et(i)) = leading_profile(z(i));
  RowVec gam = g.cosb.array().pow(g.alpha).matrix().transpose();
  const double amp = g.alpha / c;
  Triple s;
  s.omega = (amp / tau) * om * gam;
  s.eta = (amp / (tau * tau)) * et * gam;
  s.xi = Field::Zero(g.nr(), g.nb());
  return s;
}

Derivs numeric_derivs(const Grid& g, const Triple& s) {
  return {D_R(g, s.omega), D_beta(g, s.omega), D_R(g, s.eta), D_beta(g, s.eta), D_R(g, s.xi), D_beta(g, s.xi)};
}

Derivs profile_derivs(const ProfileTriple& p) {
  return {p.omega_dr, p.omega_db, p.eta_dr, p.eta_db, p.xi_dr, p.xi_db};
}

Derivs operator+(const Derivs& a, const Derivs& b) {
  return {a.omega_dr + b.omega_dr, a.omega_db + b.omega_db, a.eta_dr + b.eta_dr,
          a.eta_db + b.eta_db,     a.xi_dr + b.xi_dr,       a.xi_db + b.xi_db};
}

Triple full_rhs(const Grid& g, const StreamSolver& solver, const Triple& s, const Derivs& d, double c_omega,
                double c_l) {
  const double a = g.alpha;
  StreamSolution sol = solver.solve(s.omega);
  VelocityPack vp = velocity(g, sol, s.omega);
  TransportCoeffs tc = transport_coeffs(g, sol);
  Field cr = (tc.c_r.array() + a * c_l).matrix();
  auto adv = [&](const Field& fr, const Field& fb) -> Field {
    return cr.cwiseProduct(fr) + tc.c_b.cwiseProduct(fb);
  };
  Triple out;
  out.omega = c_omega * s.omega + s.eta - adv(d.omega_dr, d.omega_db);
  out.eta = (2.0 * c_omega - vp.u_x.array()).matrix().cwiseProduct(s.eta) - vp.v_x.cwiseProduct(s.xi) -
            adv(d.eta_dr, d.eta_db);
  out.xi = (2.0 * c_omega - vp.v_y.array()).matrix().cwiseProduct(s.xi) - vp.u_y.cwiseProduct(s.eta) -
           adv(d.xi_dr, d.xi_db);
  return out;
}

Triple full_rhs(const Grid& g, const StreamSolver& solver, const Triple& s, double c_omega, double c_l) {
  return full_rhs(g, solver, s, numeric_derivs(g, s), c_omega, c_l);
}

Triple perturbation_rhs(const Grid& g, const StreamSolver& solver, const ProfileTriple& p, const Triple& pert) {
  Normalization n = normalization(g, pert.omega);
  Triple total{p.omega_bar + pert.omega, p.eta_bar + pert.eta, p.xi_bar + pert.xi};
  // Perturbations vanish like R^2 at R = 0.
  Derivs dp{D_R_vanishing(g, pert.omega), D_beta(g, pert.omega), D_R_vanishing(g, pert.eta),
            D_beta(g, pert.eta),          D_R_vanishing(g, pert.xi), D_beta(g, pert.xi)};
  Derivs d = profile_derivs(p) + dp;
  return full_rhs(g, solver, total, d, p.c_omega_bar + n.c_omega, p.c_l_bar + n.c_l);
}

Triple full_linear_rhs(const Grid& g, const StreamSolver& solver, const ProfileTriple& p, const Triple& pert) {
  Triple plus = perturbation_rhs(g, solver, p, pert);
  Triple minus = perturbation_rhs(g, solver, p, (-1.0) * pert);
  return 0.5 * (plus - minus);
}

double small_r_slope(const Grid& g, const Field& f, double r_lo, double r_hi) {
  std::vector<double> x, y;
  Vec m = f.cwiseAbs().rowwise().maxCoeff();
  for (int i = 0; i < g.nr(); ++i)
    if (g.r(i) >= r_lo && g.r(i) <= r_hi && m(i) > 0.0) {
      x.push_back(std::log(g.r(i)));
      y.push_back(std::log(m(i)));
    }
  const int n = static_cast<int>(x.size());
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  Mat A(n, 2);
  Vec b(n);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = x[i];
    b(i) = y[i];
  }
  Vec c = A.colPivHouseholderQr().solve(b);
  return c(1);
}

ResidualReport residual(const Grid& g, const ProfileTriple& p, int n_modes) {
  StreamSolver solver(g, n_modes);
  ResidualReport rep;
  Triple prof{p.omega_bar, p.eta_bar, p.xi_bar};
  rep.F = full_rhs(g, solver, prof, profile_derivs(p), p.c_omega_bar, p.c_l_bar);
  rep.h3_omega = hm_norm(g, rep.F.omega, 3, WeightFamily::phi);
  rep.h3_eta = hm_norm(g, rep.F.eta, 3, WeightFamily::phi);
  rep.h3_xi = hm_norm(g, rep.F.xi, 3, WeightFamily::psi);
  rep.slope_omega = small_r_slope(g, rep.F.omega, rep.r_lo, rep.r_hi);
  rep.slope_eta = small_r_slope(g, rep.F.eta, rep.r_lo, rep.r_hi);
  return rep;
}

double transport_dt(const Grid& g, const Field& c_r, const Field& c_b, double cfl) {
  // Local spacing in ln R and in t = ln tan(beta); D_R = d/d ln R and D_beta = 2 d/dt.
  const int nr = g.nr(), nb = g.nb();
  Vec lr = g.r.array().log();
  Vec hr(nr), hb(nb);
  for (int i = 0; i < nr; ++i)
    hr(i) = std::min(i > 0 ? lr(i) - lr(i - 1) : 1e300, i + 1 < nr ? lr(i + 1) - lr(i) : 1e300);
  for (int j = 0; j < nb; ++j)
    hb(j) = std::min(j > 0 ? g.t(j) - g.t(j - 1) : 1e300, j + 1 < nb ? g.t(j + 1) - g.t(j) : 1e300);
  double inv = 0.0;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nb; ++j)
      inv = std::max(inv, std::abs(c_r(i, j)) / hr(i) + 2.0 * std::abs(c_b(i, j)) / hb(j));
  return inv > 0.0 ? cfl / inv : std::numeric_limits<double>::infinity();
}

Trajectory run(const Grid& g, const ProfileTriple& p, const Triple& init, const RunOptions& opt) {
  StreamSolver solver(g, opt.n_modes);
  WeightCache wc(g);
  Trajectory tr;
  Triple s = init;
  double tau = 0.0, logC = 0.0, logCl = 0.0, t_of_tau = 0.0;
  double prev_cw = 0.0, prev_cl = 0.0;
  auto record = [&](double cw, double cl) {
    TrajectoryPoint pt;
    pt.tau = tau;
    pt.c_omega = cw;
    pt.c_l = cl;
    pt.l12_zero = l12_zero(g, s.omega);
    pt.support = support_radius(g, s.omega);
    pt.t_of_tau = t_of_tau;
    if (opt.energies) {
      EnergyReport er = energy(g, wc, s, p, opt.mu);
      pt.e0 = er.E0;
      pt.e3 = er.E3;
    }
    tr.points.push_back(pt);
    tr.C_omega.push_back(std::exp(logC));
    tr.C_l.push_back(std::exp(logCl));
  };
  auto scaling = [&](const Triple& x) {
    Normalization n = normalization(g, x.omega);
    return std::pair{p.c_omega_bar + n.c_omega, p.c_l_bar + n.c_l};
  };
  std::tie(prev_cw, prev_cl) = scaling(s);
  record(prev_cw, prev_cl);
  auto f = [&](const Triple& x) { return perturbation_rhs(g, solver, p, x); };
  double next_out = opt.output_every;
  const double eps = 1e-12 * std::max(1.0, opt.t_end);
  while (tau < opt.t_end - eps) {
    // CFL from the current total velocity.
    StreamSolution sol = solver.solve(p.omega_bar + s.omega);
    TransportCoeffs tc = transport_coeffs(g, sol);
    Field cr = (tc.c_r.array() + g.alpha * prev_cl).matrix();
    double dt = std::min({opt.dt, transport_dt(g, cr, tc.c_b, opt.cfl), opt.t_end - tau});
    Triple next = rk4_step(f, s, dt);
    if (!all_finite(next)) {
      tr.aborted = true;
      tr.note = "non-finite state at tau=" + std::to_string(tau + dt) + "; last good state kept";
      break;
    }
    s = next;
    auto [cw, cl] = scaling(s);
    // C_omega = exp(int c_omega), t(tau) = int C_omega; trapezoid in the exponent,
    // exponential interpolation for t.
    double dl = 0.5 * dt * (prev_cw + cw);
    double C0 = std::exp(logC);
    logC += dl;
    logCl += 0.5 * dt * (prev_cl + cl);
    t_of_tau += std::abs(dl) > 1e-14 ? C0 * (std::exp(dl) - 1.0) * dt / dl : C0 * dt;
    prev_cw = cw;
    prev_cl = cl;
    tau += dt;
    ++tr.steps;
    if (tau >= next_out - eps || tau >= opt.t_end - eps) {
      record(cw, cl);
      while (next_out <= tau + eps) next_out += opt.output_every;
    }
  }
  tr.last = s;
  return tr;
}

BlowupReport blowup_time(const std::vector<double>& tau, const std::vector<double>& c, double alpha) {
  BlowupReport rep;
  const std::size_t n = tau.size();
  if (n < 2 || c.size() != n) {
    rep.note = "need at least two samples";
    return rep;
  }
  for (double ci : c)
    if (!(ci < 0.0)) {
      rep.note = "non-negative c_omega encountered: no blowup diagnosed";
      return rep;
    }
  rep.C_omega.assign(n, 1.0);
  rep.t_of_tau.assign(n, 0.0);
  rep.M.assign(n, 0.0);
  double logC = 0.0;
  // Integral of exp(l) over [h] for l linear from l0 to l0 + dl.
  auto expint = [](double C0, double dl, double h) {
    return std::abs(dl) > 1e-14 ? C0 * std::expm1(dl) * h / dl : C0 * h;
  };
  for (std::size_t i = 1; i < n; ++i) {
    double h = tau[i] - tau[i - 1];
    double dl = 0.5 * h * (c[i - 1] + c[i]);
    double C0 = std::exp(logC);
    rep.t_of_tau[i] = rep.t_of_tau[i - 1] + expint(C0, dl, h);
    rep.M[i] = rep.M[i - 1] + alpha * expint(1.0 / C0, -dl, h);
    logC += dl;
    rep.C_omega[i] = std::exp(logC);
  }
  // Tail with c frozen at its last value.
  rep.T_star = rep.t_of_tau.back() + rep.C_omega.back() / std::abs(c.back());
  rep.blowup = true;
  return rep;
}

Triple rescale_state(const Grid& g, const Triple& s, double l, double tau_s) {
  Mat P = g.radial_interp(l * g.r);
  return {(1.0 / tau_s) * (P * s.omega), (1.0 / (tau_s * tau_s)) * (P * s.eta),
          (1.0 / (tau_s * tau_s)) * (P * s.xi)};
}

double scaling_commutation_error(const Grid& g, const Triple& init, double l, double tau_s, double t, double dt,
                                 double r_cmp) {
  StreamSolver solver(g);
  auto f = [&](const Triple& x) { return full_rhs(g, solver, x, 0.0, 0.0); };
  auto advance = [&](Triple x, double T, double h) {
    int n = std::max(1, static_cast<int>(std::ceil(T / h - 1e-9)));
    double step = T / n;
    for (int k = 0; k < n; ++k) x = rk4_step(f, x, step);
    return x;
  };
  // The rescaled solution runs on the slow clock t / tau_s.
  Triple a = advance(rescale_state(g, init, l, tau_s), tau_s * t, tau_s * dt);
  Triple b = rescale_state(g, advance(init, t, dt), l, tau_s);
  int nc = 0;
  while (nc < g.nr() && g.r(nc) <= r_cmp) ++nc;
  // Measured against the change over the run: the linear terms commute with the rescaling
  // exactly, so a comparison against the state itself would hide the transport part.
  Triple d = a - b, inc = b - rescale_state(g, init, l, tau_s);
  auto top = [&](const Triple& x) {
    return std::max({x.omega.topRows(nc).cwiseAbs().maxCoeff(), x.eta.topRows(nc).cwiseAbs().maxCoeff(),
                     x.xi.topRows(nc).cwiseAbs().maxCoeff()});
  };
  return top(d) / std::max(top(inc), 1e-300);
}

L12OdeCheck l12_ode_check(const Grid& g, const ProfileTriple& p, const Triple& init, double T, double dt) {
  L12OdeCheck chk;
  Field inv = inv1pR(g);
  auto ode = [&](const Triple& x) {
    return -4.0 * l12_zero(g, x.omega) + l12_zero(g, x.eta) -
           3.0 * l12_zero(g, D_beta(g, x.omega).cwiseProduct(inv));
  };
  auto f = [&](const Triple& x) { return apply_linear(g, x, p); };
  Triple s = init;
  const int n = std::max(5, static_cast<int>(std::round(T / dt)));
  for (int k = 0; k <= n; ++k) {
    chk.t.push_back(k * dt);
    chk.l12_zero.push_back(l12_zero(g, s.omega));
    double o = ode(s);
    chk.ode.push_back(o);
    double ex = l12_zero(g, f(s).omega);
    chk.max_rel_exact = std::max(chk.max_rel_exact, std::abs(ex - o) / std::max(std::abs(o), 1e-300));
    if (k < n) s = rk4_step(f, s, dt);
  }
  // Relative to the size of the right side over the run: it crosses zero, so a pointwise
  // ratio measures only the difference stencil's absolute error near the crossings.
  double sc = 1e-300;
  for (double o : chk.ode) sc = std::max(sc, std::abs(o));
  for (int k = 2; k + 2 <= n; ++k) {
    const auto& L = chk.l12_zero;
    double d = (L[k - 2] - 8.0 * L[k - 1] + 8.0 * L[k + 1] - L[k + 2]) / (12.0 * dt);
    chk.max_rel_fd = std::max(chk.max_rel_fd, std::abs(d - chk.ode[k]) / sc);
  }
  return chk;
}

}  // namespace bsq
