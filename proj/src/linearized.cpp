#include "bsq/linearized.hpp"

#include "bsq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace bsq {

namespace {

constexpr double kPi = std::numbers::pi;

Field inv1pR(const Grid& g) { return radial_field(g, (1.0 / (1.0 + g.r.array())).matrix()); }

Field transport0(const Grid& g, const Field& f) {
  return -D_R_vanishing(g, f) - 3.0 * inv1pR(g).cwiseProduct(D_beta(g, f));
}

double guard(double v) { return (std::isfinite(v) && v < kNormOverflow) ? v : std::numeric_limits<double>::infinity(); }

double sq(const Grid& g, const Field& f, const Field& w) { return weighted_inner(g, f, f, w); }
// Energies use the truncated angular rule so that they are fixed quadratic forms.
double sqe(const Grid& g, const Field& f, const Field& w) { return weighted_inner(g, f, f, w, AngularTail::truncated); }

double sup(const Field& f) { return f.size() ? f.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

Field apply_local(const Grid& g, LocalOp which, const LinState& s) {
  Field w = inv1pR(g);
  switch (which) {
    case LocalOp::L10: return transport0(g, s.omega) - s.omega + s.eta;
    case LocalOp::L20: return transport0(g, s.eta) + (3.0 * w.array() - 2.0).matrix().cwiseProduct(s.eta);
    case LocalOp::L30: return transport0(g, s.xi) - (3.0 * w.array() + 2.0).matrix().cwiseProduct(s.xi);
  }
  return {};
}

LinState apply_linear(const Grid& g, const LinState& s, const ProfileTriple& p) {
  const double k = 2.0 / (kPi * g.alpha);
  const double cw = normalization(g, s.omega).c_omega;
  Field lt = radial_field(g, k * l12_tilde(g, s.omega));
  LinState o;
  o.omega = apply_local(g, LocalOp::L10, s) + cw * (p.omega_bar - p.omega_dr);
  o.eta = apply_local(g, LocalOp::L20, s) + lt.cwiseProduct(p.eta_bar) + cw * (p.eta_bar - p.eta_dr);
  o.xi = apply_local(g, LocalOp::L30, s) - lt.cwiseProduct(p.xi_bar) + cw * (3.0 * p.xi_bar - p.xi_dr);
  return o;
}

Field apply_full(const Grid& g, FullOp which, const LinState& s, const ProfileTriple& p) {
  LinState o = apply_linear(g, s, p);
  switch (which) {
    case FullOp::L1: return o.omega;
    case FullOp::L2: return o.eta;
    case FullOp::L3: return o.xi;
  }
  return {};
}

// ---- norms ----------------------------------------------------------------

double l2w_norm(const Grid& g, const Field& f, WeightKind k) { return guard(std::sqrt(wnorm2(g, f, k))); }

double hm_norm(const Grid& g, const Field& f, int m, WeightFamily fam) {
  const WeightKind k1 = fam == WeightFamily::phi ? WeightKind::phi1 : WeightKind::psi1;
  const WeightKind k2 = fam == WeightFamily::phi ? WeightKind::phi2 : WeightKind::psi2;
  Field w1 = weight_field(g, k1), w2 = weight_field(g, k2);
  double total = 0.0;
  Field dr = f;
  for (int i = 0; i <= m; ++i) {
    total += std::sqrt(std::max(0.0, sq(g, dr, w1)));
    Field db = dr;
    for (int j = 0; i + j <= m - 1; ++j) {
      db = D_beta(g, db);
      total += std::sqrt(std::max(0.0, sq(g, db, w2)));
    }
    dr = D_R(g, dr);
  }
  return guard(total);
}

double c1_norm(const Grid& g, const Field& f) {
  Field w1 = weight_field(g, WeightKind::c1_phi1), w2 = weight_field(g, WeightKind::c1_phi2);
  return guard(sup(f) + sup(w1.cwiseProduct(D_R(g, f))) + sup(w2.cwiseProduct(D_beta(g, f))));
}

double w_inf_norm(const Grid& g, const Field& f, int l) {
  const double a = g.alpha;
  Field pre = angular_field(g, g.sin2b.array().pow(-a / 5.0).matrix());
  Field den = angular_field(g, (a / 10.0 + g.sin2b.array()).matrix());
  double total = 0.0;
  Field dr = f;
  for (int k = 0; k <= l; ++k) {
    total += sup(dr);
    dr = D_R(g, dr);
  }
  Field db = f;
  for (int j = 1; j <= l; ++j) {
    db = D_beta(g, db);
    Field q = db.cwiseQuotient(den);
    for (int k = 0; k + j <= l; ++k) {
      total += sup(pre.cwiseProduct(q));
      q = D_R(g, q);
    }
  }
  return guard(total);
}

// ---- energies -------------------------------------------------------------

WeightCache::WeightCache(const Grid& g)
    : phi0(weight_field(g, WeightKind::phi0)),
      phi1(weight_field(g, WeightKind::phi1)),
      phi2(weight_field(g, WeightKind::phi2)),
      psi0(weight_field(g, WeightKind::psi0)),
      psi1(weight_field(g, WeightKind::psi1)),
      psi2(weight_field(g, WeightKind::psi2)),
      c1_phi1(weight_field(g, WeightKind::c1_phi1)),
      c1_phi2(weight_field(g, WeightKind::c1_phi2)) {}

double mu0_constant(double c) { return 81.0 / (4.0 * kPi * c); }

namespace {

struct E0Parts {
  double e_beta1 = 0, e_r0 = 0, e_r1 = 0, e0 = 0;
  double om_phi0 = 0, eta_psi0 = 0, l12_term = 0, l12z = 0;
  Field db_om, db_eta, db_xi;
};

E0Parts e0_parts(const Grid& g, const WeightCache& w, const LinState& s, const ProfileTriple& p,
                 const MuConfig& mu) {
  E0Parts e;
  e.db_om = D_beta(g, s.omega);
  e.db_eta = D_beta(g, s.eta);
  e.db_xi = D_beta(g, s.xi);
  e.l12z = l12_zero(g, s.omega);
  e.om_phi0 = sqe(g, s.omega, w.phi0);
  e.eta_psi0 = sqe(g, s.eta, w.psi0);
  e.l12_term = mu0_constant(p.c) * e.l12z * e.l12z;
  e.e_r0 = e.om_phi0 + e.eta_psi0 + e.l12_term;
  e.e_beta1 = sqe(g, e.db_om, w.phi2) + sqe(g, e.db_eta, w.phi2);
  e.e_r1 = sqe(g, s.omega, w.phi1) + sqe(g, s.eta, w.phi1);
  e.e0 = e.e_r0 + mu.mu1 * e.e_beta1 + mu.mu2 * e.e_r1 + sqe(g, s.xi, w.psi1) + sqe(g, e.db_xi, w.psi2);
  return e;
}

// sum over Omega, eta (phi family) and xi (psi family) of ||D_R^k D_b^j f rho^1/2||^2.
double mixed(const Grid& g, const LinState& s, int k, int j, const Field& wphi, const Field& wpsi) {
  auto d = [&](Field f) {
    for (int q = 0; q < j; ++q) f = D_beta(g, f);
    for (int q = 0; q < k; ++q) f = D_R(g, f);
    return f;
  };
  return sqe(g, d(s.omega), wphi) + sqe(g, d(s.eta), wphi) + sqe(g, d(s.xi), wpsi);
}

}  // namespace

double energy_e0(const Grid& g, const WeightCache& w, const LinState& s, const ProfileTriple& p,
                 const MuConfig& mu) {
  return guard(std::sqrt(std::max(0.0, e0_parts(g, w, s, p, mu).e0)));
}

EnergyReport energy(const Grid& g, const WeightCache& w, const LinState& s, const ProfileTriple& p,
                    const MuConfig& mu) {
  EnergyReport r;
  r.mu = mu;
  r.mu0 = mu0_constant(p.c);
  E0Parts e = e0_parts(g, w, s, p, mu);
  r.omega_phi0 = e.om_phi0;
  r.eta_psi0 = e.eta_psi0;
  r.l12_term = e.l12_term;
  r.l12_zero = e.l12z;
  Normalization n = normalization(g, s.omega);
  r.c_omega = n.c_omega;
  r.c_l = n.c_l;

  double er2 = sqe(g, D_R(g, s.omega), w.phi1) + sqe(g, D_R(g, s.eta), w.phi1) + sqe(g, D_R(g, s.xi), w.psi1);
  double e1 = e.e0 + mu.mu3 * er2;
  double e2 = e1;
  for (int k = 0; k <= 2; ++k)
    e2 += mu.mu2k[k] * (k < 2 ? mixed(g, s, k, 2 - k, w.phi2, w.psi2) : mixed(g, s, k, 0, w.phi1, w.psi1));
  double e3 = e2;
  for (int k = 0; k <= 3; ++k)
    e3 += mu.mu3k[k] * (k < 3 ? mixed(g, s, k, 3 - k, w.phi2, w.psi2) : mixed(g, s, k, 0, w.phi1, w.psi1));
  double xi_inf = std::pow(sup(s.xi), 2) + std::pow(sup(w.c1_phi2.cwiseProduct(e.db_xi)), 2) +
                  mu.mu4 * std::pow(sup(w.c1_phi1.cwiseProduct(D_R(g, s.xi))), 2);

  auto rt = [](double v) { return guard(std::sqrt(std::max(0.0, v))); };
  r.E_beta1 = rt(e.e_beta1);
  r.E_R0 = rt(e.e_r0);
  r.E_R1 = rt(e.e_r1);
  r.E_R2 = rt(er2);
  r.E0 = rt(e.e0);
  r.E1 = rt(e1);
  r.E2 = rt(e2);
  r.E3 = rt(e3);
  r.E_xi_inf = rt(xi_inf);
  r.E_total = rt(e3 + g.alpha * xi_inf);
  return r;
}

EnergyReport energy(const Grid& g, const LinState& s, const ProfileTriple& p, const MuConfig& mu) {
  WeightCache w(g);
  return energy(g, w, s, p, mu);
}

// ---- damping quadratic forms ----------------------------------------------

Field random_trial_field(const Grid& g, std::uint64_t seed, int n_max) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Field f = Field::Zero(g.nr(), g.nb());
  Vec x = (g.r.array() / (1.0 + g.r.array())).matrix();
  for (int term = 0; term < 2; ++term) {
    double c0 = nd(rng), c1 = nd(rng), c2 = nd(rng);
    Vec rad = (x.array().square() * (1.0 - x.array()).square() * (c0 + c1 * x.array() + c2 * x.array().square()))
                  .matrix();
    Vec ang = Vec::Zero(g.nb());
    for (int n = 1; n <= n_max; ++n) ang += nd(rng) / n * (2.0 * n * g.beta).array().sin().matrix();
    f += rad * ang.transpose();
  }
  return f;
}

namespace {

Field custom_weight(const Grid& g, double e_sin, double e_cos, bool doubled) {
  Field w(g.nr(), g.nb());
  for (int i = 0; i < g.nr(); ++i) {
    const double R = g.r(i), rad = std::pow((1.0 + R) / R, 4);
    for (int j = 0; j < g.nb(); ++j)
      w(i, j) = doubled ? rad * std::pow(g.sin2b(j), -e_sin)
                        : rad * std::pow(g.sinb(j), -e_sin) * std::pow(g.cosb(j), -e_cos);
  }
  return w;
}

DampingReport finish(DampingReport rep) {
  rep.worst_margin = -std::numeric_limits<double>::infinity();
  for (const DampingTrial& t : rep.trials) {
    if (t.margin > rep.worst_margin) {
      rep.worst_margin = t.margin;
      rep.worst_seed = t.seed;
    }
    if (t.margin > rep.tol) ++rep.violations;
    rep.worst_ibp_gap = std::max(rep.worst_ibp_gap, std::abs(t.q - t.q_ibp) / t.scale);
  }
  return rep;
}

}  // namespace

DampingReport damping_check(const Grid& g, double delta, int trials, std::uint64_t seed0, double tol) {
  DampingReport rep;
  rep.constant = -0.25 + 3.0 * std::abs(1.0 - delta);
  rep.tol = tol;
  Field phi = custom_weight(g, delta, 0.0, true);
  Field w = inv1pR(g);
  Field A = (0.5 - 2.0 * w.array()).matrix();
  Field B = 3.0 * (1.0 - delta) * w.cwiseProduct(angular_field(g, g.cos2b));
  for (int k = 0; k < trials; ++k) {
    const std::uint64_t seed = seed0 + static_cast<std::uint64_t>(k);
    LinState s;
    s.omega = random_trial_field(g, 2 * seed);
    s.eta = random_trial_field(g, 2 * seed + 1);
    s.xi = Field::Zero(g.nr(), g.nb());
    DampingTrial t;
    t.seed = seed;
    t.q = weighted_inner(g, apply_local(g, LocalOp::L10, s), s.omega, phi) +
          weighted_inner(g, apply_local(g, LocalOp::L20, s), s.eta, phi);
    t.scale = sq(g, s.omega, phi) + sq(g, s.eta, phi);
    t.bound = rep.constant * t.scale;
    t.margin = (t.q - t.bound) / t.scale;
    Field ones = Field::Ones(g.nr(), g.nb());
    t.q_ibp = weighted_inner(g, (A + B - ones).cwiseProduct(s.omega), s.omega, phi) +
              weighted_inner(g, s.omega, s.eta, phi) +
              weighted_inner(g, (A + B - 2.0 * ones + 3.0 * w).cwiseProduct(s.eta), s.eta, phi);
    rep.trials.push_back(t);
  }
  return finish(std::move(rep));
}

DampingReport damping_check_xi(const Grid& g, double d1, double d2, int trials, std::uint64_t seed0, double tol) {
  DampingReport rep;
  rep.constant = -0.5 + 3.0 * std::max(std::abs(1.0 - d1), std::abs(1.0 - d2));
  rep.tol = tol;
  Field psi = custom_weight(g, d1, d2, false);
  Field w = inv1pR(g);
  Field A = (0.5 - 2.0 * w.array()).matrix();
  Vec angB = ((1.0 - d1) * g.cosb.array().square() - (1.0 - d2) * g.sinb.array().square()).matrix();
  Field B = 3.0 * w.cwiseProduct(angular_field(g, angB));
  Field coef = (A + B).array() - 2.0 - 3.0 * w.array();
  for (int k = 0; k < trials; ++k) {
    const std::uint64_t seed = seed0 + static_cast<std::uint64_t>(k);
    LinState s;
    s.omega = s.eta = Field::Zero(g.nr(), g.nb());
    s.xi = random_trial_field(g, 3 * seed + 7);
    DampingTrial t;
    t.seed = seed;
    t.q = weighted_inner(g, apply_local(g, LocalOp::L30, s), s.xi, psi);
    t.scale = sq(g, s.xi, psi);
    t.bound = rep.constant * t.scale;
    t.margin = (t.q - t.bound) / t.scale;
    t.q_ibp = weighted_inner(g, coef.cwiseProduct(s.xi), s.xi, psi);
    rep.trials.push_back(t);
  }
  return finish(std::move(rep));
}

// ---- linearized evolution ---------------------------------------------------

LinState rk4_linear_step(const Grid& g, const LinState& s, const ProfileTriple& p, double dt) {
  return rk4_step([&](const LinState& x) { return apply_linear(g, x, p); }, s, dt);
}

DecayReport decay_rate(const Grid& g, const LinState& init, const ProfileTriple& p, LinearMode mode,
                       const DecayOptions& opt) {
  DecayReport rep;
  if (max_abs(init) == 0.0) {
    rep.zero_state = true;
    rep.note = "zero state";
    return rep;
  }
  WeightCache wc(g);
  StreamSolver solver(g, opt.n_modes);
  auto f = [&](const LinState& x) {
    return mode == LinearMode::leading_linear ? apply_linear(g, x, p) : full_linear_rhs(g, solver, p, x);
  };
  LinState s = init;
  const int n = std::max(1, static_cast<int>(std::round(opt.T / opt.dt)));
  double prev = energy_e0(g, wc, s, p, opt.mu);
  auto push = [&](double t, double e0) {
    rep.t.push_back(t);
    rep.e0.push_back(e0);
    rep.c_omega.push_back(normalization(g, s.omega).c_omega);
    rep.l12_zero.push_back(l12_zero(g, s.omega));
    if (opt.track_e3) rep.e3.push_back(energy(g, wc, s, p, opt.mu).E3);
  };
  push(0.0, prev);
  for (int k = 1; k <= n; ++k) {
    s = rk4_step(f, s, opt.dt);
    double e0 = energy_e0(g, wc, s, p, opt.mu);
    if (!std::isfinite(e0)) {
      rep.note = "non-finite energy at step " + std::to_string(k);
      rep.monotone = false;
      break;
    }
    double inc = (e0 - prev) / prev;
    rep.max_rel_increase = std::max(rep.max_rel_increase, inc);
    if (inc > opt.mono_tol) rep.monotone = false;
    prev = e0;
    if (k % std::max(1, opt.record_every) == 0 || k == n) push(k * opt.dt, e0);
  }
  auto fit = [&](const std::vector<double>& e) {
    const std::size_t m = rep.t.size();
    const double t_half = 0.5 * rep.t.back();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t i = 0; i < m && i < e.size(); ++i) {
      if (rep.t[i] < t_half || !(e[i] > 0.0)) continue;
      double x = rep.t[i], y = std::log(e[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++cnt;
    }
    if (cnt < 2) return std::numeric_limits<double>::quiet_NaN();
    return -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  };
  rep.rate = fit(rep.e0);
  if (opt.track_e3) rep.rate_e3 = fit(rep.e3);
  if (rep.rate < 0.0 && rep.note.empty()) rep.note = "growth detected";
  return rep;
}

// ---- further identities -----------------------------------------------------

double l12_tilde_radial_norm2(const Grid& g, const Field& omega, double power) {
  Vec lt = l12_tilde(g, omega);
  return g.r_quad.dot((lt.array().square() * g.r.array().pow(-2.0 * power)).matrix());
}

AngularEnergyCheck angular_energy_check(const Grid& g, const LinState& s, const ProfileTriple& p) {
  AngularEnergyCheck c;
  Field phi2 = weight_field(g, WeightKind::phi2);
  LinState l = apply_linear(g, s, p);
  Field dbo = D_beta(g, s.omega), dbe = D_beta(g, s.eta);
  c.lhs = weighted_inner(g, D_beta(g, l.omega), dbo, phi2) + weighted_inner(g, D_beta(g, l.eta), dbe, phi2);
  c.e_beta1_sq = sq(g, dbo, phi2) + sq(g, dbe, phi2);
  double l0 = l12_zero(g, s.omega);
  c.l12_zero_sq = l0 * l0;
  c.l12t_norm_sq = l12_tilde_radial_norm2(g, s.omega, 1.0);
  const double a = g.alpha;
  double excess = c.lhs + (0.2 - a) * c.e_beta1_sq;
  double rhs_unit = a * (c.l12_zero_sq + c.l12t_norm_sq);
  c.c_needed = excess <= 0.0 ? 0.0 : (rhs_unit > 0.0 ? excess / rhs_unit : std::numeric_limits<double>::infinity());
  return c;
}

std::pair<double, double> ux_bound_sides(const Grid& g, const Field& omega, const Field& gfield, const Field& phi) {
  Field lt = radial_field(g, l12_tilde(g, omega));
  Field lg = lt.cwiseProduct(gfield);
  double lhs = weighted_inner(g, lg, lg, phi);
  Field R2 = radial_field(g, g.r.array().square().matrix());
  Vec ang = weighted_angular(g, R2.cwiseProduct(gfield).cwiseProduct(gfield), phi);
  double rhs = l12_tilde_radial_norm2(g, omega, 1.0) * ang.maxCoeff();
  return {lhs, rhs};
}

double db_commutation_residual(const Grid& g, const LinState& s) {
  LinState d{D_beta(g, s.omega), D_beta(g, s.eta), D_beta(g, s.xi)};
  Field a = D_beta(g, apply_local(g, LocalOp::L10, s));
  Field b = apply_local(g, LocalOp::L10, d);
  return (a - b).cwiseAbs().maxCoeff();
}

double nota_ux2_residual(const Grid& g, const Field& omega) {
  const double k = 2.0 / (kPi * g.alpha);
  const double cw = normalization(g, omega).c_omega;
  Vec lhs = (cw + k * l12(g, omega).array()).matrix();
  Vec rhs = k * l12_tilde(g, omega);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace bsq
