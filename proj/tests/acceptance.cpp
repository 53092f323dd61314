// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "bsq/biot_savart.hpp"
#include "bsq/dynamics.hpp"
#include "bsq/inequality.hpp"
#include "bsq/linearized.hpp"
#include "bsq/profiles.hpp"
#include "bsq/toy.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace bsq;

namespace {

// Tolerances and budgets, pinned.
constexpr double kSelfSimTol = 1e-12, kSelfSimBudget = 1.0;
constexpr double kL12Tol = 1e-8, kL12Budget = 5.0;
constexpr double kEllTol = 1e-8, kOrthTol = 1e-10, kEllBudget = 30.0;
constexpr double kRatioCenter = 4.0, kRatioSpread = 0.35, kSlopeMin = 1.9, kResBudget = 120.0;
constexpr double kDampTol = 1e-6, kDampBudget = 60.0;
constexpr int kDampTrials = 100;
constexpr double kCertBudget = 10.0;
constexpr double kCancelTol = 1e-7, kCancelBudget = 30.0;
constexpr int kCancelFields = 20;
constexpr double kMonoTol = 1e-8, kRateMin = 0.05, kDecayBudget = 300.0;
constexpr int kDecaySeeds = 10;
constexpr double kTstarTol = 1e-10, kBlowupBudget = 1.0;
constexpr double kToyBudget = 60.0;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, double secs, double budget, const std::string& what) {
  bool in_time = secs < budget;
  if (!(ok && in_time)) ++failures;
  std::printf("%s criterion %d: %s [%.2f s, budget %.0f s%s]\n", ok && in_time ? "PASS" : "FAIL", id, what.c_str(),
              secs, budget, in_time ? "" : ", over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... xs) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, xs...);
  return buf;
}

void c1_selfsim() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-3.0, 2.0);
  std::vector<double> z(1000);
  for (double& x : z) x = std::pow(10.0, u(rng));
  double worst = 0.0;
  for (double a : {0.1, 0.05, 0.01}) worst = std::max(worst, verify_leading_residual(a, z));
  report(1, worst <= kSelfSimTol, since(t0), kSelfSimBudget,
         fmt("leading self-similar residual %.3e at 1000 z, alpha in {0.1, 0.05, 0.01} (tol %.0e)", worst, kSelfSimTol));
}

void c2_l12() {
  auto t0 = Clock::now();
  GridConfig gc;
  gc.alpha = 0.1;
  gc.n_r = 256;
  gc.n_beta = 64;
  Grid g = build_grid(gc);
  ProfileTriple p = approx_steady_state(g);
  Vec L = l12(g, p.omega_bar);
  double worst = 0.0;
  for (int i = 0; i < g.nr(); ++i) {
    double ex = 1.5 * std::numbers::pi * gc.alpha / (1.0 + g.r(i));
    worst = std::max(worst, std::abs(L(i) - ex) / ex);
  }
  report(2, worst <= kL12Tol, since(t0), kL12Budget,
         fmt("L12(profile) vs (3 pi alpha/2)/(1+R): max relative %.3e on 256x64 (tol %.0e)", worst, kL12Tol));
}

void c3_elliptic() {
  auto t0 = Clock::now();
  double err = 0.0, orth = 0.0;
  for (double a : {0.1, 0.05}) {
    GridConfig gc;
    gc.alpha = a;
    gc.n_r = 128;
    gc.n_beta = 64;
    Grid g = build_grid(gc);
    for (const auto& c : manufactured_suite(g)) {
      err = std::max(err, c.max_error);
      if (c.n == 1) orth = std::max(orth, c.orthogonality);
    }
  }
  report(3, err < kEllTol && orth < kOrthTol, since(t0), kEllBudget,
         fmt("manufactured n=1,2,4: max error %.3e (tol %.0e), n=1 orthogonality %.3e (tol %.0e)", err, kEllTol, orth,
             kOrthTol));
}

void c4_residual() {
  auto t0 = Clock::now();
  double h3o[2], h3e[2], slope = INFINITY;
  const double als[2] = {0.1, 0.05};
  for (int k = 0; k < 2; ++k) {
    GridConfig gc;
    gc.alpha = als[k];
    gc.n_r = 128;
    gc.n_beta = 64;
    Grid g = build_grid(gc);
    ResidualReport r = residual(g, approx_steady_state(g));
    h3o[k] = r.h3_omega;
    h3e[k] = r.h3_eta;
    slope = std::min(slope, r.slope_omega);
  }
  double qo = h3o[0] / h3o[1], qe = h3e[0] / h3e[1];
  auto in_band = [](double q) { return std::abs(q / kRatioCenter - 1.0) <= kRatioSpread; };
  report(4, in_band(qo) && in_band(qe) && slope >= kSlopeMin, since(t0), kResBudget,
         fmt("H3 ratios alpha 0.1/0.05: omega %.3f, eta %.3f (4 +- 35%%); small-R slope %.3f (>= %.1f)", qo, qe, slope,
             kSlopeMin));
}

void c5_damping() {
  auto t0 = Clock::now();
  GridConfig gc;
  gc.alpha = 0.1;
  gc.n_r = 64;
  gc.n_beta = 48;
  Grid g = build_grid(gc);
  const double gam = 1.0 + gc.alpha / 10.0;
  DampingReport a = damping_check(g, kSigma, kDampTrials, 1, kDampTol);
  DampingReport b = damping_check_xi(g, kSigma, kSigma, kDampTrials, 1, kDampTol);
  DampingReport c = damping_check_xi(g, kSigma, gam, kDampTrials, 1, kDampTol);
  int viol = a.violations + b.violations + c.violations;
  double worst = std::max({a.worst_margin, b.worst_margin, c.worst_margin});
  report(5, viol == 0, since(t0), kDampBudget,
         fmt("%d trials x 3 forms (constants %.3f, %.3f, %.3f): %d violations, worst margin %.3e (tol %.0e)",
             kDampTrials, a.constant, b.constant, c.constant, viol, worst, kDampTol));
}

void c6_certificates() {
  auto t0 = Clock::now();
  using namespace ineq;
  auto batch = [] {
    std::vector<double> lambdas, radii;
    for (int i = 0; i <= 19; ++i) lambdas.push_back(0.1 + 0.1 * i);
    for (int i = -16; i <= 16; ++i) radii.push_back(std::pow(10.0, i / 4.0));
    return std::vector<Certificate>{verify_damping_coefficients(), verify_cancel_coe_and_cw_count(0.1),
                                    verify_D_bounds(radii), verify_integrals(),
                                    verify_lemma_one(0.1, lambdas, {0.1, 0.05, 0.001})};
  };
  auto first = batch();
  double secs = since(t0);
  auto again = batch();
  bool ok = true, same = true;
  std::string names;
  for (std::size_t i = 0; i < first.size(); ++i) {
    ok = ok && all_verified(first[i]);
    same = same && first[i].margin == again[i].margin && first[i].witness == again[i].witness;
    names += (i ? ", " : "") + first[i].name + "=" + to_string(first[i].status);
  }
  report(6, ok && same, secs, kCertBudget, names + (same ? "; repeat run identical" : "; repeat run DIFFERS"));
}

void c7_cancellation() {
  auto t0 = Clock::now();
  auto a = ineq::verify_cancellation_lemma(2.0, kCancelFields, 1, 0.1, kCancelTol);
  auto b = ineq::verify_cancellation_lemma(3.0, kCancelFields, 1, 0.1, kCancelTol);
  bool ok = ineq::all_verified(a) && ineq::all_verified(b);
  report(7, ok, since(t0), kCancelBudget,
         fmt("%d fields, k=2: %s, k=3: %s (tol %.0e)", kCancelFields, a.witness.c_str(), b.witness.c_str(), kCancelTol));
}

void c8_decay() {
  auto t0 = Clock::now();
  GridConfig gc;
  gc.alpha = 0.05;
  gc.n_r = 64;
  gc.n_beta = 48;
  Grid g = build_grid(gc);
  ProfileTriple p = approx_steady_state(g);
  DecayOptions o;
  o.T = 20.0;
  o.dt = 0.01;
  o.mono_tol = kMonoTol;
  o.record_every = 10;
  int mono = 0;
  double rmin = INFINITY, rmax = -INFINITY;
  for (int sd = 0; sd < kDecaySeeds; ++sd) {
    LinState s{random_trial_field(g, 10 * sd + 1), random_trial_field(g, 10 * sd + 2), random_trial_field(g, 10 * sd + 3)};
    DecayReport r = decay_rate(g, s, p, LinearMode::leading_linear, o);
    mono += r.monotone ? 1 : 0;
    rmin = std::min(rmin, r.rate);
    rmax = std::max(rmax, r.rate);
  }
  report(8, mono == kDecaySeeds && rmin >= kRateMin, since(t0), kDecayBudget,
         fmt("alpha 0.05, %d seeds: %d monotone (per-step tol %.0e), fitted rates %.3f..%.3f (>= %.2f)", kDecaySeeds,
             mono, kMonoTol, rmin, rmax, kRateMin));
}

void c9_blowup() {
  // The measured trajectory: a short nonlinear run near the profile (not part of the budget).
  GridConfig gc;
  gc.alpha = 0.05;
  gc.n_r = 48;
  gc.n_beta = 32;
  Grid g = build_grid(gc);
  ProfileTriple p = approx_steady_state(g);
  RunOptions ro;
  ro.t_end = 5.0;
  ro.dt = 0.01;
  ro.energies = false;
  Triple init{random_trial_field(g, 1), random_trial_field(g, 2), random_trial_field(g, 3)};
  Trajectory tr = run(g, p, 1e-3 * init, ro);

  auto t0 = Clock::now();
  std::vector<double> tau, cst;
  for (int i = 0; i <= 4000; ++i) {
    tau.push_back(i * 0.01);
    cst.push_back(-1.0);
  }
  double e1 = std::abs(blowup_time(tau, cst, gc.alpha).T_star - 1.0);
  std::vector<double> mt, mc;
  for (const auto& pt : tr.points) {
    mt.push_back(pt.tau);
    mc.push_back(pt.c_omega);
  }
  BlowupReport b = blowup_time(mt, mc, gc.alpha);
  bool bracket = b.blowup && !tr.aborted;
  for (std::size_t i = 1; i < mt.size() && bracket; ++i)
    bracket = std::exp(-1.5 * mt[i]) < b.C_omega[i] && b.C_omega[i] < std::exp(-0.5 * mt[i]);
  bool ok = e1 <= kTstarTol && bracket && b.T_star > 2.0 / 3.0 && b.T_star < 2.0;
  report(9, ok, since(t0), kBlowupBudget,
         fmt("constant c=-1: |T*-1| = %.2e (tol %.0e); measured run to tau=%.1f: bracket %s, T* = %.6f in (2/3, 2)", e1,
             kTstarTol, mt.empty() ? 0.0 : mt.back(), bracket ? "holds" : "VIOLATED", b.T_star));
}

void c10_toy() {
  auto t0 = Clock::now();
  toy::Theta0 th = toy::holder_sample(0.1);
  toy::ToyOptions o;
  o.T = 100.0;
  o.dt = 0.1;
  toy::ToyTrajectory tr = toy::evolve_toy(th, o);
  double K = toy::K_constant(th);
  int bad = 0;
  for (const auto& pt : tr.points)
    if (pt.I > 0.0 && std::abs(pt.rate) > K * pt.I / (pt.mu * pt.mu)) ++bad;
  bool ok = !tr.aborted && std::isfinite(tr.mu_max) && bad == 0 && tr.points.back().t >= 100.0 - 1e-9;
  report(10, ok, since(t0), kToyBudget,
         fmt("Hoelder sample a=0.1, T=100: sup mu = %.4f, |mu'/mu| <= K mu^-2 I at all %zu points (K = %.4f, worst "
             "ratio %.4f, %d violations)",
             tr.mu_max, tr.points.size(), K, toy::max_K_ratio(tr), bad));
}

}  // namespace

int main() {
  c1_selfsim();
  c2_l12();
  c3_elliptic();
  c4_residual();
  c5_damping();
  c6_certificates();
  c7_cancellation();
  c8_decay();
  c9_blowup();
  c10_toy();
  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
