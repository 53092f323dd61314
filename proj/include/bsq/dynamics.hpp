#pragma once

#include "bsq/biot_savart.hpp"
#include "bsq/config.hpp"
#include "bsq/profiles.hpp"
#include "bsq/state.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bsq {

struct RescaledState {
  Triple f;  // total or perturbation fields, depending on the caller
  double tau = 0.0;
  double c_omega = 0.0, c_l = 0.0, c_theta = 0.0;
  void set_scaling(double cw, double cl) {
    c_omega = cw;
    c_l = cl;
    c_theta = cl + 2.0 * cw;
  }
};

struct Normalization {
  double c_omega = 0.0, c_l = 0.0;
};
// c_omega = -(2/(pi alpha)) L12(Omega)(0), c_l = ((1-alpha)/alpha) c_omega.
Normalization normalization(const Grid& g, const Field& omega);

// ---- leading-order system -------------------------------------------------

enum class LeadingForm { physical, rescaled };
// physical: Omega_t = eta, eta_t = (2/(pi alpha)) L12(Omega) eta.
// rescaled: adds c_omega / c_l scaling terms. xi is carried as zero.
Triple leading_rhs(const Grid& g, const Triple& s, LeadingForm form, double c_omega = 0.0, double c_l = 0.0);

// Closed-form self-similar trajectory of the physical leading system (blowup at T).
Triple leading_exact(const Grid& g, double t, double T, double c);

// ---- full system ------------------------------------------------------------

struct Derivs {
  Field omega_dr, omega_db, eta_dr, eta_db, xi_dr, xi_db;
};
Derivs numeric_derivs(const Grid& g, const Triple& s);
Derivs profile_derivs(const ProfileTriple& p);
Derivs operator+(const Derivs& a, const Derivs& b);

// Right side of the rescaled Boussinesq system for total fields; u.grad and the velocity
// gradients come from the stream function of total vorticity. c_omega = c_l = 0 gives the
// unrescaled equations.
Triple full_rhs(const Grid& g, const StreamSolver& solver, const Triple& total, const Derivs& d, double c_omega,
                double c_l);
Triple full_rhs(const Grid& g, const StreamSolver& solver, const Triple& total, double c_omega, double c_l);

// Time derivative of a perturbation about the profile, with c = c_bar + normalization(perturbation).
Triple perturbation_rhs(const Grid& g, const StreamSolver& solver, const ProfileTriple& p, const Triple& pert);
// Linear part of perturbation_rhs. The map is quadratic in the perturbation, so the odd part is exact.
Triple full_linear_rhs(const Grid& g, const StreamSolver& solver, const ProfileTriple& p, const Triple& pert);

// ---- profile residual ---------------------------------------------------------

struct ResidualReport {
  Triple F;
  double h3_omega = 0, h3_eta = 0, h3_xi = 0;
  double slope_omega = 0, slope_eta = 0;  // log-log slope of max_beta |F| for R in [r_lo, r_hi]
  double r_lo = 1e-3, r_hi = 0.1;
};
ResidualReport residual(const Grid& g, const ProfileTriple& p, int n_modes = 0);
// Least-squares slope of log max_beta |f| against log R over nodes in [r_lo, r_hi].
double small_r_slope(const Grid& g, const Field& f, double r_lo, double r_hi);

// ---- time stepping --------------------------------------------------------------

// Largest dt allowed by the transport speeds, times cfl.
double transport_dt(const Grid& g, const Field& c_r, const Field& c_b, double cfl);

struct TrajectoryPoint {
  double tau = 0, c_omega = 0, c_l = 0, e0 = 0, e3 = 0, l12_zero = 0, support = 0, t_of_tau = 0;
};
struct Trajectory {
  std::vector<TrajectoryPoint> points;
  // Integrated factors at the recorded points.
  std::vector<double> C_omega, C_l;
  Triple last;
  bool aborted = false;
  std::string note;
  int steps = 0;
};

struct RunOptions {
  double dt = 0.01;
  double t_end = 20.0;
  double cfl = 0.5;
  double output_every = 0.1;
  int n_modes = 0;
  MuConfig mu;
  bool energies = true;
};

// Nonlinear evolution of a perturbation about the profile.
Trajectory run(const Grid& g, const ProfileTriple& p, const Triple& init, const RunOptions& opt);

// ---- blowup time ------------------------------------------------------------------

struct BlowupReport {
  bool blowup = false;
  double T_star = 0.0;
  std::vector<double> C_omega, t_of_tau, M;  // at the samples
  std::string note;
};
// tau samples (increasing, tau[0] = 0) and total c_omega at the samples.
BlowupReport blowup_time(const std::vector<double>& tau, const std::vector<double>& c_omega, double alpha);

// ---- checks -----------------------------------------------------------------------

// Omega_s(R) = tau_s^-1 Omega(l R), eta_s = tau_s^-2 eta(l R) with l = lambda^alpha.
Triple rescale_state(const Grid& g, const Triple& s, double l, double tau_s);
// Max difference between "rescale then advance" and "advance then rescale" for the
// unrescaled equations, relative to the change of the fields over the run, over nodes with
// R <= r_cmp.
double scaling_commutation_error(const Grid& g, const Triple& init, double l, double tau_s, double t, double dt,
                                 double r_cmp = 10.0);

struct L12OdeCheck {
  double max_rel_fd = 0.0;     // 4th-order difference of the stored L12(0) against the ODE, over max |ODE|
  double max_rel_exact = 0.0;  // L12 of the right side against the ODE
  std::vector<double> t, l12_zero, ode;
};
// Integrates the linearized system and compares d/dt L12(Omega)(0) with
// -4 L12(0) + L12(eta)(0) - 3 L12(D_b Omega/(1+R))(0).
L12OdeCheck l12_ode_check(const Grid& g, const ProfileTriple& p, const Triple& init, double T, double dt);

}  // namespace bsq
