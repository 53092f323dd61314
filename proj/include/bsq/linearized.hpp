#pragma once

#include "bsq/biot_savart.hpp"
#include "bsq/config.hpp"
#include "bsq/profiles.hpp"
#include "bsq/state.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bsq {

// Perturbation fields around the approximate steady state.
using LinState = Triple;

enum class LocalOp { L10, L20, L30 };
enum class FullOp { L1, L2, L3 };

Field apply_local(const Grid& g, LocalOp which, const LinState& s);
Field apply_full(const Grid& g, FullOp which, const LinState& s, const ProfileTriple& p);
// (L1, L2, L3) applied together; shares the L12 evaluation.
LinState apply_linear(const Grid& g, const LinState& s, const ProfileTriple& p);

// ---- norms ----------------------------------------------------------------

double l2w_norm(const Grid& g, const Field& f, WeightKind k);
enum class WeightFamily { phi, psi };
// H^m(rho) norm: sum_k ||D_R^k f rho1^1/2|| + sum_{i+j<=m-1} ||D_R^i D_b^{j+1} f rho2^1/2||.
double hm_norm(const Grid& g, const Field& f, int m, WeightFamily fam);
// ||f||_inf + ||phi1 D_R f||_inf + ||phi2 D_b f||_inf.
double c1_norm(const Grid& g, const Field& f);
// W^{l,inf}: angular-derivative terms carry sin(2b)^{-alpha/5} / (alpha/10 + sin 2b).
double w_inf_norm(const Grid& g, const Field& f, int l);
// Values above this are reported as divergent (+inf).
inline constexpr double kNormOverflow = 1e150;

// ---- energies -------------------------------------------------------------

struct EnergyReport {
  double E_beta1 = 0, E_R0 = 0, E_R1 = 0, E_R2 = 0;
  double E0 = 0, E1 = 0, E2 = 0, E3 = 0, E_xi_inf = 0, E_total = 0;
  double mu0 = 0;
  MuConfig mu;
  double l12_zero = 0, c_omega = 0, c_l = 0;
  // Pieces of E(R,0)^2.
  double omega_phi0 = 0, eta_psi0 = 0, l12_term = 0;
};

// Precomputed weight fields for repeated energy evaluations on one grid.
struct WeightCache {
  Field phi0, phi1, phi2, psi0, psi1, psi2, c1_phi1, c1_phi2;
  explicit WeightCache(const Grid& g);
};

double mu0_constant(double c);
EnergyReport energy(const Grid& g, const LinState& s, const ProfileTriple& p, const MuConfig& mu);
EnergyReport energy(const Grid& g, const WeightCache& w, const LinState& s, const ProfileTriple& p,
                    const MuConfig& mu);
// E0 alone (cheaper).
double energy_e0(const Grid& g, const WeightCache& w, const LinState& s, const ProfileTriple& p, const MuConfig& mu);

// ---- damping quadratic forms ----------------------------------------------

// Random smooth trial fields: polynomials in x = R/(1+R) vanishing like x^2 at R = 0 and
// like 1-x at infinity, times sin(2 n beta), n <= n_max.
Field random_trial_field(const Grid& g, std::uint64_t seed, int n_max = 4);

struct DampingTrial {
  std::uint64_t seed = 0;
  double q = 0, bound = 0, scale = 0, margin = 0;  // margin = (q - bound) / scale
  double q_ibp = 0;                                 // integration-by-parts evaluation of q
};
struct DampingReport {
  double constant = 0;     // -1/4 + 3|1-d| or -1/2 + 3 max|1-d_i|
  double worst_margin = 0;  // max over trials; <= tol means pass
  double tol = 0;
  int violations = 0;
  std::uint64_t worst_seed = 0;
  double worst_ibp_gap = 0;  // max relative |q - q_ibp|
  std::vector<DampingTrial> trials;
};
// The (Omega, eta) form with weight (1+R)^4 R^-4 sin(2b)^-delta.
DampingReport damping_check(const Grid& g, double delta, int trials, std::uint64_t seed0 = 1, double tol = 1e-6);
// The xi form with weight (1+R)^4 R^-4 sin(b)^-d1 cos(b)^-d2.
DampingReport damping_check_xi(const Grid& g, double d1, double d2, int trials, std::uint64_t seed0 = 1,
                               double tol = 1e-6);

// ---- linearized evolution ---------------------------------------------------

enum class LinearMode { leading_linear, full_linear };

struct DecayReport {
  bool zero_state = false;
  double rate = 0;               // fitted -d ln E0 / dt on the last half
  double rate_e3 = 0;
  bool monotone = true;          // E0 nonincreasing within the per-step tolerance
  double max_rel_increase = 0;   // max (E0(n+1) - E0(n)) / E0(n)
  std::vector<double> t, e0, e3, c_omega, l12_zero;
  std::string note;
};

struct DecayOptions {
  double T = 20.0;
  double dt = 0.01;
  double mono_tol = 1e-8;
  int record_every = 1;
  bool track_e3 = false;
  MuConfig mu;
  int n_modes = 0;
};

DecayReport decay_rate(const Grid& g, const LinState& init, const ProfileTriple& p, LinearMode mode,
                       const DecayOptions& opt);
LinState rk4_linear_step(const Grid& g, const LinState& s, const ProfileTriple& p, double dt);

// ---- further identities -----------------------------------------------------

// <D_b L1, D_b Omega phi2> + <D_b L2, D_b eta phi2> and the pieces of the right side.
struct AngularEnergyCheck {
  double lhs = 0, e_beta1_sq = 0, l12_zero_sq = 0, l12t_norm_sq = 0;
  double c_needed = 0;  // smallest C making the inequality hold for this state
};
AngularEnergyCheck angular_energy_check(const Grid& g, const LinState& s, const ProfileTriple& p);

// ||R^-1 L12~||^2_{L2(R)} for the given vorticity.
double l12_tilde_radial_norm2(const Grid& g, const Field& omega, double power = 1.0);

// <L12~^2 g^2, phi> and ||R^-1 L12~||^2 max_R int R^2 g^2 phi dbeta.
std::pair<double, double> ux_bound_sides(const Grid& g, const Field& omega, const Field& gfield, const Field& phi);

// max |D_b L10(Omega, eta) - L10(D_b Omega, D_b eta)|.
double db_commutation_residual(const Grid& g, const LinState& s);

// |c_omega + (2/(pi alpha)) L12(R) - (2/(pi alpha)) L12~(R)| maximised over R.
double nota_ux2_residual(const Grid& g, const Field& omega);

}  // namespace bsq
