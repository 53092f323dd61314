#pragma once

#include "bsq/grid.hpp"

#include <vector>

namespace bsq {

// Closed-form self-similar pair of the leading-order system.
template <class T>
std::pair<T, T> leading_profile(T z) {
  T d = T(1) + z;
  return {T(3) * z / (d * d), T(6) * z / (d * d * d)};
}

// Max residual of the two steady equations (c_l = 1/alpha, profile amplitude
// 3 alpha / c) over the samples, using the exact tail integral 3/(1+z).
double verify_leading_residual(double alpha, const std::vector<double>& z);

// c = (2/pi) int_0^{pi/2} Gamma sin(2 beta) dbeta.
double profile_c(const Grid& g);
inline double profile_c_exact(double alpha) { return 4.0 / (std::numbers::pi * (alpha + 2.0)); }

struct ProfileTriple {
  double alpha = 0.0;
  double c = 0.0;
  double c_l_bar = 0.0;      // 1/alpha + 3
  double c_omega_bar = -1.0;
  Field omega_bar, eta_bar, xi_bar;
  // Derivatives from the closed forms (omega, eta) or differentiated quadratures (xi).
  Field omega_dr, omega_db, eta_dr, eta_db, xi_dr, xi_db;
};

struct ProfileOptions {
  bool flat_gamma = false;   // diagnostic: replace Gamma by 1
  double xi_tol = 1e-10;
};

ProfileTriple approx_steady_state(const Grid& g, const ProfileOptions& opt = {});

// xi-bar and its derivatives at a single point.
struct XiPoint {
  double xi, dr, db;
};
XiPoint xi_bar_point(double R, double sinb, double cosb, double alpha, double c, double tol = 1e-10);

// theta-bar(x, y) = int_0^x eta-bar(z, y) dz in Cartesian variables.
double theta_bar(double x, double y, double alpha, double c);
// eta-bar in Cartesian variables.
double eta_bar_xy(double x, double y, double alpha, double c);
// J(eta-bar) = theta-bar / x on the grid.
Field j_eta_bar(const Grid& g, double c, double tol = 1e-10);

struct XiBoundsReport {
  double k_branch = 0.0;     // smallest K with |xi| <= K alpha^2 R^2/(1+R) * branch
  double k_cos = 0.0;        // smallest K with -xi <= K alpha^2 cos(beta)
  double k_c1 = 0.0;         // ||xi||_C1 / alpha^2
  double xi_psi1 = 0.0;      // <xi^2, psi1>
  double max_xi = 0.0;       // max(xi) (should be <= 0)
  double max_boundary = 0.0; // max |xi| on the row nearest beta = pi/2
};
XiBoundsReport check_xi_bounds(const Grid& g, const ProfileTriple& p);

// Quintic smoothstep cutoff: 1 on [0,1], 0 on [2, inf).
double cutoff(double s);
double cutoff_dr(double s);  // s chi'(s)

ProfileTriple truncate_profile(const Grid& g, const ProfileTriple& p, double lambda);

// Max nodal residuals of D_R omega = c_w omega + eta and D_R eta = 2 c_w eta + 3 eta/(1+R).
std::pair<double, double> profile_relation_residuals(const Grid& g, const ProfileTriple& p);

// Bound constants K with |D_R^k f| <= K f for the four profile quantities, k <= 3,
// evaluated with the grid differentiation.
double lem_bar_constant(const Grid& g, const ProfileTriple& p);

}  // namespace bsq
