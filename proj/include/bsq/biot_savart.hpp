#pragma once

#include "bsq/grid.hpp"

#include <vector>

namespace bsq {

// Omega_*(R) = int_0^{pi/2} Omega sin(2 beta) dbeta.
Vec omega_star(const Grid& g, const Field& omega);
// L12(Omega)(R) = int_R^inf Omega_*(s)/s ds, and its value at R = 0.
Vec l12(const Grid& g, const Field& omega);
double l12_zero(const Grid& g, const Field& omega);
Vec l12_tilde(const Grid& g, const Field& omega);

struct StreamSolution {
  Field psi;       // full stream function
  Field psi_star;  // psi - sin(2 beta) l12 / (pi alpha)
  Vec l12;
  double l12_zero = 0.0;
  Vec g_bar;       // regular part of the sin(2 beta) correction
  Mat modes;       // radial coefficients Psi_n(R), n = 1..M (columns)
  // Derivatives: d_beta psi, D_R psi, D_R^2 psi, d_beta D_R psi, d_beta^2 psi.
  Field psi_b, psi_r, psi_rr, psi_rb, psi_bb;
  // (2 psi + alpha D_R psi) / sin(2 beta), evaluated from the modes.
  Field ab_over_s2;
  // Per-mode maximum collocation residual.
  Vec mode_residual;
};

struct VelocityPack {
  Field u, v, u_x, u_y, v_x, v_y;
  Field u_x_lead;  // -(2/(pi alpha)) L12
  Field u_x_rest;  // U1(Psi, Psi_*)
};

// Coefficients of u.grad = c_r D_R + c_b D_beta.
struct TransportCoeffs {
  Field a_r;        // coefficient of d_R: -alpha R d_beta psi
  Field a_beta;     // coefficient of d_beta: 2 psi + alpha D_R psi
  Field c_r;        // coefficient of D_R: -alpha d_beta psi
  Field c_b;        // coefficient of D_beta: a_beta / sin(2 beta)
  Field lead_b;     // (2/(pi alpha)) L12, leading part of c_b
};

class StreamSolver {
 public:
  StreamSolver(const Grid& g, int n_modes = 0);
  StreamSolution solve(const Field& omega) const;
  int n_modes() const { return M_; }
  const Grid& grid() const { return *g_; }

  // Nodal angular basis: sin(2 n beta_j), cos(2 n beta_j), sin(2 n beta)/sin(2 beta).
  const Mat& sin_basis() const { return S_; }
  const Mat& cos_basis() const { return C_; }

 private:
  const Grid* g_;
  int M_;
  double alpha_;
  Mat S_, C_, Q_, P_;
  Mat Dr2_;
  std::vector<Eigen::PartialPivLU<Mat>> lu_;
  Eigen::PartialPivLU<Mat> lu_h_;
  std::vector<Mat> ops_;
  Mat op_h_;
};

StreamSolution solve_stream(const Grid& g, const Field& omega, int n_modes = 0);

// Applies L_alpha(psi) = -alpha^2 D_R^2 psi - 4 alpha D_R psi - d_beta^2 psi - 4 psi with analytic
// angular derivatives for psi = sum_n f_n(R) sin(2 n beta).
Field apply_elliptic(const Grid& g, const Mat& modes, const Mat& sin_basis);

VelocityPack velocity(const Grid& g, const StreamSolution& s, const Field& omega);
TransportCoeffs transport_coeffs(const Grid& g, const StreamSolution& s);
// (u.grad) f from the D_R and D_beta derivatives of f.
Field apply_transport(const TransportCoeffs& tc, const Field& f_dr, const Field& f_db);

// Residual of the sin(2 beta) projection of L_alpha(psi) - omega at every radial node,
// relative to max |Omega|.
double orthogonality_residual(const Grid& g, const StreamSolution& s, const Field& omega);

// Manufactured solutions Psi = sin(2 n beta) R^2/(1+R)^4 for n in {1, 2, 4}: Omega = L_alpha(Psi)
// analytically, then solved back.
struct ManufacturedCase {
  int n = 0;
  double max_error = 0.0;       // max nodal |psi - Psi| / max |Psi|
  double mode_residual = 0.0;   // max collocation residual over the modes
  double orthogonality = 0.0;   // orthogonality_residual after the n = 1 correction
};
std::vector<ManufacturedCase> manufactured_suite(const Grid& g, int n_modes = 0);

}  // namespace bsq
