#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace bsq {

using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;
using Mat = Eigen::MatrixXd;
// Nodal values on the (R, beta) grid: rows are radial nodes, columns angular nodes.
using Field = Eigen::MatrixXd;

inline constexpr double kSigma = 0.99;

enum class Spacing { mapped, geometric };

Spacing parse_spacing(const std::string& s);
std::string to_string(Spacing s);

struct GridConfig {
  double alpha = 0.1;
  double r_max = 100.0;  // truncation radius (geometric spacing only)
  int n_r = 64;
  int n_beta = 64;
  Spacing spacing = Spacing::mapped;
  double r_floor = 1e-6;    // first radial node (geometric)
  double r_scale = 1.0;     // R = r_scale (1+x)/(1-x) (mapped)
  double t_span = 30.0;     // angular nodes cover |ln tan(beta)| <= t_span
  double t_stretch = 1.0;   // ln tan(beta) = t_stretch * sinh(u), u uniform
  int stencil = 9;          // finite-difference / local quadrature stencil width
  double tail_decay = 0.0;  // geometric: power-law exponent of the L12 tail model, 0 = none
};

struct Grid {
  GridConfig cfg;
  double alpha = 0.0;
  double r_max = 0.0;  // +inf for the mapped spacing

  Vec r;           // radial nodes, increasing
  Vec r_quad;      // weights for the integral over R
  Mat Dr;          // R d/dR
  Mat Ltail;       // (Ltail g)_i = int_{R_i}^inf g(s)/s ds
  RowVec Lzero;    // int_0^inf g(s)/s ds

  // Angular nodes, beta in (0, pi/2), stored with the variable t = ln tan(beta).
  Vec t, u, beta, sinb, cosb, sin2b, cos2b, eps;  // eps = pi/2 - beta
  Vec b_core;      // interior weights for the integral over beta
  Vec b_quad;      // b_core plus constant extrapolation onto the two end gaps
  Mat Db;          // sin(2 beta) d/dbeta acting on angular columns
  Mat DbT;

  int nr() const { return static_cast<int>(r.size()); }
  int nb() const { return static_cast<int>(beta.size()); }

  // Interpolation matrix from radial nodes to arbitrary radii.
  Mat radial_interp(const Vec& rq) const;
};

Grid build_grid(const GridConfig& cfg);

// ---- scalar formulas -------------------------------------------------------

template <class T>
T gamma(T beta, T alpha) {
  using std::cos;
  using std::pow;
  // cos(pi/2) rounds to 6e-17, whose alpha-th power is far from 0.
  if (beta >= T(std::numbers::pi / 2)) return T(0);
  T c = cos(beta);
  if (c <= T(0)) return T(0);
  return pow(c, alpha);
}

enum class WeightKind { phi0, phi1, phi2, psi0, psi1, psi2, rho, c1_phi1, c1_phi2 };

std::string to_string(WeightKind k);

template <class T>
T weight_sc(WeightKind k, T R, T s, T c, T alpha) {
  using std::pow;
  const T sigma = T(kSigma);
  const T gam = T(1) + alpha / T(10);
  const T s2 = T(2) * s * c;
  const T rad4 = pow((T(1) + R) / R, T(4));
  switch (k) {
    case WeightKind::phi0: return pow((T(1) + R) / R, T(3)) * s2;
    case WeightKind::phi1: return rad4 * pow(s2, -sigma);
    case WeightKind::phi2: return rad4 * pow(s2, -gam);
    case WeightKind::psi1: return rad4 * pow(s * c, -sigma);
    case WeightKind::psi2: return rad4 * pow(s, -sigma) * pow(c, -gam);
    case WeightKind::psi0:
      return T(3) / T(16) *
             (pow(T(1) + R, T(3)) / pow(R, T(4)) + T(3) / T(2) * pow(T(1) + R, T(4)) / pow(R, T(3))) /
             pow(c, alpha);
    case WeightKind::rho: return pow(R, T(-3)) + pow(R, T(-2));
    case WeightKind::c1_phi1: return (T(1) + R) / R;
    case WeightKind::c1_phi2: return T(1) + pow(R * pow(s2, alpha), T(-1) / T(40));
  }
  return T(0);
}

template <class T>
T weight(WeightKind k, T R, T beta, T alpha) {
  using std::cos;
  using std::sin;
  return weight_sc(k, R, T(sin(beta)), T(cos(beta)), alpha);
}

std::pair<double, double> to_polar(double x, double y, double alpha);
std::pair<double, double> from_polar(double R, double beta, double alpha);

// ---- grid operators -------------------------------------------------------

inline Field D_R(const Grid& g, const Field& f) { return g.Dr * f; }
inline Field D_beta(const Grid& g, const Field& f) { return f * g.DbT; }
// D_R for fields vanishing like R^2 at R = 0 (perturbations), evaluated as
// q^-1 D_R(q f) + 2 f/(1+R) with q = ((1+R)/R)^2. Same operator; plain collocation of D_R
// carries discrete modes ~R^0 near R = 0 which the eta equation amplifies like e^t, while
// in this form the weight's damping is explicit and transport stays spectrally stable.
Field D_R_vanishing(const Grid& g, const Field& f);

Field gamma_field(const Grid& g);
Field weight_field(const Grid& g, WeightKind k);
// Radial function broadcast over the angular nodes / angular function over radii.
Field radial_field(const Grid& g, const Vec& f);
Field angular_field(const Grid& g, const Vec& f);

// int_0^{pi/2} f dbeta at every radial node (plain rule, no singular weight).
Vec angular_integral(const Grid& g, const Field& f);
// int int f dR dbeta.
double integrate(const Grid& g, const Field& f);
// End treatment for angular integrals against singular weights.
//   fitted:    the gaps between the extreme angular nodes and the boundary are filled with a
//              local power-law fit (static fields, profile norms).
//   truncated: the integral stops at the extreme nodes, |t| <= t_span. A fixed quadratic
//              form; used for energies of evolving fields, for which anything carried past
//              the last node has left the discrete system through the outflow end.
enum class AngularTail { fitted, truncated };

// int int f h w dR dbeta for a singular weight w.
double weighted_inner(const Grid& g, const Field& f, const Field& h, WeightKind k,
                      AngularTail tail = AngularTail::fitted);
// Per-radius angular integral of Q w with the same end treatment; the one-argument form
// treats the integrand as a single (field-like) factor.
Vec weighted_angular(const Grid& g, const Field& Q, const Field& w, AngularTail tail = AngularTail::fitted);
Vec weighted_angular(const Grid& g, const Field& P);
double weighted_inner(const Grid& g, const Field& f, const Field& h, const Field& w,
                      AngularTail tail = AngularTail::fitted);
inline double wnorm2(const Grid& g, const Field& f, WeightKind k) { return weighted_inner(g, f, f, k); }

// Finite-difference weights (Fornberg) for the m-th derivative at x0.
Vec fd_weights(double x0, const Vec& x, int m);
// Cumulative integration matrix on increasing nodes: (C f)_i = int_{x_0}^{x_i} f.
Mat cumulative_integration(const Vec& x, int stencil);

}  // namespace bsq
