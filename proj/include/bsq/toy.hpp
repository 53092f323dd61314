#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bsq::toy {

// Initial density with supp(d1 theta0) in [-1,1]^2, even in x1 and odd in x2.
// Only the first quadrant is ever sampled.
struct Theta0 {
  std::string name;
  std::function<double(double, double)> theta;     // theta0
  std::function<double(double, double)> d1theta;   // d/dx1 theta0
  std::function<double(double, double)> d11theta;  // these two enter the omega residual only
  std::function<double(double, double)> d12theta;
  // Hoelder constant: |theta0(x1,x2) - theta0(0,x2)| <= holder * |x1|^holder_exp |x2|.
  double holder = 0.0, holder_exp = 1.0;
};

// zeta(x) = exp(1 - 1/(1-x^2)) on (-1,1), zero outside; zeta(0) = 1.
double bump(double x);
double bump_d1(double x);
double bump_d2(double x);

// |x1|^{1+a} zeta(x1) x2 zeta(x2): C^{1,a} but not C^2 at x1 = 0.
Theta0 holder_sample(double a);
// x1^2 zeta(x1) x2 zeta(x2).
Theta0 smooth_sample();
Theta0 zero_sample();

// J(mu) = int_0^inf int_0^inf y1 y2 / |y|^4 (d1 theta0)(mu y1, y2/mu) dy.
double J_integral(double mu, const Theta0& th);

// The integrated-by-parts form J = J1 + J2 with theta~ = theta0 - theta0(0, .).
struct JParts {
  double J1 = 0, J2 = 0;
};
JParts J_parts(double mu, const Theta0& th);

// 4 H (pi/4 + C/a) with C = int_0^inf |z^2 (z^2-3)| / (1+z^2)^3 dz: the explicit
// constant of |mu'/mu| <= K mu^-2 int_0^t mu.
double K_constant(const Theta0& th);

struct ToyPoint {
  double t = 0, mu = 1, I = 0, J = 0;
  double rate = 0;  // mu'/mu = 4 I J
};
struct ToyTrajectory {
  std::vector<ToyPoint> points;
  bool aborted = false;
  std::string note;
  double mu_max = 1.0;
};

struct ToyOptions {
  double T = 100.0;
  double dt = 0.1;
  double mu_overflow = 1e12;
  bool zero_coupling = false;  // forces J = 0
};

// RK4 on (mu, I): mu' = 4 I J(mu) mu, I' = mu, mu(0) = 1, I(0) = 0.
ToyTrajectory evolve_toy(const Theta0& th, const ToyOptions& opt);

// ---- trajectory checks ------------------------------------------------------------

// max over the trajectory of |mu'/mu| / (mu^-2 I) (0 where I = 0).
double max_K_ratio(const ToyTrajectory& tr);
// max |I_stored - trapezoid(mu)| / max(1, I).
double trapezoid_I_error(const ToyTrajectory& tr);
// omega(x,t) = (d1 theta0)(mu x1, x2/mu) I(t) substituted into
// omega_t - lambda (x1 d1 - x2 d2) omega = d1 theta, lambda = mu'/mu. omega_t is a central
// difference of the trajectory, the space derivatives are exact. Relative to max |d1 theta|.
double omega_residual(const ToyTrajectory& tr, const Theta0& th, const std::vector<std::pair<double, double>>& x);

}  // namespace bsq::toy
