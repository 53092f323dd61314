#pragma once

#include "bsq/grid.hpp"

namespace bsq {

// Three fields evolved together: vorticity, theta_x, theta_y (or their perturbations).
struct Triple {
  Field omega, eta, xi;
};

Triple zero_triple(const Grid& g);
Triple operator+(const Triple& a, const Triple& b);
Triple operator-(const Triple& a, const Triple& b);
Triple operator*(double s, const Triple& a);
bool all_finite(const Triple& s);
double max_abs(const Triple& s);

// Classical four-stage Runge-Kutta step for y' = f(y).
template <class F, class Y>
Y rk4_step(F&& f, const Y& y, double dt) {
  Y k1 = f(y);
  Y k2 = f(y + (0.5 * dt) * k1);
  Y k3 = f(y + (0.5 * dt) * k2);
  Y k4 = f(y + dt * k3);
  return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace bsq
