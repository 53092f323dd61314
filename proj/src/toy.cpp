#include "bsq/toy.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bsq::toy {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr double kPi = std::numbers::pi;
constexpr double kInnerTol = 1e-10;
constexpr double kOuterTol = 1e-10;
constexpr double kFloor = 1e-16;

// Adaptive bisection on 31-point Kronrod panels, stopping at tolerance * L1 or at an absolute
// floor. The floor matters where the bump underflows (near s = 1) and a purely relative test
// never terminates.
template <class F>
double gk_adapt(F& f, double a, double b, double floor, int depth) {
  double err = 0.0, l1 = 0.0;
  double v = GK::integrate(f, a, b, 0, kInnerTol, &err, &l1);
  if (depth == 0 || err <= std::max(kInnerTol * l1, floor)) return v;
  double m = 0.5 * (a + b);
  return gk_adapt(f, a, m, 0.5 * floor, depth - 1) + gk_adapt(f, m, b, 0.5 * floor, depth - 1);
}

template <class F>
double gk(F f, double a, double b, double floor = 0.0) {
  if (!(b > a)) return 0.0;
  return gk_adapt(f, a, b, floor, 15);
}

// Separable theta0 = P0(x1) Q0(x2) with P0 even, Q0 odd.
struct Factor {
  std::function<double(double)> f, d, dd;
};

Theta0 separable(std::string name, Factor p, Factor q, double holder, double holder_exp) {
  Theta0 t;
  t.name = std::move(name);
  auto sg = [](double x) { return x < 0 ? -1.0 : 1.0; };
  t.theta = [p, q](double x1, double x2) { return p.f(std::abs(x1)) * q.f(x2); };
  t.d1theta = [p, q, sg](double x1, double x2) { return sg(x1) * p.d(std::abs(x1)) * q.f(x2); };
  t.d11theta = [p, q](double x1, double x2) { return p.dd(std::abs(x1)) * q.f(x2); };
  t.d12theta = [p, q, sg](double x1, double x2) { return sg(x1) * p.d(std::abs(x1)) * q.d(x2); };
  t.holder = holder;
  t.holder_exp = holder_exp;
  return t;
}

Factor odd_factor() {
  return {[](double x) { return x * bump(x); }, [](double x) { return bump(x) + x * bump_d1(x); },
          [](double x) { return 2.0 * bump_d1(x) + x * bump_d2(x); }};
}

// sup_{0<x<1} x^e zeta(x), by Brent on the log.
double sup_pow_bump(double e) {
  auto f = [e](double x) { return -(e * std::log(x) + 1.0 - 1.0 / (1.0 - x * x)); };
  auto r = boost::math::tools::brent_find_minima(f, 1e-9, 1.0 - 1e-9, 52);
  return std::exp(-r.second);
}

// int_0^1 (.) dw for kernels peaked at w ~ A = s/mu^2: w = A tan(phi) up to min(1, 8A),
// then w = 1/u (the kernel times w^2 is nearly flat in u) up to 1/8, then w itself.
template <class Phi, class W>
double peaked_inner(double A, Phi phi_form, W w_form, double floor) {
  double wc = std::min(1.0, 8.0 * A);
  double w1 = std::max(wc, 0.125);
  double res = gk(phi_form, 0.0, std::atan(wc / A), floor);
  if (wc < w1) res += gk([&](double u) { double w = 1.0 / u; return w_form(w) * w * w; }, 1.0 / w1, 1.0 / wc, floor);
  if (w1 < 1.0) res += gk(w_form, w1, 1.0, floor);
  return res;
}

}  // namespace

double bump(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - x * x));
}
double bump_d1(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  double u = 1.0 - x * x;
  return bump(x) * (-2.0 * x / (u * u));
}
double bump_d2(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  double u = 1.0 - x * x;
  double g = -2.0 * x / (u * u);
  double gp = -2.0 / (u * u) - 8.0 * x * x / (u * u * u);
  return bump(x) * (g * g + gp);
}

Theta0 holder_sample(double a) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("toy: holder exponent must lie in (0,1)");
  Factor p{[a](double x) { return std::pow(x, 1.0 + a) * bump(x); },
           [a](double x) {
             if (x <= 0.0) return 0.0;
             return (1.0 + a) * std::pow(x, a) * bump(x) + std::pow(x, 1.0 + a) * bump_d1(x);
           },
           [a](double x) {
             if (x <= 0.0) return 0.0;  // unbounded at 0; never sampled there
             return (1.0 + a) * a * std::pow(x, a - 1.0) * bump(x) + 2.0 * (1.0 + a) * std::pow(x, a) * bump_d1(x) +
                    std::pow(x, 1.0 + a) * bump_d2(x);
           }};
  // |theta~| / (x1^a x2) = x1 zeta(x1) zeta(x2) <= sup x zeta(x).
  return separable("holder", p, odd_factor(), sup_pow_bump(1.0), a);
}

Theta0 smooth_sample() {
  Factor p{[](double x) { return x * x * bump(x); }, [](double x) { return 2.0 * x * bump(x) + x * x * bump_d1(x); },
           [](double x) { return 2.0 * bump(x) + 4.0 * x * bump_d1(x) + x * x * bump_d2(x); }};
  return separable("smooth", p, odd_factor(), sup_pow_bump(1.0), 1.0);
}

Theta0 zero_sample() {
  Theta0 t;
  t.name = "zero";
  auto z = [](double, double) { return 0.0; };
  t.theta = t.d1theta = t.d11theta = t.d12theta = z;
  return t;
}

// With y1 = s/mu, y2 = mu w the support becomes the unit square and
// y1 y2 |y|^-4 dy = s w / (s^2/mu^2 + mu^2 w^2)^2 ds dw.
double J_integral(double mu, const Theta0& th) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("toy: mu must be positive");
  auto inner = [&](double s) {
    if (s < 1e-40) return 0.0;  // contributes < s^{1+a}
    double A = s / (mu * mu);
    auto phi_form = [&](double p) { return std::sin(p) * std::cos(p) / s * th.d1theta(s, A * std::tan(p)); };
    auto w_form = [&](double w) {
      double d = s * s / (mu * mu) + mu * mu * w * w;
      return s * w / (d * d) * th.d1theta(s, w);
    };
    // The inner integral is O(mu^-2) for theta0 of unit size.
    return peaked_inner(A, phi_form, w_form, kFloor / (mu * mu));
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(inner, 0.0, 1.0, kOuterTol);
}

JParts J_parts(double mu, const Theta0& th) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("toy: mu must be positive");
  auto tt = [&](double x1, double x2) { return th.theta(x1, x2) - th.theta(0.0, x2); };
  JParts r;
  // Boundary term at y1 = 1/mu.
  double m2 = 1.0 / (mu * mu);
  r.J1 = gk([&](double w) { double d = m2 + mu * mu * w * w; return w / (d * d) * tt(1.0, w); }, 0.0, 1.0);
  // d1 (y1 y2 |y|^-4) = y2 (y2^2 - 3 y1^2) |y|^-6.
  auto inner = [&](double s) {
    if (s < 1e-40) return 0.0;
    double A = s / (mu * mu);
    auto phi_form = [&](double p) {
      double sn = std::sin(p), cs = std::cos(p);
      return mu / (s * s) * sn * cs * (sn * sn - 3.0 * cs * cs) * tt(s, A * std::tan(p));
    };
    auto w_form = [&](double w) {
      double d = s * s / (mu * mu) + mu * mu * w * w;
      return mu * w * (mu * mu * w * w - 3.0 * s * s / (mu * mu)) / (d * d * d) * tt(s, w);
    };
    return peaked_inner(A, phi_form, w_form, kFloor / mu);  // O(mu^-1) before the 1/mu below
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  r.J2 = -ts.integrate(inner, 0.0, 1.0, kOuterTol) / mu;
  return r;
}

double K_constant(const Theta0& th) {
  boost::math::quadrature::exp_sinh<double> es;
  double r3 = std::sqrt(3.0);
  auto f = [](double z) {
    if (z > 1.0) {  // stable for the huge z that exp_sinh samples
      double v = 1.0 / (z * z), u = 1.0 + v;
      return v * (1.0 - 3.0 * v) / (u * u * u);
    }
    double u = 1.0 + z * z;
    return z * z * (z * z - 3.0) / (u * u * u);
  };
  double c = -gk(f, 0.0, r3) + es.integrate(f, r3, std::numeric_limits<double>::infinity());
  return 4.0 * th.holder * (kPi / 4.0 + c / th.holder_exp);
}

ToyTrajectory evolve_toy(const Theta0& th, const ToyOptions& opt) {
  if (!(opt.dt > 0.0) || !(opt.T >= 0.0)) throw std::invalid_argument("toy: need dt > 0 and T >= 0");
  ToyTrajectory tr;
  auto J = [&](double mu) { return opt.zero_coupling ? 0.0 : J_integral(mu, th); };
  struct Y {
    double mu, I;
  };
  auto f = [&](const Y& y, double* jout) {
    double j = J(y.mu);
    if (jout) *jout = j;
    return Y{4.0 * y.I * j * y.mu, y.mu};
  };
  int n = static_cast<int>(std::llround(opt.T / opt.dt));
  double h = n > 0 ? opt.T / n : opt.dt;
  Y y{1.0, 0.0};
  double j0 = 0.0;
  f(y, &j0);
  tr.points.push_back({0.0, y.mu, y.I, j0, 4.0 * y.I * j0});
  for (int k = 0; k < n; ++k) {
    Y k1 = f(y, nullptr);
    Y k2 = f({y.mu + 0.5 * h * k1.mu, y.I + 0.5 * h * k1.I}, nullptr);
    Y k3 = f({y.mu + 0.5 * h * k2.mu, y.I + 0.5 * h * k2.I}, nullptr);
    Y k4 = f({y.mu + h * k3.mu, y.I + h * k3.I}, nullptr);
    y.mu += h / 6.0 * (k1.mu + 2.0 * k2.mu + 2.0 * k3.mu + k4.mu);
    y.I += h / 6.0 * (k1.I + 2.0 * k2.I + 2.0 * k3.I + k4.I);
    if (!std::isfinite(y.mu) || y.mu > opt.mu_overflow || y.mu <= 0.0) {
      tr.aborted = true;
      tr.note = "mu left (0, " + std::to_string(opt.mu_overflow) + "] at t = " + std::to_string((k + 1) * h);
      break;
    }
    double j = 0.0;
    f(y, &j);
    tr.points.push_back({(k + 1) * h, y.mu, y.I, j, 4.0 * y.I * j});
    tr.mu_max = std::max(tr.mu_max, y.mu);
  }
  return tr;
}

double max_K_ratio(const ToyTrajectory& tr) {
  double m = 0.0;
  for (const auto& p : tr.points)
    if (p.I > 0.0) m = std::max(m, std::abs(p.rate) * p.mu * p.mu / p.I);
  return m;
}

double trapezoid_I_error(const ToyTrajectory& tr) {
  double I = 0.0, m = 0.0;
  for (std::size_t k = 1; k < tr.points.size(); ++k) {
    const auto &a = tr.points[k - 1], &b = tr.points[k];
    I += 0.5 * (b.t - a.t) * (a.mu + b.mu);
    m = std::max(m, std::abs(b.I - I) / std::max(1.0, b.I));
  }
  return m;
}

double omega_residual(const ToyTrajectory& tr, const Theta0& th, const std::vector<std::pair<double, double>>& x) {
  const auto& P = tr.points;
  if (P.size() < 5) return 0.0;
  double h = P[1].t - P[0].t;
  double res = 0.0, scale = 0.0;
  for (auto [x1, x2] : x) {
    auto om = [&](const ToyPoint& p) { return th.d1theta(p.mu * x1, x2 / p.mu) * p.I; };
    for (std::size_t k = 2; k + 2 < P.size(); ++k) {
      const auto& p = P[k];
      double om_t = (om(P[k - 2]) - 8.0 * om(P[k - 1]) + 8.0 * om(P[k + 1]) - om(P[k + 2])) / (12.0 * h);
      double X1 = p.mu * x1, X2 = x2 / p.mu;
      double d1om = p.I * p.mu * th.d11theta(X1, X2);
      double d2om = p.I * th.d12theta(X1, X2) / p.mu;
      double d1th = p.mu * th.d1theta(X1, X2);
      res = std::max(res, std::abs(om_t - p.rate * (x1 * d1om - x2 * d2om) - d1th));
      scale = std::max(scale, std::abs(d1th));
    }
  }
  return scale > 0.0 ? res / scale : res;
}

}  // namespace bsq::toy
