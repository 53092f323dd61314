#include "bsq/profiles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <limits>

namespace bsq {

namespace {

constexpr double kPi = std::numbers::pi;

struct Angle {
  double s, c;  // sin, cos
};

// Angle with ln tan(tau) = t, evaluated without cancellation at either end.
Angle angle_from_t(double t) {
  double e = std::exp(-std::abs(t));
  double h = std::sqrt(1.0 + e * e);
  return t <= 0 ? Angle{e / h, 1.0 / h} : Angle{1.0 / h, e / h};
}

template <class F>
double integrate_t(F&& f, double t0, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  double t1 = std::max(t0, 0.0) + 50.0;
  double err = 0.0;
  double v = gauss_kronrod<double, 31>::integrate(f, t0, t1, 20, tol, &err);
  return v;
}

}  // namespace

double verify_leading_residual(double alpha, const std::vector<double>& zs) {
  const double c = profile_c_exact(alpha);
  const double a = 3.0 * alpha / c;  // b = 1
  const double cl = 1.0 / alpha;
  double worst = 0.0;
  for (double z : zs) {
    double d = 1.0 + z;
    double om = a * z / (d * d);
    double dom = a * z * (1.0 - z) / (d * d * d);  // z d/dz
    double eta = 2.0 * a * z / (d * d * d);
    double deta = 2.0 * a * z * (1.0 - 2.0 * z) / (d * d * d * d);
    double tail = a / d;  // int_z^inf om(s)/s ds
    double r1 = alpha * cl * dom + om - eta;
    double r2 = alpha * cl * deta + 2.0 * eta - c / alpha * eta * tail;
    worst = std::max({worst, std::abs(r1), std::abs(r2)});
  }
  return worst;
}

double profile_c(const Grid& g) {
  Vec gs = g.cosb.array().pow(g.alpha).matrix().cwiseProduct(g.sin2b);
  return 2.0 / kPi * g.b_quad.dot(gs);
}

XiPoint xi_bar_point(double R, double sinb, double cosb, double alpha, double c, double tol) {
  if (cosb <= 0.0) return {0.0, 0.0, 0.0};  // x = 0: empty integration range
  const double tb = std::log(sinb / cosb);
  const double pref = -18.0 * alpha * alpha / c;
  auto S_of = [&](const Angle& a) { return R * std::pow(sinb / a.s, alpha); };
  auto fk = [&](double t) {
    Angle a = angle_from_t(t);
    double S = S_of(a);
    double k = S * S / std::pow(1.0 + S, 4);
    return k * std::pow(a.c, alpha) / (2.0 * std::cosh(t));
  };
  auto fdk = [&](double t) {
    Angle a = angle_from_t(t);
    double S = S_of(a);
    double sk = 2.0 * S * S * (1.0 - S) / std::pow(1.0 + S, 5);
    return sk * std::pow(a.c, alpha) / (2.0 * std::cosh(t));
  };
  double ik = integrate_t(fk, tb, tol);
  double idk = integrate_t(fdk, tb, tol);
  double kR = R * R / std::pow(1.0 + R, 4);
  double s2 = 2.0 * sinb * cosb;
  XiPoint p;
  p.xi = pref * ik;
  p.dr = pref * idk;
  p.db = pref * (-s2 * kR * std::pow(cosb, alpha) + 2.0 * alpha * cosb * cosb * idk);
  return p;
}

double eta_bar_xy(double x, double y, double alpha, double c) {
  double S = std::pow(x * x + y * y, 0.5 * alpha);
  return 6.0 * alpha / c * std::pow(x, alpha) / std::pow(1.0 + S, 3);
}

double theta_bar(double x, double y, double alpha, double c) {
  if (x <= 0.0) return 0.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double z) { return eta_bar_xy(z, y, alpha, c); };
  return ts.integrate(f, 0.0, x, 1e-13);
}

Field j_eta_bar(const Grid& g, double c, double tol) {
  const double alpha = g.alpha;
  Field J(g.nr(), g.nb());
  for (int j = 0; j < g.nb(); ++j) {
    const double sinb = g.sinb(j), cosb = g.cosb(j);
    const double tb = std::log(sinb / cosb);
    for (int i = 0; i < g.nr(); ++i) {
      const double R = g.r(i);
      auto f = [&](double t) {
        Angle a = angle_from_t(t);
        double S = R * std::pow(sinb / a.s, alpha);
        double eta = alpha / c * std::pow(a.c, alpha) * 6.0 * S / std::pow(1.0 + S, 3);
        return eta / (a.s * a.s) / (2.0 * std::cosh(t));
      };
      J(i, j) = sinb / cosb * integrate_t(f, tb, tol);
    }
  }
  return J;
}

ProfileTriple approx_steady_state(const Grid& g, const ProfileOptions& opt) {
  ProfileTriple p;
  const int nr = g.nr(), nb = g.nb();
  const double alpha = g.alpha;
  p.alpha = alpha;
  Vec gam = opt.flat_gamma ? Vec::Ones(nb) : Vec(g.cosb.array().pow(alpha));
  Vec dgam = opt.flat_gamma ? Vec::Zero(nb) : Vec(-2.0 * alpha * g.sinb.array().square() * gam.array());
  p.c = 2.0 / kPi * g.b_quad.dot(gam.cwiseProduct(g.sin2b));
  p.c_l_bar = 1.0 / alpha + 3.0;
  p.c_omega_bar = -1.0;

  Vec R = g.r;
  Vec d = (1.0 + R.array()).matrix();
  Vec om = (3.0 * R.array() / d.array().square()).matrix();
  Vec om_dr = (3.0 * R.array() * (1.0 - R.array()) / d.array().cube()).matrix();
  Vec et = (6.0 * R.array() / d.array().cube()).matrix();
  Vec et_dr = (6.0 * R.array() * (1.0 - 2.0 * R.array()) / d.array().pow(4)).matrix();
  const double amp = alpha / p.c;
  p.omega_bar = amp * om * gam.transpose();
  p.omega_dr = amp * om_dr * gam.transpose();
  p.omega_db = amp * om * dgam.transpose();
  p.eta_bar = amp * et * gam.transpose();
  p.eta_dr = amp * et_dr * gam.transpose();
  p.eta_db = amp * et * dgam.transpose();

  p.xi_bar.resize(nr, nb);
  p.xi_dr.resize(nr, nb);
  p.xi_db.resize(nr, nb);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nb; ++j) {
      if (opt.flat_gamma) {
        p.xi_bar(i, j) = p.xi_dr(i, j) = p.xi_db(i, j) = 0.0;
        continue;
      }
      XiPoint x = xi_bar_point(R(i), g.sinb(j), g.cosb(j), alpha, p.c, opt.xi_tol);
      if (!std::isfinite(x.xi) || !std::isfinite(x.dr) || !std::isfinite(x.db))
        throw std::runtime_error("xi-bar quadrature did not converge");
      p.xi_bar(i, j) = x.xi;
      p.xi_dr(i, j) = x.dr;
      p.xi_db(i, j) = x.db;
    }
  return p;
}

XiBoundsReport check_xi_bounds(const Grid& g, const ProfileTriple& p) {
  XiBoundsReport rep;
  const double a2 = p.alpha * p.alpha;
  rep.max_xi = -std::numeric_limits<double>::infinity();
  Field c1w2 = weight_field(g, WeightKind::c1_phi2);
  Field Dr = p.xi_dr, Db = p.xi_db;
  double sup = 0, supr = 0, supb = 0;
  for (int i = 0; i < g.nr(); ++i)
    for (int j = 0; j < g.nb(); ++j) {
      const double R = g.r(i), x = p.xi_bar(i, j);
      const double sa = std::pow(g.sinb(j), p.alpha);
      const double branch = g.beta(j) < 0.25 * kPi
                                ? sa / std::pow(1.0 + R * sa, 3)
                                : std::pow(g.cosb(j), p.alpha + 1.0) / std::pow(1.0 + R, 3);
      const double bound = a2 * R * R / (1.0 + R) * branch;
      rep.k_branch = std::max(rep.k_branch, std::abs(x) / bound);
      rep.k_cos = std::max(rep.k_cos, -x / (a2 * g.cosb(j)));
      rep.max_xi = std::max(rep.max_xi, x);
      sup = std::max(sup, std::abs(x));
      supr = std::max(supr, std::abs((1.0 + R) / R * Dr(i, j)));
      supb = std::max(supb, std::abs(c1w2(i, j) * Db(i, j)));
    }
  rep.k_c1 = (sup + supr + supb) / a2;
  rep.xi_psi1 = wnorm2(g, p.xi_bar, WeightKind::psi1);
  rep.max_boundary = p.xi_bar.col(g.nb() - 1).cwiseAbs().maxCoeff();
  return rep;
}

double cutoff(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  double x = s - 1.0;
  return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

double cutoff_dr(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  double x = s - 1.0;
  return -s * 30.0 * x * x * (1.0 - x) * (1.0 - x);
}

ProfileTriple truncate_profile(const Grid& g, const ProfileTriple& p, double lambda) {
  if (lambda < 1.0) throw std::invalid_argument("truncate_profile: lambda must be >= 1");
  if (2.0 * lambda > g.r_max) throw std::invalid_argument("truncate_profile: cutoff exceeds the grid");
  const int nr = g.nr(), nb = g.nb();
  Field J = j_eta_bar(g, p.c);
  Vec chi(nr), dchi(nr);
  for (int i = 0; i < nr; ++i) {
    chi(i) = cutoff(g.r(i) / lambda);
    dchi(i) = cutoff_dr(g.r(i) / lambda);
  }
  ProfileTriple q = p;
  Vec cos2 = g.cosb.array().square();
  Vec sc = g.sinb.cwiseProduct(g.cosb);
  Field ones = Field::Ones(nr, nb);
  Field chiF = radial_field(g, chi), dchiF = radial_field(g, dchi);
  q.omega_bar = chiF.cwiseProduct(p.omega_bar);
  q.eta_bar = p.eta_bar + p.alpha * dchiF.cwiseProduct(J).cwiseProduct(angular_field(g, cos2)) +
              (chiF - ones).cwiseProduct(p.eta_bar);
  q.xi_bar = p.xi_bar + p.alpha * dchiF.cwiseProduct(J).cwiseProduct(angular_field(g, sc)) +
             (chiF - ones).cwiseProduct(p.xi_bar);
  q.omega_dr = D_R(g, q.omega_bar);
  q.omega_db = D_beta(g, q.omega_bar);
  q.eta_dr = D_R(g, q.eta_bar);
  q.eta_db = D_beta(g, q.eta_bar);
  q.xi_dr = D_R(g, q.xi_bar);
  q.xi_db = D_beta(g, q.xi_bar);
  return q;
}

std::pair<double, double> profile_relation_residuals(const Grid& g, const ProfileTriple& p) {
  Field r1 = p.omega_dr - p.c_omega_bar * p.omega_bar - p.eta_bar;
  Vec inv = (1.0 / (1.0 + g.r.array())).matrix();
  Field r2 = p.eta_dr - 2.0 * p.c_omega_bar * p.eta_bar - (inv.asDiagonal() * p.eta_bar) * 3.0;
  return {r1.cwiseAbs().maxCoeff(), r2.cwiseAbs().maxCoeff()};
}

double lem_bar_constant(const Grid& g, const ProfileTriple& p) {
  std::vector<Field> fs = {p.omega_bar, p.eta_bar, p.omega_bar - p.omega_dr, p.eta_bar - p.eta_dr};
  double K = 0.0;
  for (const Field& f : fs) {
    Field d = f;
    for (int k = 1; k <= 3; ++k) {
      d = D_R(g, d);
      K = std::max(K, (d.array() / f.array()).abs().maxCoeff());
    }
  }
  return K;
}

}  // namespace bsq
