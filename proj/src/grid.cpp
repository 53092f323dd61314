#include "bsq/grid.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <limits>

namespace bsq {

namespace {

constexpr double kPi = std::numbers::pi;

// Chebyshev points of the first kind on (-1, 1), increasing: x_j = cos(theta_j).
Vec cheb_theta(int n) {
  Vec th(n);
  for (int j = 0; j < n; ++j) th(j) = (2.0 * (n - 1 - j) + 1.0) * kPi / (2.0 * n);
  return th;
}

// Dense differentiation matrix for interpolation on Chebyshev-Gauss nodes.
Mat cheb_diff(const Vec& th) {
  const int n = static_cast<int>(th.size());
  Vec w(n);
  for (int j = 0; j < n; ++j) w(j) = ((n - 1 - j) % 2 == 0 ? 1.0 : -1.0) * std::sin(th(j));
  Mat D = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      // x_i - x_j written without cancellation
      double dx = -2.0 * std::sin(0.5 * (th(i) + th(j))) * std::sin(0.5 * (th(i) - th(j)));
      D(i, j) = (w(j) / w(i)) / dx;
      diag -= D(i, j);
    }
    D(i, i) = diag;
  }
  return D;
}

// Matrix taking nodal values to Chebyshev coefficients of the antiderivative
// (rows 0..n, the constant is left at zero).
Mat cheb_antideriv_coeffs(const Vec& th) {
  const int n = static_cast<int>(th.size());
  Mat A(n + 2, n);  // coefficients a_k, padded with two zero rows
  A.setZero();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) A(k, j) = (k == 0 ? 1.0 : 2.0) / n * std::cos(k * th(j));
  Mat B = Mat::Zero(n + 1, n);
  B.row(1) = A.row(0) - 0.5 * A.row(2);
  for (int k = 2; k <= n; ++k) B.row(k) = (A.row(k - 1) - A.row(k + 1)) / (2.0 * k);
  return B;
}

void build_mapped_radial(Grid& g) {
  const int n = g.cfg.n_r;
  const double L = g.cfg.r_scale;
  Vec th = cheb_theta(n);
  Vec x = th.array().cos();
  Vec one_m_x2 = th.array().sin().square();  // 1 - x^2
  g.r.resize(n);
  for (int j = 0; j < n; ++j) g.r(j) = L * (1.0 + x(j)) / (1.0 - x(j));

  Mat Dx = cheb_diff(th);
  g.Dr = (0.5 * one_m_x2).asDiagonal() * Dx;

  Mat B = cheb_antideriv_coeffs(th);
  // int_x^1 p = sum_k b_k (1 - T_k(x)),  1 - cos(k theta) = 2 sin^2(k theta / 2)
  Mat J(n, n);
  for (int i = 0; i < n; ++i) {
    RowVec row = RowVec::Zero(n);
    for (int k = 1; k <= n; ++k) {
      double s = std::sin(0.5 * k * th(i));
      row += 2.0 * s * s * B.row(k);
    }
    J.row(i) = row;
  }
  RowVec full = RowVec::Zero(n);
  for (int k = 1; k <= n; k += 2) full += 2.0 * B.row(k);

  Vec ds_dx = 2.0 * one_m_x2.cwiseInverse();  // d(ln R)/dx
  g.Ltail = J * ds_dx.asDiagonal();
  g.Lzero = full.cwiseProduct(ds_dx.transpose());
  // dR/dx = 2L/(1-x)^2
  g.r_quad.resize(n);
  for (int j = 0; j < n; ++j) g.r_quad(j) = full(j) * 2.0 * L / ((1.0 - x(j)) * (1.0 - x(j)));
  g.r_max = std::numeric_limits<double>::infinity();
}

void build_geometric_radial(Grid& g) {
  const int n = g.cfg.n_r;
  const double s0 = std::log(g.cfg.r_floor), s1 = std::log(g.cfg.r_max);
  Vec s = Vec::LinSpaced(n, s0, s1);
  g.r = s.array().exp();
  Mat Ds(n, n);
  const int p = std::min(g.cfg.stencil, n);
  for (int i = 0; i < n; ++i) {
    int start = std::clamp(i - p / 2, 0, n - p);
    Vec w = fd_weights(s(i), s.segment(start, p), 1);
    Ds.row(i).setZero();
    Ds.row(i).segment(start, p) = w.transpose();
  }
  g.Dr = Ds;
  Mat C = cumulative_integration(s, p);
  RowVec last = C.row(n - 1);
  g.Ltail.resize(n, n);
  for (int i = 0; i < n; ++i) g.Ltail.row(i) = last - C.row(i);
  // Power-law tail beyond r_max: g ~ g(R_n) (R/R_n)^{-p}.
  if (g.cfg.tail_decay > 0.0) g.Ltail.col(n - 1).array() += 1.0 / g.cfg.tail_decay;
  g.Lzero = last;
  g.Lzero(0) += 1.0;  // int_0^{R_1} g/s for g ~ R
  // Full-range weights: trapezoid in s with Gregory end corrections, which stay positive
  // (the end rows of the integrated 9-point interpolant do not).
  static const double greg8[8] = {1070017.0 / 3628800, 5537111.0 / 3628800, 103613.0 / 403200,
                                  261115.0 / 145152,   298951.0 / 725760,   515677.0 / 403200,
                                  3349879.0 / 3628800, 3662753.0 / 3628800};
  static const double greg4[4] = {251.0 / 720, 299.0 / 240, 211.0 / 240, 739.0 / 720};
  const int m = n >= 16 ? 8 : 4;
  const double* gw = m == 8 ? greg8 : greg4;
  const double h = s(1) - s(0);
  Vec ws = Vec::Ones(n);
  for (int j = 0; j < m; ++j) ws(j) = ws(n - 1 - j) = gw[j];
  g.r_quad = h * ws.cwiseProduct(g.r);
  g.r_quad(0) += g.r(0);
  g.r_max = g.cfg.r_max;
}

// Trapezoid error at an end for an integrand g0 exp(kappa (u - u_end)), with kappa fitted
// from the end node g0 and its neighbour g1 at spacing h.
double trapezoid_end_correction(double g0, double g1, double h) {
  if (g0 == 0.0 || g0 * g1 <= 0.0) return 0.0;
  double rho = g1 / g0;
  if (rho >= 1.0) return 0.0;
  double kh = -std::log(rho);
  if (kh < 1e-3) return -g0 * kh * h / 12.0;
  return g0 * h * (1.0 / kh - 0.5 * (1.0 + rho) / (1.0 - rho));
}

void build_angular(Grid& g) {
  const int n = g.cfg.n_beta;
  const double a = g.cfg.t_stretch;
  const double U = std::asinh(g.cfg.t_span / a);
  g.u = Vec::LinSpaced(n, -U, U);
  g.t = a * g.u.array().sinh();
  g.beta.resize(n);
  g.eps.resize(n);
  g.sinb.resize(n);
  g.cosb.resize(n);
  for (int j = 0; j < n; ++j) {
    double t = g.t(j);
    double e = std::exp(-std::abs(t));
    double hyp = std::sqrt(1.0 + e * e);
    if (t <= 0) {
      g.beta(j) = std::atan(std::exp(t));
      g.sinb(j) = e / hyp;
      g.cosb(j) = 1.0 / hyp;
    } else {
      g.beta(j) = 0.5 * kPi - std::atan(e);
      g.sinb(j) = 1.0 / hyp;
      g.cosb(j) = e / hyp;
    }
    g.eps(j) = std::atan(std::exp(-t));
  }
  g.sin2b = (1.0 / g.t.array().cosh()).matrix();
  g.cos2b = (-g.t.array().tanh()).matrix();

  const int p = std::min(g.cfg.stencil, n);
  // Trapezoid in u: spectrally accurate for integrands that decay at both ends.
  Vec dbdu = (a * g.u.array().cosh() / (2.0 * g.t.array().cosh())).matrix();
  g.b_core = (g.u(1) - g.u(0)) * dbdu;
  g.b_core(0) *= 0.5;
  g.b_core(n - 1) *= 0.5;
  g.b_quad = g.b_core;
  g.b_quad(0) += g.beta(0);
  g.b_quad(n - 1) += g.eps(n - 1);

  Mat Du(n, n);
  for (int i = 0; i < n; ++i) {
    int start = std::clamp(i - p / 2, 0, n - p);
    Vec w = fd_weights(g.u(i), g.u.segment(start, p), 1);
    Du.row(i).setZero();
    Du.row(i).segment(start, p) = w.transpose();
  }
  Vec fac = (2.0 / (a * g.u.array().cosh())).matrix();
  g.Db = fac.asDiagonal() * Du;
  g.DbT = g.Db.transpose();
}

// Tail of int_0^{x0} Q w for Q w ~ Q0 w0 (x/x0)^q, q = q_f + q_w fitted from the three
// outermost nodes. Integrands here are integrable by construction (raw weights are never
// integrated alone). The field part Q is bounded, so its exponent is clipped at 0; without a
// consistent power law in Q (sign changes, or the two fitted exponents disagree) it is
// extrapolated as a constant. When the fitted q is not above -1 the decay that makes the end
// integrable is not resolved by the nodes (difference quotients at |t| in [20, 30] carry
// spill-over from interior values; weights like sin^-(1 + alpha/10) sit just past -1), and the
// density is extrapolated as a constant over [0, x0].
double end_tail(const double* Q, const double* w, const double* x) {
  const double p0 = Q[0] * w[0];
  if (p0 == 0.0) return 0.0;
  const double l1 = std::log(x[1] / x[0]), l2 = std::log(x[2] / x[1]);
  double qw = (w[0] > 0.0 && w[1] > 0.0) ? std::log(w[1] / w[0]) / l1 : 0.0;
  double qf = 0.0;
  if (Q[0] * Q[1] > 0.0 && Q[1] * Q[2] > 0.0) {
    double a = std::log(Q[1] / Q[0]) / l1, b = std::log(Q[2] / Q[1]) / l2;
    if (std::abs(a - b) <= 0.5) qf = std::max(a, 0.0);
  }
  double q = qf + qw;
  if (q <= -1.0 + 1e-12) return p0 * x[0];
  return p0 * x[0] / (q + 1.0);
}

struct AngularPass {
  Vec ang, scale;
};

AngularPass angular_pass(const Grid& g, const Field& Q, const Field& w, bool tails) {
  const int nb = g.nb();
  Field P = Q.cwiseProduct(w);
  AngularPass o{P * g.b_core, P.cwiseAbs() * g.b_core};
  const double du = g.u(1) - g.u(0);
  const double d0 = 2.0 * g.b_core(0) / du, d1 = 2.0 * g.b_core(nb - 1) / du;
  const double e0 = g.b_core(1) / du, e1 = g.b_core(nb - 2) / du;
  for (int i = 0; i < g.nr(); ++i) {
    // End pieces below roundoff of the row integral are skipped.
    const double neg = 1e-14 * o.scale(i);
    if (std::abs(P(i, 0)) * std::max(g.b_core(0), g.beta(0)) > neg) {
      double q[3] = {Q(i, 0), Q(i, 1), Q(i, 2)}, ww[3] = {w(i, 0), w(i, 1), w(i, 2)};
      double x[3] = {g.beta(0), g.beta(1), g.beta(2)};
      o.ang(i) += trapezoid_end_correction(P(i, 0) * d0, P(i, 1) * e0, du);
      if (tails) o.ang(i) += end_tail(q, ww, x);
    }
    if (std::abs(P(i, nb - 1)) * std::max(g.b_core(nb - 1), g.eps(nb - 1)) > neg) {
      double q[3] = {Q(i, nb - 1), Q(i, nb - 2), Q(i, nb - 3)}, ww[3] = {w(i, nb - 1), w(i, nb - 2), w(i, nb - 3)};
      double x[3] = {g.eps(nb - 1), g.eps(nb - 2), g.eps(nb - 3)};
      o.ang(i) += trapezoid_end_correction(P(i, nb - 1) * d1, P(i, nb - 2) * e1, du);
      if (tails) o.ang(i) += end_tail(q, ww, x);
    }
  }
  return o;
}

}  // namespace

Spacing parse_spacing(const std::string& s) {
  if (s == "mapped" || s == "mapped-uniform") return Spacing::mapped;
  if (s == "geometric") return Spacing::geometric;
  throw std::invalid_argument("unknown spacing '" + s + "'");
}

std::string to_string(Spacing s) { return s == Spacing::mapped ? "mapped" : "geometric"; }

std::string to_string(WeightKind k) {
  switch (k) {
    case WeightKind::phi0: return "phi0";
    case WeightKind::phi1: return "phi1";
    case WeightKind::phi2: return "phi2";
    case WeightKind::psi0: return "psi0";
    case WeightKind::psi1: return "psi1";
    case WeightKind::psi2: return "psi2";
    case WeightKind::rho: return "rho";
    case WeightKind::c1_phi1: return "c1_phi1";
    case WeightKind::c1_phi2: return "c1_phi2";
  }
  return "?";
}

Vec fd_weights(double x0, const Vec& x, int m) {
  const int n = static_cast<int>(x.size());
  Mat c = Mat::Zero(n, m + 1);
  double c1 = 1.0, c4 = x(0) - x0;
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1.0, c5 = c4;
    c4 = x(i) - x0;
    for (int j = 0; j < i; ++j) {
      double c3 = x(i) - x(j);
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c.col(m);
}

Mat cumulative_integration(const Vec& x, int stencil) {
  using boost::math::quadrature::gauss;
  const int n = static_cast<int>(x.size());
  const int p = std::min(stencil, n);
  constexpr int kGL = 8;
  const auto& ab = gauss<double, kGL>::abscissa();
  const auto& wt = gauss<double, kGL>::weights();
  Mat C = Mat::Zero(n, n);
  RowVec acc = RowVec::Zero(n);
  for (int i = 0; i + 1 < n; ++i) {
    int start = std::clamp(i - (p - 2) / 2, 0, n - p);
    double a = x(i), b = x(i + 1), mid = 0.5 * (a + b), half = 0.5 * (b - a);
    Vec sub = x.segment(start, p);
    for (std::size_t q = 0; q < ab.size(); ++q) {
      for (int sgn : {-1, 1}) {
        if (ab[q] == 0.0 && sgn > 0) continue;
        double xq = mid + sgn * half * ab[q];
        Vec l = fd_weights(xq, sub, 0);
        acc.segment(start, p) += half * wt[q] * l.transpose();
      }
    }
    C.row(i + 1) = acc;
  }
  return C;
}

Grid build_grid(const GridConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 0.1 + 1e-15))
    throw std::invalid_argument("alpha must lie in (0, 1/10]");
  if (cfg.n_r < 8 || cfg.n_beta < 8) throw std::invalid_argument("n_r and n_beta must be at least 8");
  if (cfg.spacing == Spacing::geometric) {
    if (cfg.r_max < 10.0) throw std::invalid_argument("r_max must be at least 10");
    if (!(cfg.r_floor > 0.0 && cfg.r_floor < 1.0)) throw std::invalid_argument("r_floor must lie in (0,1)");
  }
  if (cfg.t_span <= 1.0 || cfg.t_stretch <= 0.0) throw std::invalid_argument("bad angular map");
  if (cfg.stencil < 3) throw std::invalid_argument("stencil too small");
  Grid g;
  g.cfg = cfg;
  g.alpha = cfg.alpha;
  if (cfg.spacing == Spacing::mapped)
    build_mapped_radial(g);
  else
    build_geometric_radial(g);
  build_angular(g);
  return g;
}

Mat Grid::radial_interp(const Vec& rq) const {
  const int n = nr();
  Mat P = Mat::Zero(rq.size(), n);
  if (cfg.spacing == Spacing::mapped) {
    const double L = cfg.r_scale;
    Vec th = cheb_theta(n);
    Vec x = th.array().cos();
    Vec w(n);
    for (int j = 0; j < n; ++j) w(j) = ((n - 1 - j) % 2 == 0 ? 1.0 : -1.0) * std::sin(th(j));
    for (int q = 0; q < rq.size(); ++q) {
      double xq = (rq(q) - L) / (rq(q) + L);
      int hit = -1;
      for (int j = 0; j < n; ++j)
        if (xq == x(j)) hit = j;
      if (hit >= 0) {
        P(q, hit) = 1.0;
        continue;
      }
      RowVec c = (w.array() / (xq - x.array())).matrix().transpose();
      P.row(q) = c / c.sum();
    }
  } else {
    Vec s = r.array().log();
    const int p = std::min(cfg.stencil, n);
    for (int q = 0; q < rq.size(); ++q) {
      double sq = std::log(rq(q));
      int i = static_cast<int>(std::lower_bound(s.data(), s.data() + n, sq) - s.data());
      int start = std::clamp(i - p / 2, 0, n - p);
      P.row(q).segment(start, p) = fd_weights(sq, s.segment(start, p), 0).transpose();
    }
  }
  return P;
}

std::pair<double, double> to_polar(double x, double y, double alpha) {
  if (x == 0.0 && y == 0.0) throw std::domain_error("to_polar: origin has no angle");
  double r2 = x * x + y * y;
  return {std::pow(r2, 0.5 * alpha), std::atan2(y, x)};
}

std::pair<double, double> from_polar(double R, double beta, double alpha) {
  double r = std::pow(R, 1.0 / alpha);
  return {r * std::cos(beta), r * std::sin(beta)};
}

Field gamma_field(const Grid& g) {
  RowVec gb = g.cosb.array().pow(g.alpha).matrix().transpose();
  return Vec::Ones(g.nr()) * gb;
}

Field weight_field(const Grid& g, WeightKind k) {
  Field w(g.nr(), g.nb());
  for (int i = 0; i < g.nr(); ++i)
    for (int j = 0; j < g.nb(); ++j) w(i, j) = weight_sc(k, g.r(i), g.sinb(j), g.cosb(j), g.alpha);
  return w;
}

Field radial_field(const Grid& g, const Vec& f) { return f * RowVec::Ones(g.nb()); }
Field angular_field(const Grid& g, const Vec& f) { return Vec::Ones(g.nr()) * f.transpose(); }

Field D_R_vanishing(const Grid& g, const Field& f) {
  Vec q = ((1.0 + g.r.array()) / g.r.array()).square().matrix();
  Field d = g.Dr * (q.asDiagonal() * f);
  Vec w = (2.0 / (1.0 + g.r.array())).matrix();
  return q.cwiseInverse().asDiagonal() * d + w.asDiagonal() * f;
}

Vec angular_integral(const Grid& g, const Field& f) { return f * g.b_quad; }

double integrate(const Grid& g, const Field& f) { return g.r_quad.dot(f * g.b_quad); }

Vec weighted_angular(const Grid& g, const Field& Q, const Field& w, AngularTail tail) {
  return angular_pass(g, Q, w, tail == AngularTail::fitted).ang;
}

Vec weighted_angular(const Grid& g, const Field& P) {
  return weighted_angular(g, P, Field::Ones(P.rows(), P.cols()));
}

double weighted_inner(const Grid& g, const Field& f, const Field& h, const Field& w, AngularTail tail) {
  return g.r_quad.dot(weighted_angular(g, f.cwiseProduct(h), w, tail));
}

double weighted_inner(const Grid& g, const Field& f, const Field& h, WeightKind k, AngularTail tail) {
  return weighted_inner(g, f, h, weight_field(g, k), tail);
}

}  // namespace bsq
