#include "bsq/biot_savart.hpp"

#include <algorithm>

namespace bsq {

namespace {
constexpr double kPi = std::numbers::pi;
}

Vec omega_star(const Grid& g, const Field& omega) { return omega * g.b_quad.cwiseProduct(g.sin2b); }

Vec l12(const Grid& g, const Field& omega) { return g.Ltail * omega_star(g, omega); }

double l12_zero(const Grid& g, const Field& omega) { return g.Lzero.dot(omega_star(g, omega)); }

Vec l12_tilde(const Grid& g, const Field& omega) {
  Vec os = omega_star(g, omega);
  return (g.Ltail * os).array() - g.Lzero.dot(os);
}

StreamSolver::StreamSolver(const Grid& g, int n_modes) : g_(&g), alpha_(g.alpha) {
  const int nb = g.nb(), nr = g.nr();
  M_ = n_modes > 0 ? n_modes : std::clamp(nb / 3, 4, 48);
  S_.resize(nb, M_);
  C_.resize(nb, M_);
  Q_.resize(nb, M_);
  for (int j = 0; j < nb; ++j) {
    double x = g.cos2b(j);
    double um1 = 0.0, u0 = 1.0;  // Chebyshev U_{n-1}(cos 2 beta) = sin(2 n beta)/sin(2 beta)
    for (int n = 1; n <= M_; ++n) {
      S_(j, n - 1) = std::sin(2.0 * n * g.beta(j));
      C_(j, n - 1) = std::cos(2.0 * n * g.beta(j));
      Q_(j, n - 1) = u0;
      double u1 = 2.0 * x * u0 - um1;
      um1 = u0;
      u0 = u1;
    }
    // Near the ends use the exact small-angle forms through sin(2 beta).
    for (int n = 1; n <= M_; ++n) S_(j, n - 1) = Q_(j, n - 1) * g.sin2b(j);
  }
  P_ = (4.0 / kPi) * (S_.transpose() * g.b_quad.asDiagonal());

  const Mat I = Mat::Identity(nr, nr);
  Dr2_ = g.Dr * g.Dr;
  const bool dirichlet = g.cfg.spacing == Spacing::geometric;
  op_h_ = g.Dr + (4.0 / alpha_) * I;
  if (dirichlet) {
    op_h_.row(0).setZero();
    op_h_(0, 0) = 1.0;
  }
  lu_h_.compute(op_h_);
  lu_.reserve(M_);
  ops_.reserve(M_);
  for (int n = 2; n <= M_; ++n) {
    Mat A = -alpha_ * alpha_ * Dr2_ - 4.0 * alpha_ * g.Dr + (4.0 * n * n - 4.0) * I;
    if (dirichlet) {
      A.row(0).setZero();
      A(0, 0) = 1.0;
      A.row(nr - 1).setZero();
      A(nr - 1, nr - 1) = 1.0;
    }
    ops_.push_back(A);
    lu_.emplace_back(A);
  }
}

StreamSolution StreamSolver::solve(const Field& omega) const {
  const Grid& g = *g_;
  const int nr = g.nr();
  const bool dirichlet = g.cfg.spacing == Spacing::geometric;
  StreamSolution s;
  Mat om_modes = omega * P_.transpose();  // nr x M
  Vec os = omega_star(g, omega);
  s.l12 = g.Ltail * os;
  s.l12_zero = g.Lzero.dot(os);
  s.modes.resize(nr, M_);
  s.mode_residual.resize(M_);

  Vec rhs_h = os;
  if (dirichlet) rhs_h(0) = os(0) / (1.0 + 4.0 / alpha_);
  Vec h = lu_h_.solve(rhs_h);
  s.g_bar = -h / (alpha_ * kPi);
  s.modes.col(0) = (s.l12 + h) / (kPi * alpha_);
  s.mode_residual(0) = ((op_h_ * h - rhs_h).cwiseAbs().maxCoeff());
  for (int n = 2; n <= M_; ++n) {
    Vec rhs = om_modes.col(n - 1);
    if (dirichlet) rhs(0) = rhs(nr - 1) = 0.0;
    Vec f = lu_[n - 2].solve(rhs);
    s.modes.col(n - 1) = f;
    s.mode_residual(n - 1) = (ops_[n - 2] * f - rhs).cwiseAbs().maxCoeff();
  }

  Mat m_r = g.Dr * s.modes;
  Mat m_rr = g.Dr * m_r;
  Vec twon = Vec::LinSpaced(M_, 2.0, 2.0 * M_);
  s.psi = s.modes * S_.transpose();
  s.psi_r = m_r * S_.transpose();
  s.psi_rr = m_rr * S_.transpose();
  s.psi_b = (s.modes * twon.asDiagonal()) * C_.transpose();
  s.psi_rb = (m_r * twon.asDiagonal()) * C_.transpose();
  s.psi_bb = -omega - 4.0 * s.psi - alpha_ * alpha_ * s.psi_rr - 4.0 * alpha_ * s.psi_r;
  s.ab_over_s2 = (2.0 * s.modes + alpha_ * m_r) * Q_.transpose();
  s.psi_star = s.psi - (s.l12 / (kPi * alpha_)) * g.sin2b.transpose();
  return s;
}

StreamSolution solve_stream(const Grid& g, const Field& omega, int n_modes) {
  StreamSolver solver(g, n_modes);
  return solver.solve(omega);
}

Field apply_elliptic(const Grid& g, const Mat& modes, const Mat& sin_basis) {
  const double a = g.alpha;
  const int M = static_cast<int>(modes.cols());
  Mat out(modes.rows(), M);
  for (int n = 1; n <= M; ++n) {
    Vec f = modes.col(n - 1);
    Vec df = g.Dr * f;
    out.col(n - 1) = -a * a * (g.Dr * df) - 4.0 * a * df + (4.0 * n * n - 4.0) * f;
  }
  return out * sin_basis.leftCols(M).transpose();
}

VelocityPack velocity(const Grid& g, const StreamSolution& s, const Field& omega) {
  (void)omega;
  const double a = g.alpha;
  const int nr = g.nr();
  RowVec s2 = g.sin2b.transpose(), c2 = g.cos2b.transpose();
  RowVec sn2 = g.sinb.array().square().matrix().transpose();
  RowVec cs2 = g.cosb.array().square().matrix().transpose();
  RowVec sb = g.sinb.transpose(), cb = g.cosb.transpose();
  auto rowmul = [&](const Field& f, const RowVec& w) -> Field {
    return f.array().rowwise() * w.array();
  };
  Field ones = Field::Ones(nr, g.nb());
  VelocityPack vp;
  const Field& P = s.psi;
  vp.u_x = -0.5 * a * a * rowmul(s.psi_rr, s2) - 0.5 * a * rowmul(s.psi_r, s2) - rowmul(s.psi_b, c2) -
           a * rowmul(s.psi_rb, c2) + 0.5 * rowmul(s.psi_bb, s2);
  vp.v_y = -vp.u_x;
  Field dbpsi = rowmul(s.psi_b, s2), drdb = rowmul(s.psi_rb, s2);
  vp.u_y = a * rowmul(s.psi_r, -(RowVec::Ones(g.nb()) + 2.0 * sn2)) - a * drdb - dbpsi - 2.0 * P -
           a * a * rowmul(s.psi_rr, sn2) - rowmul(s.psi_bb, cs2);
  vp.v_x = a * rowmul(s.psi_r, RowVec::Ones(g.nb()) + 2.0 * cs2) - a * drdb - dbpsi + 2.0 * P +
           a * a * rowmul(s.psi_rr, cs2) + rowmul(s.psi_bb, sn2);
  Vec r = g.r.array().pow(1.0 / a).matrix();
  Field rF = r.asDiagonal() * ones;
  vp.u = rF.cwiseProduct(rowmul(-2.0 * P - a * s.psi_r, sb) - rowmul(s.psi_b, cb));
  vp.v = rF.cwiseProduct(rowmul(2.0 * P + a * s.psi_r, cb) - rowmul(s.psi_b, sb));
  vp.u_x_lead = (-(2.0 / (kPi * a)) * s.l12) * RowVec::Ones(g.nb());
  vp.u_x_rest = vp.u_x - vp.u_x_lead;
  return vp;
}

TransportCoeffs transport_coeffs(const Grid& g, const StreamSolution& s) {
  const double a = g.alpha;
  TransportCoeffs tc;
  tc.c_r = -a * s.psi_b;
  tc.a_r = g.r.asDiagonal() * tc.c_r;
  tc.a_beta = 2.0 * s.psi + a * s.psi_r;
  tc.c_b = s.ab_over_s2;
  tc.lead_b = ((2.0 / (kPi * a)) * s.l12) * RowVec::Ones(g.nb());
  return tc;
}

Field apply_transport(const TransportCoeffs& tc, const Field& f_dr, const Field& f_db) {
  return tc.c_r.cwiseProduct(f_dr) + tc.c_b.cwiseProduct(f_db);
}

double orthogonality_residual(const Grid& g, const StreamSolution& s, const Field& omega) {
  const double a = g.alpha;
  Vec os = omega_star(g, omega);
  Vec f = s.modes.col(0);
  Vec df = g.Dr * f;
  Vec lhs = (kPi / 4.0) * (-a * a * (g.Dr * df) - 4.0 * a * df);
  double scale = std::max(omega.cwiseAbs().maxCoeff(), 1e-300);
  return (lhs - os).cwiseAbs().maxCoeff() / scale;
}

std::vector<ManufacturedCase> manufactured_suite(const Grid& g, int n_modes) {
  const double a = g.alpha;
  // f = x^2 (1-x)^2 with x = R/(1+R); D_R = x (1-x) d/dx.
  Vec f(g.nr()), df(g.nr()), d2f(g.nr());
  for (int i = 0; i < g.nr(); ++i) {
    double x = g.r(i) / (1.0 + g.r(i)), w = x * (1.0 - x);
    f(i) = w * w;
    df(i) = w * (2.0 * x - 6.0 * x * x + 4.0 * x * x * x);
    d2f(i) = w * (4.0 * x - 24.0 * x * x + 40.0 * x * x * x - 20.0 * x * x * x * x);
  }
  StreamSolver solver(g, n_modes);
  std::vector<ManufacturedCase> out;
  for (int n : {1, 2, 4}) {
    Vec ang = (2.0 * n * g.beta.array()).sin().matrix();
    Field psi = f * ang.transpose();
    Vec radial = -a * a * d2f - 4.0 * a * df + (4.0 * n * n - 4.0) * f;
    Field omega = radial * ang.transpose();
    StreamSolution s = solver.solve(omega);
    ManufacturedCase c;
    c.n = n;
    c.max_error = (s.psi - psi).cwiseAbs().maxCoeff() / psi.cwiseAbs().maxCoeff();
    c.mode_residual = s.mode_residual.maxCoeff();
    c.orthogonality = orthogonality_residual(g, s, omega);
    out.push_back(c);
  }
  return out;
}

}  // namespace bsq
