#pragma once

// The approximate solution and the fourth-order interface operator:
//   vtilde(y,t) = v(t) + eps^2 (psi(eps y) + eps L phi(eps y)) eta(t),
//   psi  = H^2 - 2|A|^2 + d |grad phi|^2,
//   Lphi = -4 <A, Hess phi> + 2 H Lap_Sigma phi + phi (2 H |A|^2 - 4 tr A^3),
//   F(u) = -Lap(-Lap u + W'(u)) + W''(u) (-Lap u + W'(u)),
// with every Laplacian the exact Fermi-coordinate one. The residual
// projection q(theta) = Int F v'(t) dt drives the reduced equation.

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "chtorus/fermi.hpp"
#include "chtorus/numerics.hpp"
#include "chtorus/profile.hpp"
#include "chtorus/torus_geometry.hpp"
#include "chtorus/willmore_operator.hpp"

namespace chtorus {

// ---------------------------------------------------------------------------
// smooth cutoffs

// C-infinity bump: 1 below 1, 0 above 2, exponential splice between
inline Jet5 zeta_jet(double s) {
  if (s <= 1.0) return Jet5::constant(1.0);
  if (s >= 2.0) return Jet5::constant(0.0);
  const Jet5 x = Jet5::variable(s);
  auto bump = [](const Jet5& a) {  // exp(-1/a) for a > 0
    return Jet5::exp(Jet5::constant(0.0) - Jet5::recip(a));
  };
  const Jet5 f1 = bump(Jet5::constant(2.0) - x);
  const Jet5 f2 = bump(x - Jet5::constant(1.0));
  return f1 / (f1 + f2);
}

inline double zeta(double s) { return zeta_jet(s).value(); }

// chi_m = 1 for |t| <= tau/2eps + m, = 0 for |t| >= tau/2eps + m + 1
struct CutoffSet {
  double eps = 0.0, tau = 0.0;

  CutoffSet(double eps_, double tau_, double focal = std::sqrt(2.0) - 1.0)
      : eps(eps_), tau(tau_) {
    require(tau > 0.0 && tau < focal, "CutoffSet: tau outside (0, focal width)");
  }
  double edge(int m) const { return tau / (2.0 * eps) + double(m); }
  double chi(int m, double t) const { return zeta(std::abs(t) - edge(m) + 1.0); }
  Jet5 chi_jet(int m, double t) const {
    Jet5 j = zeta_jet(std::abs(t) - edge(m) + 1.0);
    if (t < 0.0) {  // odd-order derivatives flip with the |t| chain
      j.c[1] = -j.c[1];
      j.c[3] = -j.c[3];
    }
    return j;
  }
  static double sign_fn(double z) { return z > 0 ? 1.0 : (z < 0 ? -1.0 : 0.0); }
};

inline CutoffSet build_cutoffs(double eps, double tau,
                               double focal = std::sqrt(2.0) - 1.0) {
  return CutoffSet(eps, tau, focal);
}

// ---------------------------------------------------------------------------
// profile data sampled on the grid t-nodes

struct ProfileOnGrid {
  Eigen::VectorXd v, v1, v2, v3, v4, eta, eta1, eta2;
};

inline ProfileOnGrid profile_on_grid(const FermiGrid& g, const ProfileTable& prof) {
  ProfileOnGrid p;
  const Eigen::Index K = Eigen::Index(g.K());
  p.v.resize(K);
  p.v1.resize(K);
  p.v2.resize(K);
  p.v3.resize(K);
  p.v4.resize(K);
  p.eta.resize(K);
  p.eta1.resize(K);
  p.eta2.resize(K);
  for (Eigen::Index i = 0; i < K; ++i) {
    const auto pt = prof.engine->point(g.t[std::size_t(i)]);
    const auto et = prof.engine->eta_point(g.t[std::size_t(i)]);
    p.v(i) = pt.v;
    p.v1(i) = pt.v1;
    p.v2(i) = pt.v2;
    p.v3(i) = pt.v3;
    p.v4(i) = pt.v4;
    p.eta(i) = et.eta;
    p.eta1(i) = et.eta1;
    p.eta2(i) = et.eta2;
  }
  return p;
}

// ---------------------------------------------------------------------------
// approximate solution

struct ApproximateSolution {
  GridField vtilde;            // full field
  GridField correction;        // eps^2 (psi + eps L phi) eta
  Eigen::VectorXd psi;         // psi at theta nodes
  Eigen::VectorXd Lphi;        // L phi at theta nodes
  Eigen::MatrixXd dt, dtt;     // analytic t-derivatives of vtilde
};

inline ApproximateSolution assemble_vtilde(const FermiGrid& g, const ProfileTable& prof,
                                           const ProfileOnGrid& pg) {
  require(std::isfinite(prof.d_const), "assemble_vtilde: profile constants not set");
  ApproximateSolution out;
  const Eigen::Index K = Eigen::Index(g.K()), M = Eigen::Index(g.M());
  out.psi.resize(M);
  out.Lphi.resize(M);
  for (Eigen::Index j = 0; j < M; ++j) {
    const double th = g.theta[std::size_t(j)];
    const auto J = jet(g.shape, th);
    const double p1 = g.phi_1(j), p2 = g.phi_2(j), pv = g.phi_v(j);
    const double grad2 = J.ginv11 * p1 * p1;
    const double lap = J.ginv11 * p2 + J.lap_drift * p1;
    const double hessA = J.k1 * J.ginv11 * p2 - J.k2 * J.ginv22 * J.Gamma1_22 * p1;
    out.psi(j) = J.H * J.H - 2.0 * J.absA2 + prof.d_const * grad2;
    out.Lphi(j) = -4.0 * hessA + 2.0 * J.H * lap +
                  pv * (2.0 * J.H * J.absA2 - 4.0 * J.trA3);
  }
  out.vtilde = g.field("vtilde");
  out.correction = g.field("vtilde correction");
  out.dt.resize(K, M);
  out.dtt.resize(K, M);
  const double e2 = g.eps * g.eps;
  for (Eigen::Index j = 0; j < M; ++j) {
    const double amp = e2 * (out.psi(j) + g.eps * out.Lphi(j));
    for (Eigen::Index i = 0; i < K; ++i) {
      out.correction.v(i, j) = amp * pg.eta(i);
      out.vtilde.v(i, j) = pg.v(i) + out.correction.v(i, j);
      out.dt(i, j) = pg.v1(i) + amp * pg.eta1(i);
      out.dtt(i, j) = pg.v2(i) + amp * pg.eta2(i);
    }
  }
  return out;
}

// global extension: chi5 vtilde + (1 - chi5) sign(z)
inline GridField assemble_global_v(const FermiGrid& g, const CutoffSet& cut,
                                   const GridField& vtilde) {
  GridField out = vtilde;
  out.what = "global v";
  for (Eigen::Index j = 0; j < out.v.cols(); ++j)
    for (Eigen::Index i = 0; i < out.v.rows(); ++i) {
      const double t = g.t[std::size_t(i)];
      const double c5 = cut.chi(5, t);
      const double H = CutoffSet::sign_fn(t + g.phi_v(j));
      out.v(i, j) = c5 * vtilde.v(i, j) + (1.0 - c5) * H;
    }
  return out;
}

// ---------------------------------------------------------------------------
// the fourth-order operator and its derivatives

// -Lap u + W'(u); analytic t-derivatives of u may be supplied
inline GridField cahn_hilliard_inner(const FermiGrid& g, const GridField& u,
                                     const DoubleWell& well,
                                     const Eigen::MatrixXd* ut = nullptr,
                                     const Eigen::MatrixXd* utt = nullptr) {
  GridField mid = fermi_laplacian_exact(g, u, ut, utt);
  for (Eigen::Index j = 0; j < mid.v.cols(); ++j)
    for (Eigen::Index i = 0; i < mid.v.rows(); ++i)
      mid.v(i, j) = -mid.v(i, j) + well.W1(u.v(i, j));
  mid.what = "-Lap u + W'(u)";
  return mid;
}

inline GridField evaluate_F(const FermiGrid& g, const GridField& u,
                            const DoubleWell& well,
                            const Eigen::MatrixXd* ut = nullptr,
                            const Eigen::MatrixXd* utt = nullptr) {
  const GridField mid = cahn_hilliard_inner(g, u, well, ut, utt);
  GridField out = fermi_laplacian_exact(g, mid);
  for (Eigen::Index j = 0; j < out.v.cols(); ++j)
    for (Eigen::Index i = 0; i < out.v.rows(); ++i)
      out.v(i, j) = -out.v(i, j) + well.W2(u.v(i, j)) * mid.v(i, j);
  out.what = "F(" + u.what + ")";
  return out;
}

// F'(u)v = (-Lap + W''(u))^2-type linearization plus the W''' source term
inline GridField evaluate_Fprime(const FermiGrid& g, const GridField& u,
                                 const GridField& v, const DoubleWell& well,
                                 const GridField* mid_u = nullptr,
                                 const Eigen::MatrixXd* ut = nullptr,
                                 const Eigen::MatrixXd* utt = nullptr) {
  GridField inner = fermi_laplacian_exact(g, v);
  for (Eigen::Index j = 0; j < inner.v.cols(); ++j)
    for (Eigen::Index i = 0; i < inner.v.rows(); ++i)
      inner.v(i, j) = -inner.v(i, j) + well.W2(u.v(i, j)) * v.v(i, j);
  GridField out = fermi_laplacian_exact(g, inner);
  const GridField mid =
      mid_u ? *mid_u : cahn_hilliard_inner(g, u, well, ut, utt);
  for (Eigen::Index j = 0; j < out.v.cols(); ++j)
    for (Eigen::Index i = 0; i < out.v.rows(); ++i)
      out.v(i, j) = -out.v(i, j) + well.W2(u.v(i, j)) * inner.v(i, j) +
                    well.W3(u.v(i, j)) * mid.v(i, j) * v.v(i, j);
  out.what = "F'(" + u.what + ")[" + v.what + "]";
  return out;
}

inline GridField evaluate_Fsecond(const FermiGrid& g, const GridField& u,
                                  const GridField& v, const GridField& w,
                                  const DoubleWell& well,
                                  const GridField* mid_u = nullptr) {
  const GridField mid = mid_u ? *mid_u : cahn_hilliard_inner(g, u, well);
  GridField lv = fermi_laplacian_exact(g, v);
  GridField lw = fermi_laplacian_exact(g, w);
  GridField prod = g.field("W''' v w");
  for (Eigen::Index j = 0; j < prod.v.cols(); ++j)
    for (Eigen::Index i = 0; i < prod.v.rows(); ++i)
      prod.v(i, j) = well.W3(u.v(i, j)) * v.v(i, j) * w.v(i, j);
  GridField out = fermi_laplacian_exact(g, prod);
  for (Eigen::Index j = 0; j < out.v.cols(); ++j)
    for (Eigen::Index i = 0; i < out.v.rows(); ++i) {
      const double uu = u.v(i, j);
      const double t1 = -out.v(i, j);
      const double t2 = (well.W3(uu) * well.W2(uu) + well.W4(uu) * mid.v(i, j)) *
                        v.v(i, j) * w.v(i, j);
      const double t3 = well.W3(uu) * (w.v(i, j) * (-lv.v(i, j) + well.W2(uu) * v.v(i, j)) +
                                       v.v(i, j) * (-lw.v(i, j) + well.W2(uu) * w.v(i, j)));
      out.v(i, j) = t1 + t2 + t3;
    }
  out.what = "F''(" + u.what + ")";
  return out;
}

// quadratic remainder Q(w) = Int_0^1 (1-s) F''(u + s w)[w, w] ds,
// Gauss-Legendre in s
inline GridField evaluate_Q(const FermiGrid& g, const GridField& u, const GridField& w,
                            const DoubleWell& well, int s_nodes = 8) {
  static const double gl8_x[8] = {0.0198550717512319, 0.1016667612931866,
                                  0.2372337950418355, 0.4082826787521751,
                                  0.5917173212478249, 0.7627662049581645,
                                  0.8983332387068134, 0.9801449282487681};
  static const double gl8_w[8] = {0.0506142681451881, 0.1111905172266872,
                                  0.1568533229389436, 0.1813418916891810,
                                  0.1813418916891810, 0.1568533229389436,
                                  0.1111905172266872, 0.0506142681451881};
  require(s_nodes == 8, "evaluate_Q: 8-point rule is the supported choice");
  GridField acc = g.field("Q(" + w.what + ")");
  for (int q = 0; q < 8; ++q) {
    GridField us = u;
    us.v += gl8_x[q] * w.v;
    const GridField f2 = evaluate_Fsecond(g, us, w, w, well);
    acc.v += gl8_w[q] * (1.0 - gl8_x[q]) * f2.v;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// the linearization potential Gamma

struct GammaReport {
  GridField gamma;
  double min = 0.0, max = 0.0;
  double outer_value = 0.0;  // W''(1)
  double bound = 0.0;        // gamma0^2 with gamma0 = 0.9 decay_rate
  bool bound_ok = false;
};

inline GammaReport evaluate_Gamma(const FermiGrid& g, const CutoffSet& cut,
                                  const GridField& v, const DoubleWell& well,
                                  double gamma_fraction = 0.9) {
  GammaReport rep;
  rep.gamma = g.field("Gamma");
  rep.outer_value = well.W2(1.0);
  const double gamma0 = gamma_fraction * std::sqrt(well.W2(1.0));
  rep.bound = gamma0 * gamma0;
  double lo = std::numeric_limits<double>::max(), hi = -lo;
  for (Eigen::Index j = 0; j < rep.gamma.v.cols(); ++j)
    for (Eigen::Index i = 0; i < rep.gamma.v.rows(); ++i) {
      const double c1 = cut.chi(1, g.t[std::size_t(i)]);
      const double val = (1.0 - c1) * well.W2(v.v(i, j)) + c1 * well.W2(1.0);
      rep.gamma.v(i, j) = val;
      lo = std::min(lo, val);
      hi = std::max(hi, val);
    }
  rep.min = lo;
  rep.max = hi;
  rep.bound_ok = rep.bound < rep.min;
  return rep;
}

// ---------------------------------------------------------------------------
// fiberwise projection onto v'(t)

inline std::vector<double> simpson_weights(std::size_t n, double h) {
  require(n % 2 == 1, "simpson_weights: odd node count");
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = (i == 0 || i + 1 == n) ? h / 3.0 : (i % 2 ? 4.0 * h / 3.0 : 2.0 * h / 3.0);
  return w;
}

// q(theta_j) = Int F(theta_j, t) v'(t) dt on the grid
inline CircleField project_residual(const FermiGrid& g, const GridField& F,
                                    const ProfileOnGrid& pg, std::size_t modes = 0) {
  const auto w = simpson_weights(g.K(), g.ht());
  std::vector<double> q(g.M(), 0.0);
  for (std::size_t j = 0; j < g.M(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.K(); ++i)
      acc += w[i] * F.v(Eigen::Index(i), Eigen::Index(j)) * pg.v1(Eigen::Index(i));
    q[j] = acc;
  }
  const std::size_t n = modes ? modes : std::min<std::size_t>(48, g.M() / 2);
  return CircleField::from_samples(q, n, true);
}

// fiberwise projection of an arbitrary grid field (optionally cutoff-weighted)
inline CircleField project_onto_vprime(const FermiGrid& g, const GridField& f,
                                       const ProfileOnGrid& pg, double c_star,
                                       const CutoffSet* cut = nullptr, int chi_index = 0,
                                       std::size_t modes = 0) {
  const auto w = simpson_weights(g.K(), g.ht());
  std::vector<double> q(g.M(), 0.0);
  for (std::size_t j = 0; j < g.M(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.K(); ++i) {
      const double chi = cut ? cut->chi(chi_index, g.t[i]) : 1.0;
      acc += w[i] * chi * f.v(Eigen::Index(i), Eigen::Index(j)) * pg.v1(Eigen::Index(i));
    }
    q[j] = acc / c_star;
  }
  const std::size_t n = modes ? modes : std::min<std::size_t>(48, g.M() / 2);
  return CircleField::from_samples(q, n, true);
}

// ---------------------------------------------------------------------------
// order sweeps used by the verification pipeline

struct OrderSweep {
  std::string quantity;
  std::vector<double> eps_list;
  std::vector<double> errors;
  double fitted_slope = 0.0;
  bool dropped_largest = false;
};

struct ResidualSweepConfig {
  std::vector<double> eps_list{0.1, 0.07, 0.05, 0.035};
  double tau = 0.8 * (std::sqrt(2.0) - 1.0);
  std::size_t theta_nodes = 96;
  double t_spacing = 0.03;
};

// sup norm of F over |t| <= tau/2eps, on v(t) alone or on vtilde
inline OrderSweep residual_order_sweep(const TorusShape& sh, const ProfileTable& prof,
                                       bool with_correction,
                                       ResidualSweepConfig cfg = {}) {
  OrderSweep sweep;
  sweep.quantity = with_correction ? "sup |F(vtilde)|" : "sup |F(v*)|";
  for (double eps : cfg.eps_list) {
    FermiGridConfig gc;
    gc.theta_nodes = cfg.theta_nodes;
    gc.t_spacing = cfg.t_spacing;
    gc.phi_budget = 0.05;
    FermiGrid g(sh, eps, cfg.tau, CircleField(8, true), gc);
    const auto pg = profile_on_grid(g, prof);
    const auto approx = assemble_vtilde(g, prof, pg);
    GridField u = g.field("u");
    Eigen::MatrixXd ut, utt;
    if (with_correction) {
      u.v = approx.vtilde.v;
      ut = approx.dt;
      utt = approx.dtt;
    } else {
      u.v.colwise() = pg.v;
      ut.resize(u.v.rows(), u.v.cols());
      utt.resize(u.v.rows(), u.v.cols());
      ut.colwise() = pg.v1;
      utt.colwise() = pg.v2;
    }
    const auto F = evaluate_F(g, u, prof.well(), &ut, &utt);
    double sup = 0.0;
    for (std::size_t i = 0; i < g.K(); ++i) {
      if (std::abs(g.t[i]) > cfg.tau / (2.0 * eps)) continue;
      for (std::size_t j = 0; j < g.M(); ++j)
        sup = std::max(sup, std::abs(F.v(Eigen::Index(i), Eigen::Index(j))));
    }
    sweep.eps_list.push_back(eps);
    sweep.errors.push_back(sup);
  }
  const auto fit = fit_order(sweep.eps_list, sweep.errors, &sweep.dropped_largest);
  sweep.fitted_slope = fit.slope;
  return sweep;
}

// projection sup norm at phi = 0 over the eps list
inline OrderSweep projection_order_sweep(const TorusShape& sh, const ProfileTable& prof,
                                         ResidualSweepConfig cfg = {}) {
  OrderSweep sweep;
  sweep.quantity = "sup |Int F(vtilde) v' dt|, phi = 0";
  for (double eps : cfg.eps_list) {
    FermiGridConfig gc;
    gc.theta_nodes = cfg.theta_nodes;
    gc.t_spacing = cfg.t_spacing;
    gc.phi_budget = 0.05;
    FermiGrid g(sh, eps, cfg.tau, CircleField(8, true), gc);
    const auto pg = profile_on_grid(g, prof);
    const auto approx = assemble_vtilde(g, prof, pg);
    const auto F = evaluate_F(g, approx.vtilde, prof.well(), &approx.dt, &approx.dtt);
    const auto q = project_residual(g, F, pg);
    sweep.eps_list.push_back(eps);
    sweep.errors.push_back(q.sup_norm());
  }
  const auto fit = fit_order(sweep.eps_list, sweep.errors, &sweep.dropped_largest);
  sweep.fitted_slope = fit.slope;
  return sweep;
}

struct LinearResponse {
  double eps = 0.0;
  double rel_error = 0.0;     // |q + eps^4 c* Ltilde phi| / (eps^4 c* |Ltilde phi|)
  double q_norm = 0.0;
  double ltilde_norm = 0.0;
};

// compare the projection against -eps^4 c* Ltilde phi for the standard
// zero-average cosine bump phi = delta (cos theta - 1/(2 sqrt 2))
inline LinearResponse projection_linear_response(const TorusShape& sh,
                                                 const ProfileTable& prof, double eps,
                                                 double delta = 0.5,
                                                 ResidualSweepConfig cfg = {}) {
  CircleField phi(16, true);
  phi.cosc[0] = -delta / (2.0 * std::sqrt(2.0));
  phi.cosc[1] = delta;
  FermiGridConfig gc;
  gc.theta_nodes = cfg.theta_nodes;
  gc.t_spacing = cfg.t_spacing;
  gc.phi_budget = delta * (1.0 + 1.0 / (2.0 * std::sqrt(2.0))) + 0.02;
  FermiGrid g(sh, eps, cfg.tau, phi, gc);
  const auto pg = profile_on_grid(g, prof);
  const auto approx = assemble_vtilde(g, prof, pg);
  const auto F = evaluate_F(g, approx.vtilde, prof.well(), &approx.dt, &approx.dtt);
  const auto q = project_residual(g, F, pg, 24);
  const auto Lphi = apply_ltilde(sh, phi, 24);
  const double e4c = std::pow(eps, 4) * prof.c_star;
  const CircleField diff = q + e4c * Lphi;
  LinearResponse out;
  out.eps = eps;
  out.q_norm = q.sup_norm();
  out.ltilde_norm = Lphi.sup_norm();
  out.rel_error = diff.sup_norm() / (e4c * out.ltilde_norm);
  return out;
}

}  // namespace chtorus
