#pragma once

// One-dimensional heteroclinic machinery: the monotone odd connection v(t)
// between the wells of an even double-well potential, its correction eta,
// the projection constants, and the five projection integral identities.
//
// v is built from the first integral v' = sqrt(2 W(v)) by inverting
//     t(v) = (2/k) artanh(v) + reg(v),   k = sqrt(W''(1)),
// where reg has a bounded smooth integrand (the artanh term carries the
// full logarithmic singularity of 1/sqrt(2W) at v = +-1). Derivatives then
// come from the chain v'' = W'(v), v''' = W''(v) v', v'''' = W'''(v) v'^2 +
// W''(v) W'(v), so the first-integral relation holds to roundoff.
//
// eta solves L*eta = (1/2) t v'(t) with L* = -d_tt + W''(v); the decaying
// odd solution is
//     eta(t) = v'(t) Int_0^t (v'(s))^-2 [ Int_s^inf (tau/2) v'(tau)^2 dtau ] ds.
// The inner tail integral decays exactly fast enough to cancel the
// (v')^-2 growth, so the outer integrand grows only linearly.

#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "chtorus/double_well.hpp"
#include "chtorus/numerics.hpp"

namespace chtorus {

// Backward running integral T[i] = Int_{x_i}^{x_end} f dx, accumulated from
// the small-tail end so exponentially decaying integrands keep relative
// accuracy.
inline std::vector<double> cumulative_simpson_backward(const std::vector<double>& f,
                                                       double h) {
  const std::size_t n = f.size();
  require(n >= 3, "cumulative_simpson_backward: need at least 3 nodes");
  std::vector<double> T(n, 0.0);
  for (std::size_t k = 2; k < n; k += 2) {
    const std::size_t i = n - 1 - k;
    T[i] = T[i + 2] + h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
  }
  for (std::size_t k = 1; k < n; k += 2) {
    const std::size_t i = n - 1 - k;
    if (i >= 1)
      T[i] = T[i + 1] + h / 12.0 * (-f[i - 1] + 8.0 * f[i] + 5.0 * f[i + 1]);
    else
      T[i] = T[i + 1] + h / 12.0 * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]);
  }
  return T;
}

// nth-derivative of uniformly sampled data, centered 8th order stencils with
// one-sided closure at the ends.
inline std::vector<double> fd_derivative(const std::vector<double>& f, double h,
                                         int order, int width = 9) {
  const int n = int(f.size());
  require(n >= width && width % 2 == 1, "fd_derivative: grid too small");
  const int hw = width / 2;
  std::vector<double> x(width);
  for (int j = 0; j < width; ++j) x[j] = double(j) * h;
  std::vector<std::vector<double>> wts;
  wts.resize(std::size_t(width));
  for (int off = 0; off < width; ++off)
    wts[std::size_t(off)] = fornberg_weights(double(off) * h, x, order)[std::size_t(order)];
  std::vector<double> out(std::size_t(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const int base = std::clamp(i - hw, 0, n - width);
    const auto& w = wts[std::size_t(i - base)];
    double acc = 0.0;
    for (int j = 0; j < width; ++j) acc += w[std::size_t(j)] * f[std::size_t(base + j)];
    out[std::size_t(i)] = acc;
  }
  return out;
}

struct ProfilePoint {
  double v, v1, v2, v3, v4;
};

struct EtaPoint {
  double eta, eta1, eta2;
};

class HeteroclinicProfile {
 public:
  explicit HeteroclinicProfile(DoubleWell well_, double s_max = 34.0)
      : well(std::move(well_)) {
    validate_double_well(well);
    kappa = well.decay_rate();
    build_reg_table();
    build_eta_tables(std::max(s_max, 24.0 / kappa + 10.0));
  }

  const DoubleWell& potential() const { return well; }
  double decay_rate() const { return kappa; }

  ProfilePoint point(double t) const {
    const double v = value(t);
    const double v1 = vprime(v);
    const auto d = well.evaluate(v);
    return {v, v1, d[1], d[2] * v1, d[3] * v1 * v1 + d[2] * d[1]};
  }

  // sqrt(2 W(v)); switches to the Taylor form k*delta*sqrt(1+...) near the
  // wells where direct evaluation of W cancels catastrophically.
  double vprime(double v) const {
    const double delta = std::max(1.0 - std::abs(v), 0.0);
    if (delta < 1e-4) {
      const double k2 = kappa * kappa;
      return kappa * delta *
             std::sqrt(std::max(1.0 + (p_well / k2) * delta + (q_well / k2) * delta * delta, 0.0));
    }
    return std::sqrt(std::max(2.0 * well.W(v), 0.0));
  }

  double value(double t) const {
    if (t == 0.0) return 0.0;
    const double a = std::abs(t);
    const double v = std::tanh(solve_w(a));
    return t > 0 ? v : -v;
  }

  EtaPoint eta_point(double t) const {
    const double s = std::abs(t);
    const double sgn = t >= 0 ? 1.0 : -1.0;
    double A, P;
    if (s <= s_grid.back()) {
      eta_interp(s, A, P);
    } else {  // continue linearly; values here are below double noise
      A = A_tab.back() + (s - s_grid.back()) * P_tab.back();
      P = P_tab.back();
    }
    const auto p = point(s);
    const double eta = p.v1 * A;
    const double eta1 = p.v2 * A + p.v1 * P;
    const double eta2 = well.W2(p.v) * eta - 0.5 * s * p.v1;
    return {sgn * eta, eta1, sgn * eta2};
  }

 private:
  DoubleWell well;
  double kappa = 0.0;

  // t(v) = (2/k) artanh(v) + reg(v); reg sampled on [0,1], odd extension
  std::vector<double> reg_v, reg_val, reg_der;
  double series_B0 = 0.0, series_B1 = 0.0;
  double p_well = 0.0, q_well = 0.0;  // 2W(1-d) = k^2 d^2 + p d^3 + q d^4 + ...

  std::vector<double> s_grid, P_tab, A_tab;

  double bracket(double v) const {
    const double av = std::abs(v);
    const double d = 1.0 - av;
    if (d < 1e-4) return series_B0 + series_B1 * d;
    const double w2 = 2.0 * well.W(av);
    return 1.0 / std::sqrt(w2) - 2.0 / (kappa * (1.0 - av * av));
  }

  void build_reg_table() {
    const double k2 = kappa * kappa;
    p_well = -well.W3(1.0) / 3.0;
    q_well = well.W4(1.0) / 12.0;
    const double p = p_well, q = q_well;
    series_B0 = -0.5 / kappa * (p / k2 + 1.0);
    series_B1 = (0.375 * (p / k2) * (p / k2) - 0.5 * q / k2 - 0.25) / kappa;

    const std::size_t n = 8193;
    reg_v = linspace(0.0, 1.0, n);
    reg_der.resize(n);
    for (std::size_t i = 0; i < n; ++i) reg_der[i] = bracket(reg_v[i]);
    for (double b : reg_der)
      require_num(std::isfinite(b), "heteroclinic: singular quadrature near v=+-1");
    reg_val = cumulative_simpson(reg_der, reg_v[1] - reg_v[0]);
  }

  double reg_eval(double v, double* der = nullptr) const {
    const double av = std::min(std::abs(v), 1.0);
    const double h = reg_v[1] - reg_v[0];
    std::size_t i = std::min(std::size_t(av / h), reg_v.size() - 2);
    const double x = (av - reg_v[i]) / h;
    const double y0 = reg_val[i], y1 = reg_val[i + 1];
    const double m0 = reg_der[i] * h, m1 = reg_der[i + 1] * h;
    const double x2 = x * x, x3 = x2 * x;
    const double val = (2 * x3 - 3 * x2 + 1) * y0 + (x3 - 2 * x2 + x) * m0 +
                       (-2 * x3 + 3 * x2) * y1 + (x3 - x2) * m1;
    if (der) *der = bracket(av);
    return v >= 0 ? val : -val;
  }

  // solve (2/k) w + reg(tanh w) = a for w, a >= 0
  double solve_w(double a) const {
    if (0.5 * kappa * a > 20.0)  // tanh saturated; reg frozen at its end value
      return 0.5 * kappa * (a - reg_val.back());
    double w = 0.5 * kappa * a;
    double lo = 0.0, hi = w + 5.0;
    while (tau(hi) < a) hi *= 2.0;
    for (int it = 0; it < 100; ++it) {
      const double th = std::tanh(w);
      const double r = (2.0 / kappa) * w + reg_eval(th) - a;
      if (std::abs(r) <= 1e-14 * (1.0 + std::abs(a))) break;
      if (r > 0)
        hi = w;
      else
        lo = w;
      const double sech2 = 1.0 - th * th;
      const double dtau = 2.0 / kappa + bracket(th) * sech2;
      double wn = w - r / dtau;
      if (!(wn > lo && wn < hi)) wn = 0.5 * (lo + hi);
      w = wn;
    }
    return w;
  }

  double tau(double w) const { return (2.0 / kappa) * w + reg_eval(std::tanh(w)); }

  void build_eta_tables(double s_max) {
    const double h = 0.002;
    const std::size_t n = std::size_t(std::ceil(s_max / h)) | 1;  // odd
    s_grid = linspace(0.0, h * double(n - 1), n);
    std::vector<double> vp2(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double vp = vprime(std::tanh(solve_w(s_grid[i])));
      vp2[i] = vp * vp;
      g[i] = 0.5 * s_grid[i] * vp2[i];
    }
    const std::vector<double> J = cumulative_simpson_backward(g, h);
    P_tab.resize(n);
    for (std::size_t i = 0; i < n; ++i) P_tab[i] = J[i] / vp2[i];
    A_tab = cumulative_simpson(P_tab, h);
  }

  void eta_interp(double s, double& A, double& P) const {
    const double h = s_grid[1] - s_grid[0];
    std::size_t i = std::min(std::size_t(s / h), s_grid.size() - 2);
    const double x = (s - s_grid[i]) / h;
    const double y0 = A_tab[i], y1 = A_tab[i + 1];
    const double m0 = P_tab[i] * h, m1 = P_tab[i + 1] * h;
    const double x2 = x * x, x3 = x2 * x;
    A = (2 * x3 - 3 * x2 + 1) * y0 + (x3 - 2 * x2 + x) * m0 +
        (-2 * x3 + 3 * x2) * y1 + (x3 - x2) * m1;
    if (i + 2 < P_tab.size() && i >= 1) {  // 4-point Lagrange for P
      const double xm = x + 1.0, xp = x - 1.0, xq = x - 2.0;
      P = -x * xp * xq / 6.0 * P_tab[i - 1] + xm * xp * xq / 2.0 * P_tab[i] -
          xm * x * xq / 2.0 * P_tab[i + 1] + xm * x * xp / 6.0 * P_tab[i + 2];
    } else {
      P = (1.0 - x) * P_tab[i] + x * P_tab[i + 1];
    }
  }
};

// Grid data for the profile and its correction, plus the projection constants.
struct ProfileTable {
  std::vector<double> t_nodes;
  std::vector<double> v, v1, v2, v3, v4;
  std::vector<double> eta, eta1, eta2;
  double c_star = std::numeric_limits<double>::quiet_NaN();
  double b_star = std::numeric_limits<double>::quiet_NaN();
  double d_const = std::numeric_limits<double>::quiet_NaN();
  double decay_rate = 0.0;
  double half_width = 0.0;
  double ode_residual = 0.0;  // max |-v'' + W'(v)| with v'' from finite differences
  std::shared_ptr<const HeteroclinicProfile> engine;

  double h() const { return t_nodes[1] - t_nodes[0]; }
  std::size_t n() const { return t_nodes.size(); }
  const DoubleWell& well() const { return engine->potential(); }
};

inline ProfileTable solve_heteroclinic(const DoubleWell& well, double half_width,
                                       int node_count) {
  require(node_count % 2 == 1 && node_count >= 9,
          "solve_heteroclinic: node_count must be odd (t=0 must be a node)");
  auto engine = std::make_shared<HeteroclinicProfile>(well);
  require(half_width >= 8.0 / engine->decay_rate(),
          "solve_heteroclinic: half_width below 8/decay_rate");
  ProfileTable tab;
  tab.engine = engine;
  tab.decay_rate = engine->decay_rate();
  tab.half_width = half_width;
  tab.t_nodes = linspace(-half_width, half_width, std::size_t(node_count));
  const std::size_t n = tab.t_nodes.size();
  tab.v.resize(n);
  tab.v1.resize(n);
  tab.v2.resize(n);
  tab.v3.resize(n);
  tab.v4.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = engine->point(tab.t_nodes[i]);
    tab.v[i] = p.v;
    tab.v1[i] = p.v1;
    tab.v2[i] = p.v2;
    tab.v3[i] = p.v3;
    tab.v4[i] = p.v4;
  }
  const auto v2fd = fd_derivative(tab.v, tab.h(), 2);
  double r = 0.0;
  for (std::size_t i = 4; i + 4 < n; ++i)
    r = std::max(r, std::abs(-v2fd[i] + well.W1(tab.v[i])));
  tab.ode_residual = r;
  return tab;
}

inline void build_eta(ProfileTable& tab) {
  const std::size_t n = tab.n();
  tab.eta.resize(n);
  tab.eta1.resize(n);
  tab.eta2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = tab.engine->eta_point(tab.t_nodes[i]);
    tab.eta[i] = e.eta;
    tab.eta1[i] = e.eta1;
    tab.eta2[i] = e.eta2;
  }
}

struct ProfileConstants {
  double c_star, b_star, d_const;
};

inline ProfileConstants profile_constants(ProfileTable& tab) {
  const std::size_t n = tab.n();
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = tab.v1[i] * tab.v1[i];
  const double c = simpson(f, tab.h());
  for (std::size_t i = 0; i < n; ++i) f[i] = tab.v2[i] * tab.v2[i];
  const double b = simpson(f, tab.h());
  tab.c_star = c;
  tab.b_star = b;
  tab.d_const = -4.0 * b / c;
  return {c, b, -4.0 * b / c};
}

// Residuals of the five projection identities:
//   1:  Int t v'' v' dt = -c*/2
//   2:  Int (L* eta)' v' dt = c*/4, evaluated as -Int (L* eta) v'' dt
//   3:  Int L*(eta') v' dt = 0
//   4:  Int W'''(v) eta v'^2 dt = c*/4
//   5:  Int (t v'''' - t W''(v) v'' + 2 v''') v' dt = 0
// L* eta and L* eta' use finite-difference second derivatives of the stored
// eta columns, so the checks are independent of the construction identities.
struct IdentityReport {
  std::array<double, 5> value{};
  std::array<double, 5> residual{};
};

inline IdentityReport verify_identities(const ProfileTable& tab) {
  require(!tab.eta.empty(), "verify_identities: eta not built");
  require(std::isfinite(tab.c_star), "verify_identities: constants not computed");
  const std::size_t n = tab.n();
  const double h = tab.h();
  const auto& w = tab.well();

  const auto eta_dd = fd_derivative(tab.eta, h, 2);
  const auto eta1_dd = fd_derivative(tab.eta1, h, 2);

  std::vector<double> f1(n), f2(n), f3(n), f4(n), f5(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = tab.t_nodes[i];
    const double W2v = w.W2(tab.v[i]);
    const double Leta = -eta_dd[i] + W2v * tab.eta[i];
    const double Leta1 = -eta1_dd[i] + W2v * tab.eta1[i];
    f1[i] = t * tab.v2[i] * tab.v1[i];
    f2[i] = -Leta * tab.v2[i];
    f3[i] = Leta1 * tab.v1[i];
    f4[i] = w.W3(tab.v[i]) * tab.eta[i] * tab.v1[i] * tab.v1[i];
    f5[i] = (t * tab.v4[i] - t * W2v * tab.v2[i] + 2.0 * tab.v3[i]) * tab.v1[i];
  }
  IdentityReport rep;
  rep.value = {simpson(f1, h), simpson(f2, h), simpson(f3, h), simpson(f4, h),
               simpson(f5, h)};
  rep.residual[0] = std::abs(rep.value[0] + 0.5 * tab.c_star);
  rep.residual[1] = std::abs(rep.value[1] - 0.25 * tab.c_star);
  rep.residual[2] = std::abs(rep.value[2]);
  rep.residual[3] = std::abs(rep.value[3] - 0.25 * tab.c_star);
  rep.residual[4] = std::abs(rep.value[4]);
  return rep;
}

// Sup-norm residuals of the eta contract, |L*eta - t v'/2| and |L*^2 eta + v''|.
// Differencing runs on a strided copy of the table: applying the 9-point
// second-derivative stencil twice amplifies node-level roundoff by
// (6.5/h^2)^2, so the stride is chosen to put the effective spacing near
// 0.04 where amplified roundoff and h^8 truncation are both far below the
// tolerances.
struct EtaContract {
  double first_order = 0.0;   // max |L*eta - (1/2) t v'|
  double second_order = 0.0;  // max |L*^2 eta + v''|
};

inline EtaContract eta_contract_residuals(const ProfileTable& tab) {
  require(!tab.eta.empty(), "eta_contract_residuals: eta not built");
  const std::size_t stride = std::max<std::size_t>(1, std::size_t(0.04 / tab.h() + 0.5));
  std::vector<double> t, eta, v1, v2, W2v;
  for (std::size_t i = 0; i < tab.n(); i += stride) {
    t.push_back(tab.t_nodes[i]);
    eta.push_back(tab.eta[i]);
    v1.push_back(tab.v1[i]);
    v2.push_back(tab.v2[i]);
    W2v.push_back(tab.well().W2(tab.v[i]));
  }
  const double h = t[1] - t[0];
  const std::size_t m = t.size();
  const auto eta_dd = fd_derivative(eta, h, 2);
  std::vector<double> Leta(m);
  EtaContract out;
  for (std::size_t i = 0; i < m; ++i) {
    Leta[i] = -eta_dd[i] + W2v[i] * eta[i];
    out.first_order = std::max(out.first_order, std::abs(Leta[i] - 0.5 * t[i] * v1[i]));
  }
  const auto Leta_dd = fd_derivative(Leta, h, 2);
  for (std::size_t i = 4; i + 4 < m; ++i) {
    const double LL = -Leta_dd[i] + W2v[i] * Leta[i];
    out.second_order = std::max(out.second_order, std::abs(LL + v2[i]));
  }
  return out;
}

struct WeightedNorm {
  double value = 0.0;
  bool max_at_boundary = false;
};

// Discrete analogue of the exponentially weighted sup norm: max over nodes of
// |f| (1+e^t)^delta (1+e^-t)^delta. A maximum sitting on the last node flags
// an unbounded-growth profile.
inline WeightedNorm weighted_sup_norm(const std::vector<double>& values,
                                      const std::vector<double>& t_nodes, double delta,
                                      double decay_rate) {
  require(values.size() == t_nodes.size(), "weighted_sup_norm: size mismatch");
  require(delta > 0.0 && delta < decay_rate,
          "weighted_sup_norm: delta must lie in (0, decay_rate)");
  WeightedNorm out;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = std::abs(values[i]) * exp_weight(t_nodes[i], delta);
    if (w > out.value) {
      out.value = w;
      arg = i;
    }
  }
  out.max_at_boundary = (arg == 0 || arg + 1 == values.size());
  return out;
}

}  // namespace chtorus
