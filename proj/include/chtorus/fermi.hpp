#pragma once

// Parallel-surface calculus in Fermi coordinates. The parallel torus at
// signed normal distance z has
//   gtilde_11 = (r+z)^2,  gtilde_22 = (R + r cos t1 + z cos t1)^2,
//   Htilde    = k1/(1-z k1) + k2/(1-z k2) = -1/(r+z) - cos t1/(w + z cos t1),
//   btilde^1  = -sin t1 / ((r+z)(w + z cos t1)),
// all at unit scale; the rescaled metric enters through z -> eps z. The
// ambient Laplacian of u(y, z) splits as
//   Lap u = d_zz u - eps Htilde(eps y, eps z) d_z u + Lap_{Sigma_{eps,z}} u,
// and in the shifted coordinate t = z - phi(eps y) the theta-chain adds the
// phi-derivative terms. Coefficients here are always the exact parallel
// metric; the truncated expansion through (eps z)^2 exists only to verify
// the remainder order.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "chtorus/circle_field.hpp"
#include "chtorus/numerics.hpp"
#include "chtorus/torus_geometry.hpp"

namespace chtorus {

struct ParallelJet {
  double theta1 = 0.0, z = 0.0;
  double g11 = 0.0, g22 = 0.0, ginv11 = 0.0, ginv22 = 0.0;
  double H = 0.0;   // mean curvature of the parallel surface
  double b1 = 0.0;  // first-order Laplacian coefficient
  double sqrt_g = 0.0;
};

inline ParallelJet parallel_jet(const TorusShape& sh, double theta1, double z) {
  require(std::abs(z) < sh.focal_width(),
          "parallel_jet: |z| reaches the focal set, coordinates degenerate");
  const double c = std::cos(theta1), s = std::sin(theta1);
  const double w = sh.R + sh.r * c;
  ParallelJet J;
  J.theta1 = theta1;
  J.z = z;
  const double a = sh.r + z, b = w + z * c;
  J.g11 = a * a;
  J.g22 = b * b;
  J.ginv11 = 1.0 / J.g11;
  J.ginv22 = 1.0 / J.g22;
  J.H = -1.0 / a - c / b;
  J.b1 = -s / (a * b);
  J.sqrt_g = a * b;
  return J;
}

// truncated power series sum_{j=1}^{J} z^{j-1} H_j(theta1)
inline double mean_curvature_series(const TorusShape& sh, double theta1, double z,
                                    int terms) {
  const auto J0 = jet(sh, theta1);
  double acc = 0.0, zp = 1.0;
  for (int j = 1; j <= terms; ++j) {
    acc += zp * J0.power_sum(j);
    zp *= z;
  }
  return acc;
}

struct ExpansionCoeffs {
  double theta1 = 0.0;
  double a1_11 = 0.0, a1_22 = 0.0;  // 2 A^{ij}
  double b1_1 = 0.0;
  double a2_11 = 0.0, a2_22 = 0.0;  // (1/2) d_zz gtilde^{ij} at z=0
  double b2_1 = 0.0;                // (1/2) d_zz btilde^1 at z=0
};

inline ExpansionCoeffs expansion_coeffs(const TorusShape& sh, double theta1) {
  const auto J = jet(sh, theta1);
  ExpansionCoeffs E;
  E.theta1 = theta1;
  E.a1_11 = 2.0 * J.k1 * J.ginv11;
  E.a1_22 = 2.0 * J.k2 * J.ginv22;
  E.a2_11 = 3.0 * J.k1 * J.k1 * J.ginv11;
  E.a2_22 = 3.0 * J.k2 * J.k2 * J.ginv22;
  // btilde^1(z) = -s/((r+z)(w+zc)) = b^1 [1 + H z + (k1^2 + k1 k2 + k2^2) z^2 + ...]
  const double b0 = J.lap_drift;
  E.b1_1 = b0 * J.H;
  E.b2_1 = b0 * (J.k1 * J.k1 + J.k1 * J.k2 + J.k2 * J.k2);
  return E;
}

// b1 from its covariant definition 2 grad_j A^{ij} + 2 Gamma^k_{kj} A^{ij} - g^{ij} d_j H,
// kept as an independent route against the z-expansion above.
inline double b1_covariant_route(const TorusShape& sh, double theta1) {
  const auto J = jet(sh, theta1);
  const double A11up = J.k1 * J.ginv11;  // A^{11}; d_1 A^{11} = 0 on a torus of revolution
  const double GammaTrace1 = J.Gamma1_11 + J.Gamma2_12;  // Gamma^k_{k1}
  return 2.0 * GammaTrace1 * A11up - J.ginv11 * J.dH;
}

// ---------------------------------------------------------------------------
// tensor-product grid over (theta1, t)

struct GridField {
  Eigen::MatrixXd v;  // rows: t index, cols: theta index
  std::string what;
};

// spectral differentiation matrices on m uniform circle nodes
inline void fourier_diff_matrices(std::size_t m, Eigen::MatrixXd& D1, Eigen::MatrixXd& D2) {
  require(m >= 4 && m % 2 == 0, "fourier_diff_matrices: even node count");
  D1.setZero(Eigen::Index(m), Eigen::Index(m));
  D2.setZero(Eigen::Index(m), Eigen::Index(m));
  const std::size_t half = m / 2;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t l = 0; l < m; ++l) {
      double d1 = 0.0, d2 = 0.0;
      for (std::size_t k = 1; k < half; ++k) {
        const double ang = 2.0 * pi * double(k) * (double(j) - double(l)) / double(m);
        d1 += -double(k) * std::sin(ang) * 2.0 / double(m);
        d2 += -double(k) * double(k) * std::cos(ang) * 2.0 / double(m);
      }
      // Nyquist mode: first derivative dropped, second kept
      const double angN =
          2.0 * pi * double(half) * (double(j) - double(l)) / double(m);
      d2 += -double(half) * double(half) * std::cos(angN) / double(m);
      D1(Eigen::Index(j), Eigen::Index(l)) = d1;
      D2(Eigen::Index(j), Eigen::Index(l)) = d2;
    }
  }
  // derivative rows must annihilate constants exactly
  for (Eigen::Index j = 0; j < Eigen::Index(m); ++j) {
    D1(j, j) -= D1.row(j).sum();
    D2(j, j) -= D2.row(j).sum();
  }
}

struct FermiGridConfig {
  std::size_t theta_nodes = 96;
  double t_spacing = 0.03;
  double phi_budget = 0.45;   // reserve for |phi| growth during iterations
  double collar_fraction = 0.95;
  double t_half_width = 0.0;  // 0: choose min(tau/2eps + 8, collar bound)
};

class FermiGrid {
 public:
  TorusShape shape;
  double eps = 0.0, tau = 0.0;
  std::vector<double> theta, t;
  CircleField phi;
  Eigen::VectorXd phi_v, phi_1, phi_2;
  Eigen::MatrixXd D1, D2;
  // exact Laplacian coefficients per node (depend only on z = t + phi)
  Eigen::MatrixXd cH;   // eps * Htilde(theta, eps z)
  Eigen::MatrixXd cg;   // eps^2 * gtilde^{11}(theta, eps z)
  Eigen::MatrixXd cb;   // eps^2 * btilde^1(theta, eps z)
  std::vector<std::vector<double>> wt1, wt2;  // t-stencils per offset class
  int stencil_width = 9;

  FermiGrid(const TorusShape& sh, double eps_, double tau_, const CircleField& phi_,
            FermiGridConfig cfg = {})
      : shape(sh), eps(eps_), tau(tau_), phi(phi_) {
    require(eps > 0.0 && eps <= 1.0, "FermiGrid: eps out of range");
    require(tau > 0.0 && tau < sh.focal_width(), "FermiGrid: tau outside (0, focal width)");
    require(phi.symmetric, "FermiGrid: phi must live in the symmetric subspace");

    theta = theta_nodes(cfg.theta_nodes);
    phi_v.resize(Eigen::Index(theta.size()));
    phi_1.resize(Eigen::Index(theta.size()));
    phi_2.resize(Eigen::Index(theta.size()));
    double phi_max = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      phi_v(Eigen::Index(j)) = phi.evaluate(theta[j], 0);
      phi_1(Eigen::Index(j)) = phi.evaluate(theta[j], 1);
      phi_2(Eigen::Index(j)) = phi.evaluate(theta[j], 2);
      phi_max = std::max(phi_max, std::abs(phi_v(Eigen::Index(j))));
    }

    const double collar = cfg.collar_fraction * sh.focal_width() / eps;
    double T = cfg.t_half_width;
    if (T == 0.0)
      T = std::min(tau / (2.0 * eps) + 8.0,
                   collar - std::max(phi_max, cfg.phi_budget) - 0.05);
    require(T + phi_max < collar,
            "FermiGrid: t range plus |phi| exceeds the coordinate collar");
    require(T > 2.0, "FermiGrid: collar too narrow at this eps");

    std::size_t K = std::size_t(std::ceil(2.0 * T / cfg.t_spacing)) | 1;
    t = linspace(-T, T, K);

    fourier_diff_matrices(theta.size(), D1, D2);
    build_t_stencils();
    build_coefficients();
  }

  double T() const { return t.back(); }
  double ht() const { return t[1] - t[0]; }
  std::size_t K() const { return t.size(); }
  std::size_t M() const { return theta.size(); }

  GridField field(const std::string& what = "") const {
    GridField f;
    f.v.setZero(Eigen::Index(K()), Eigen::Index(M()));
    f.what = what;
    return f;
  }

  // d/dtheta (spectral) and d/dt (8th order stencils)
  Eigen::MatrixXd dtheta(const Eigen::MatrixXd& u) const { return u * D1.transpose(); }
  Eigen::MatrixXd dtheta2(const Eigen::MatrixXd& u) const { return u * D2.transpose(); }

  // stencils applied to differences u(node) - u(center) so constants are
  // annihilated exactly, not merely to the weight-sum roundoff
  Eigen::MatrixXd dt(const Eigen::MatrixXd& u, int order) const {
    const auto& wts = order == 1 ? wt1 : wt2;
    const int n = int(u.rows());
    const int width = stencil_width;
    const int hw = width / 2;
    Eigen::MatrixXd out(u.rows(), u.cols());
    for (int i = 0; i < n; ++i) {
      const int base = std::clamp(i - hw, 0, n - width);
      const auto& w = wts[std::size_t(i - base)];
      out.row(i).setZero();
      for (int j = 0; j < width; ++j) {
        if (base + j == i) continue;
        out.row(i) += w[std::size_t(j)] * (u.row(base + j) - u.row(i));
      }
    }
    return out;
  }

  double z_at(std::size_t ti, std::size_t tj) const {
    return t[ti] + phi_v(Eigen::Index(tj));
  }

 private:
  void build_t_stencils() {
    const int width = stencil_width;
    std::vector<double> x;
    x.resize(std::size_t(width));
    for (int j = 0; j < width; ++j) x[std::size_t(j)] = double(j) * ht();
    wt1.resize(std::size_t(width));
    wt2.resize(std::size_t(width));
    for (int off = 0; off < width; ++off) {
      auto tab = fornberg_weights(double(off) * ht(), x, 2);
      wt1[std::size_t(off)] = tab[1];
      wt2[std::size_t(off)] = tab[2];
    }
  }

  void build_coefficients() {
    const Eigen::Index Ki = Eigen::Index(K()), Mi = Eigen::Index(M());
    cH.resize(Ki, Mi);
    cg.resize(Ki, Mi);
    cb.resize(Ki, Mi);
    for (Eigen::Index j = 0; j < Mi; ++j) {
      const double th = theta[std::size_t(j)];
      const double c = std::cos(th), s = std::sin(th);
      const double w = shape.R + shape.r * c;
      for (Eigen::Index i = 0; i < Ki; ++i) {
        const double ez = eps * (t[std::size_t(i)] + phi_v(j));
        const double a = shape.r + ez, b = w + ez * c;
        require_num(a > 0.0 && b > 0.0,
                    "FermiGrid: parallel metric degenerate inside the grid");
        cH(i, j) = eps * (-1.0 / a - c / b);
        cg(i, j) = eps * eps / (a * a);
        cb(i, j) = eps * eps * (-s / (a * b));
      }
    }
  }
};

// Exact Laplacian in the shifted Fermi coordinates (theta, t), acting on a
// sampled field. Optional exact t-derivatives replace the finite-difference
// ones when the caller knows them analytically.
inline GridField fermi_laplacian_exact(const FermiGrid& g, const GridField& u,
                                       const Eigen::MatrixXd* ut_exact = nullptr,
                                       const Eigen::MatrixXd* utt_exact = nullptr) {
  const Eigen::MatrixXd ut = ut_exact ? *ut_exact : g.dt(u.v, 1);
  const Eigen::MatrixXd utt = utt_exact ? *utt_exact : g.dt(u.v, 2);
  const Eigen::MatrixXd uth = g.dtheta(u.v);
  const Eigen::MatrixXd uthth = g.dtheta2(u.v);
  const Eigen::MatrixXd utth = g.dtheta(ut);

  GridField out = u;
  out.what = "Lap(" + u.what + ")";
  auto& r = out.v;
  for (Eigen::Index j = 0; j < r.cols(); ++j) {
    const double p1 = g.phi_1(j), p2 = g.phi_2(j);
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
      r(i, j) = utt(i, j) - g.cH(i, j) * ut(i, j) +
                g.cg(i, j) * (uthth(i, j) - 2.0 * p1 * utth(i, j) +
                              p1 * p1 * utt(i, j) - p2 * ut(i, j)) +
                g.cb(i, j) * (uth(i, j) - p1 * ut(i, j));
    }
  }
  return out;
}

// flat part d_tt + Lap_{Sigma_eps}
inline GridField flat_laplacian(const FermiGrid& g, const GridField& u,
                                const Eigen::MatrixXd* utt_exact = nullptr) {
  const Eigen::MatrixXd utt = utt_exact ? *utt_exact : g.dt(u.v, 2);
  const Eigen::MatrixXd uth = g.dtheta(u.v);
  const Eigen::MatrixXd uthth = g.dtheta2(u.v);
  GridField out = u;
  out.what = "flat(" + u.what + ")";
  for (Eigen::Index j = 0; j < out.v.cols(); ++j) {
    const auto J = jet(g.shape, g.theta[std::size_t(j)]);
    const double e2 = g.eps * g.eps;
    for (Eigen::Index i = 0; i < out.v.rows(); ++i)
      out.v(i, j) = utt(i, j) + e2 * (J.ginv11 * uthth(i, j) + J.lap_drift * uth(i, j));
  }
  return out;
}

// shifted-coordinate correction D = Lap - (d_tt + Lap_{Sigma_eps})
inline GridField apply_D(const FermiGrid& g, const GridField& u,
                         const Eigen::MatrixXd* ut_exact = nullptr,
                         const Eigen::MatrixXd* utt_exact = nullptr) {
  GridField full = fermi_laplacian_exact(g, u, ut_exact, utt_exact);
  const GridField flat = flat_laplacian(g, u, utt_exact);
  full.v -= flat.v;
  full.what = "D(" + u.what + ")";
  return full;
}

// Pointwise partial derivatives of a test function, for operator checks that
// must not involve grid differencing.
struct PointPartials {
  double u = 0, ut = 0, utt = 0, uth = 0, uthth = 0, utth = 0;
};

// exact D at a point, from the exact parallel coefficients
inline double apply_D_point(const TorusShape& sh, double eps, double theta1, double tval,
                            double phi, double phi1, double phi2,
                            const PointPartials& p) {
  const double c = std::cos(theta1), s = std::sin(theta1);
  const double w = sh.R + sh.r * c;
  const double ez = eps * (tval + phi);
  const double a = sh.r + ez, b = w + ez * c;
  require(a > 0.0 && b > 0.0, "apply_D_point: outside the coordinate collar");
  const double He = eps * (-1.0 / a - c / b);
  const double ge = eps * eps / (a * a);
  const double be = eps * eps * (-s / (a * b));
  const double lap = p.utt - He * p.ut +
                     ge * (p.uthth - 2.0 * phi1 * p.utth + phi1 * phi1 * p.utt -
                           phi2 * p.ut) +
                     be * (p.uth - phi1 * p.ut);
  const auto J0 = jet(sh, theta1);
  const double flat =
      p.utt + eps * eps * (J0.ginv11 * p.uthth + J0.lap_drift * p.uth);
  return lap - flat;
}

// D truncated through the (eps z)^2 metric-expansion terms; the full Htilde
// stays (the remainder of the lemma lives only in abar, bbar).
inline double apply_D_truncated_point(const TorusShape& sh, double eps, double theta1,
                                      double tval, double phi, double phi1, double phi2,
                                      const PointPartials& p) {
  const auto E = expansion_coeffs(sh, theta1);
  const auto J0 = jet(sh, theta1);
  const double ez = eps * (tval + phi);
  require(std::abs(ez) < sh.focal_width(), "apply_D_truncated_point: outside collar");
  const double c = std::cos(theta1);
  const double w = sh.R + sh.r * c;
  const double a = sh.r + ez, b = w + ez * c;
  const double Hhat = -1.0 / a - c / b;

  const double zp = tval + phi;  // z at grid scale: eps * zp = eps z
  const double lapSphi = J0.ginv11 * phi2 + J0.lap_drift * phi1;
  const double gradphi2 = J0.ginv11 * phi1 * phi1;

  double out = -eps * Hhat * p.ut - eps * eps * lapSphi * p.ut -
               2.0 * eps * eps * J0.ginv11 * phi1 * p.utth +
               eps * eps * gradphi2 * p.utt;
  const double o1 = eps * zp;
  out += o1 * eps * eps *
         (E.a1_11 * p.uthth + E.b1_1 * p.uth -
          (E.a1_11 * phi2 + E.b1_1 * phi1) * p.ut - 2.0 * E.a1_11 * phi1 * p.utth +
          E.a1_11 * phi1 * phi1 * p.utt);
  const double o2 = o1 * o1;
  out += o2 * eps * eps *
         (E.a2_11 * p.uthth + E.b2_1 * p.uth -
          (E.a2_11 * phi2 + E.b2_1 * phi1) * p.ut - 2.0 * E.a2_11 * phi1 * p.utth +
          E.a2_11 * phi1 * phi1 * p.utt);
  return out;
}

// ---------------------------------------------------------------------------
// ambient-coordinate oracle: map a (theta1, t) function to R^3 through the
// toroidal chart and take dense fourth-order Cartesian differences.

inline std::array<double, 3> toric_point(const TorusShape& sh, double eps, double theta1,
                                         double theta2, double z) {
  const double rho = sh.r / eps + z;
  const double cyl = sh.R / eps + rho * std::cos(theta1);
  return {cyl * std::cos(theta2), cyl * std::sin(theta2), rho * std::sin(theta1)};
}

// u is given in shifted Fermi coordinates; phi defines the shift
inline double ambient_value(const TorusShape& sh, double eps,
                            const std::function<double(double, double)>& u,
                            const CircleField& phi, const std::array<double, 3>& x) {
  const double cyl = std::hypot(x[0], x[1]);
  const double urad = cyl - sh.R / eps;
  const double rho = std::hypot(urad, x[2]);
  const double theta1 = std::atan2(x[2], urad);
  const double z = rho - sh.r / eps;
  return u(theta1, z - phi.evaluate(theta1));
}

inline double ambient_laplacian_fd(const TorusShape& sh, double eps,
                                   const std::function<double(double, double)>& u,
                                   const CircleField& phi, double theta1, double tval,
                                   double h = 0.02) {
  const double z = tval + phi.evaluate(theta1);
  const auto x0 = toric_point(sh, eps, theta1, 0.4, z);
  auto val = [&](double dx, double dy, double dz) {
    return ambient_value(sh, eps, u, phi, {x0[0] + dx, x0[1] + dy, x0[2] + dz});
  };
  double lap = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    auto at = [&](double d) {
      return val(axis == 0 ? d : 0.0, axis == 1 ? d : 0.0, axis == 2 ? d : 0.0);
    };
    lap += (-at(2 * h) + 16 * at(h) - 30 * at(0) + 16 * at(-h) - at(-2 * h)) /
           (12 * h * h);
  }
  return lap;
}

}  // namespace chtorus
