#pragma once

// Differential geometry of tori of revolution embedded in R^3, with the
// Clifford ratio R/r = sqrt(2) as the distinguished case. The embedding is
//   Y(theta1, theta2) = ((R + r cos t1) cos t2, (R + r cos t1) sin t2, r sin t1)
// with outward unit normal nu = (cos t1 cos t2, cos t1 sin t2, sin t1) and
// the second fundamental form convention A_ij = -<d_i nu, d_j Y>, so the
// principal curvatures are k1 = -1/r and k2 = -cos t1 / (R + r cos t1).

#include <array>
#include <cmath>

#include "chtorus/circle_field.hpp"
#include "chtorus/numerics.hpp"

namespace chtorus {

struct TorusShape {
  double R = std::sqrt(2.0);  // distance of the tube center circle from the axis
  double r = 1.0;             // tube radius

  TorusShape() = default;
  TorusShape(double R_, double r_) : R(R_), r(r_) {
    require(R > r && r > 0.0, "TorusShape: embeddedness requires R > r > 0");
  }
  static TorusShape clifford() { return TorusShape(std::sqrt(2.0), 1.0); }
  bool is_clifford() const { return std::abs(R / r - std::sqrt(2.0)) < 1e-12; }
  double focal_width() const { return std::min(r, R - r); }
};

struct GeometryJet {
  double theta1 = 0.0;
  double g11 = 0.0, g22 = 0.0;          // metric (diagonal)
  double ginv11 = 0.0, ginv22 = 0.0;    // inverse metric
  double A11 = 0.0, A22 = 0.0;          // second fundamental form
  double k1 = 0.0, k2 = 0.0;            // principal curvatures
  double H = 0.0, absA2 = 0.0, trA3 = 0.0, K = 0.0;
  double Gamma1_22 = 0.0, Gamma2_12 = 0.0, Gamma1_11 = 0.0;
  double dH = 0.0, d2H = 0.0, dAbsA2 = 0.0, d2AbsA2 = 0.0;
  double sqrt_g = 0.0;
  double lap_drift = 0.0;  // b^1 = g^{11} d_1 log sqrt(g), first-order Laplacian coefficient

  // curvature power sum H_j = k1^j + k2^j
  double power_sum(int j) const { return std::pow(k1, j) + std::pow(k2, j); }
};

inline GeometryJet jet(const TorusShape& sh, double theta1) {
  GeometryJet J;
  const double c = std::cos(theta1), s = std::sin(theta1);
  const double w = sh.R + sh.r * c;
  J.theta1 = theta1;
  J.g11 = sh.r * sh.r;
  J.g22 = w * w;
  J.ginv11 = 1.0 / J.g11;
  J.ginv22 = 1.0 / J.g22;
  J.k1 = -1.0 / sh.r;
  J.k2 = -c / w;
  J.A11 = J.k1 * J.g11;  // = -r
  J.A22 = J.k2 * J.g22;  // = -c w
  J.H = J.k1 + J.k2;
  J.absA2 = J.k1 * J.k1 + J.k2 * J.k2;
  J.trA3 = J.k1 * J.k1 * J.k1 + J.k2 * J.k2 * J.k2;
  J.K = J.k1 * J.k2;
  J.Gamma1_22 = w * s / sh.r;
  J.Gamma2_12 = -sh.r * s / w;
  J.Gamma1_11 = 0.0;
  const double dk2 = sh.R * s / (w * w);
  const double d2k2 = sh.R * (c * w + 2.0 * sh.r * s * s) / (w * w * w);
  J.dH = dk2;
  J.d2H = d2k2;
  J.dAbsA2 = 2.0 * J.k2 * dk2;
  J.d2AbsA2 = 2.0 * (dk2 * dk2 + J.k2 * d2k2);
  J.sqrt_g = sh.r * w;
  J.lap_drift = -s / (sh.r * w);
  return J;
}

// embedding and outward normal, used by the independent finite-difference
// oracles and by the ambient-coordinate tests
inline std::array<double, 3> embed(const TorusShape& sh, double t1, double t2) {
  const double w = sh.R + sh.r * std::cos(t1);
  return {w * std::cos(t2), w * std::sin(t2), sh.r * std::sin(t1)};
}
inline std::array<double, 3> normal(const TorusShape& sh, double t1, double t2) {
  (void)sh;
  return {std::cos(t1) * std::cos(t2), std::cos(t1) * std::sin(t2), std::sin(t1)};
}

// Laplace-Beltrami of a theta1-only field, evaluated spectrally:
// (1/sqrt g) d1 (sqrt g g^{11} d1 f) = f''/r^2 - sin(t1) f' / (r (R + r cos t1)).
inline double laplace_beltrami_at(const TorusShape& sh, const CircleField& f,
                                  double theta1) {
  const double c = std::cos(theta1), s = std::sin(theta1);
  const double w = sh.R + sh.r * c;
  return f.evaluate(theta1, 2) / (sh.r * sh.r) - s * f.evaluate(theta1, 1) / (sh.r * w);
}

inline CircleField laplace_beltrami(const TorusShape& sh, const CircleField& f,
                                    std::size_t grid = 0) {
  const std::size_t m = grid ? grid : 4 * f.modes();
  const auto th = theta_nodes(m);
  std::vector<double> v(m);
  for (std::size_t j = 0; j < m; ++j) v[j] = laplace_beltrami_at(sh, f, th[j]);
  return CircleField::from_samples(v, f.modes(), f.symmetric);
}

// Covariant first- and second-order forms of two theta1-only fields.
struct CovariantForms {
  CircleField A_grad_grad;  // (A grad phi, grad psi) = A^{11} phi' psi'
  CircleField A_hess;       // <A, Hess phi> = A^{ij}(phi_ij - Gamma^k_ij phi_k)
  CircleField grad_grad;    // (grad phi, grad psi) = g^{11} phi' psi'
  CircleField grad_sq;      // |grad phi|^2
};

inline double A_hess_at(const TorusShape& sh, const CircleField& phi, double theta1) {
  const auto J = jet(sh, theta1);
  const double Auu = J.k1 * J.ginv11;  // A^{11}
  const double Avv = J.k2 * J.ginv22;  // A^{22}
  return Auu * (phi.evaluate(theta1, 2) - J.Gamma1_11 * phi.evaluate(theta1, 1)) -
         Avv * J.Gamma1_22 * phi.evaluate(theta1, 1);
}

inline CovariantForms covariant_forms(const TorusShape& sh, const CircleField& phi,
                                      const CircleField& psi, std::size_t grid = 0) {
  const std::size_t m = grid ? grid : 4 * std::max(phi.modes(), psi.modes());
  const auto th = theta_nodes(m);
  std::vector<double> agg(m), ah(m), gg(m), gs(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto J = jet(sh, th[j]);
    const double dphi = phi.evaluate(th[j], 1);
    const double dpsi = psi.evaluate(th[j], 1);
    agg[j] = J.k1 * J.ginv11 * dphi * dpsi;
    ah[j] = A_hess_at(sh, phi, th[j]);
    gg[j] = J.ginv11 * dphi * dpsi;
    gs[j] = J.ginv11 * dphi * dphi;
  }
  const std::size_t n = phi.modes();
  const bool sym = phi.symmetric && psi.symmetric;
  CovariantForms out;
  out.A_grad_grad = CircleField::from_samples(agg, n, sym);
  out.A_hess = CircleField::from_samples(ah, n, phi.symmetric);
  out.grad_grad = CircleField::from_samples(gg, n, sym);
  out.grad_sq = CircleField::from_samples(gs, n, true);
  return out;
}

// Residual of the Willmore equation, -Lap_Sigma H + (1/2) H (H^2 - 2|A|^2).
// The Laplacian term goes through the spectral pipeline; the cubic part is
// pointwise from the jet.
inline CircleField willmore_residual(const TorusShape& sh, std::size_t modes = 64,
                                     std::size_t grid = 0) {
  const std::size_t m = grid ? grid : 4 * modes;
  const auto Hf = CircleField::from_function(
      [&](double t) { return jet(sh, t).H; }, modes, true, m);
  const auto th = theta_nodes(m);
  std::vector<double> res(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto J = jet(sh, th[j]);
    res[j] = -laplace_beltrami_at(sh, Hf, th[j]) +
             0.5 * J.H * (J.H * J.H - 2.0 * J.absA2);
  }
  return CircleField::from_samples(res, modes, true);
}

// Integral over the full torus of a theta1-only field:
// Int f dsigma = 2 pi r (2 pi R a0 + pi r a1). Exact for band-limited input.
inline double surface_integral(const TorusShape& sh, const CircleField& f) {
  const double a0 = f.cosc[0];
  const double a1 = f.modes() > 1 ? f.cosc[1] : 0.0;
  return 2.0 * pi * sh.r * (2.0 * pi * sh.R * a0 + pi * sh.r * a1);
}

inline double surface_area(const TorusShape& sh) {
  return 4.0 * pi * pi * sh.R * sh.r;
}

// dsigma-weighted inner product of two theta1-only fields
inline double dsigma_inner(const TorusShape& sh, const CircleField& f,
                           const CircleField& g, std::size_t grid = 256) {
  const auto th = theta_nodes(grid);
  std::vector<double> prod(grid);
  for (std::size_t j = 0; j < grid; ++j)
    prod[j] = f.evaluate(th[j]) * g.evaluate(th[j]);
  const auto pf = CircleField::from_samples(prod, 2, false);
  return surface_integral(sh, pf);
}

}  // namespace chtorus
