#pragma once

// Shared numerical kernels: composite/adaptive quadrature, Fornberg finite
// difference weights, least-squares slope fits, and a small fixed-order
// Taylor jet used for smooth cutoff derivatives.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace chtorus {

inline constexpr double pi = 3.141592653589793238462643383279502884;

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require_num(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  require(n >= 2, "linspace: need at least 2 nodes");
  std::vector<double> x(n);
  const double h = (b - a) / double(n - 1);
  for (std::size_t i = 0; i < n; ++i) x[i] = a + h * double(i);
  x.back() = b;
  return x;
}

// Composite Simpson on a uniform grid; node count must be odd.
inline double simpson(const std::vector<double>& f, double h) {
  require(f.size() >= 3 && f.size() % 2 == 1, "simpson: odd node count required");
  double s = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0;
}

// Running integral of uniformly sampled data, fourth order. Even indices use
// composite Simpson; odd indices integrate the local parabola over the half
// panel so the order is preserved everywhere.
inline std::vector<double> cumulative_simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  require(n >= 3, "cumulative_simpson: need at least 3 nodes");
  std::vector<double> F(n, 0.0);
  for (std::size_t i = 2; i < n; i += 2)
    F[i] = F[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
  for (std::size_t i = 1; i < n; i += 2) {
    // integral over [x_{i-1}, x_i] of the parabola through (i-1, i, i+1)
    if (i + 1 < n)
      F[i] = F[i - 1] + h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
    else
      F[i] = F[i - 1] + h / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
  }
  return F;
}

namespace detail {
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double fa, double fm, double fb,
                                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw std::runtime_error("adaptive quadrature: recursion limit");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-12, int max_depth = 48) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Fornberg weights: w[d][j] multiplies f(x[j]) in the order-d derivative at z.
inline std::vector<std::vector<double>> fornberg_weights(double z,
                                                         const std::vector<double>& x,
                                                         int max_order) {
  const int n = int(x.size()) - 1;
  require(n >= max_order, "fornberg_weights: stencil too small");
  std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n + 1, 0.0));
  double c1 = 1.0, c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double sigma = 0.0;  // rms residual of the fit
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "fit_line: need matching data, n>=2");
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinearFit f;
  const double den = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.sigma = std::sqrt(ss / n);
  return f;
}

// log-log slope of err(eps). The largest eps is dropped when it strays more
// than two sigma from the line fitted through the remaining points
// (pre-asymptotic bend rule).
inline LinearFit fit_order(const std::vector<double>& eps, const std::vector<double>& err,
                           bool* dropped_largest = nullptr) {
  require(eps.size() == err.size() && eps.size() >= 2, "fit_order: bad data");
  std::vector<double> lx(eps.size()), ly(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    require_num(err[i] > 0.0 && eps[i] > 0.0, "fit_order: nonpositive data");
    lx[i] = std::log(eps[i]);
    ly[i] = std::log(err[i]);
  }
  LinearFit full = fit_line(lx, ly);
  if (dropped_largest) *dropped_largest = false;
  if (eps.size() >= 4) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < eps.size(); ++i)
      if (eps[i] > eps[imax]) imax = i;
    std::vector<double> rx, ry;
    for (std::size_t i = 0; i < eps.size(); ++i)
      if (i != imax) {
        rx.push_back(lx[i]);
        ry.push_back(ly[i]);
      }
    LinearFit rest = fit_line(rx, ry);
    const double pred = rest.intercept + rest.slope * lx[imax];
    if (std::abs(ly[imax] - pred) > 2.0 * std::max(rest.sigma, 1e-3)) {
      if (dropped_largest) *dropped_largest = true;
      return rest;
    }
  }
  return full;
}

// Taylor jet of order 4: value and first four derivatives.
struct Jet5 {
  std::array<double, 5> c{0, 0, 0, 0, 0};

  static Jet5 constant(double v) {
    Jet5 j;
    j.c[0] = v;
    return j;
  }
  static Jet5 variable(double v) {
    Jet5 j;
    j.c[0] = v;
    j.c[1] = 1.0;
    return j;
  }
  double value() const { return c[0]; }
  // k-th derivative (Taylor coefficients carry 1/k!)
  double deriv(int k) const {
    static const double fact[5] = {1, 1, 2, 6, 24};
    return c[std::size_t(k)] * fact[k];
  }
  friend Jet5 operator+(const Jet5& a, const Jet5& b) {
    Jet5 r;
    for (int i = 0; i < 5; ++i) r.c[i] = a.c[i] + b.c[i];
    return r;
  }
  friend Jet5 operator-(const Jet5& a, const Jet5& b) {
    Jet5 r;
    for (int i = 0; i < 5; ++i) r.c[i] = a.c[i] - b.c[i];
    return r;
  }
  friend Jet5 operator*(const Jet5& a, const Jet5& b) {
    Jet5 r;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; i + j < 5; ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
  }
  friend Jet5 operator*(double s, const Jet5& a) {
    Jet5 r;
    for (int i = 0; i < 5; ++i) r.c[i] = s * a.c[i];
    return r;
  }
  friend Jet5 operator/(const Jet5& a, const Jet5& b) { return a * recip(b); }

  static Jet5 recip(const Jet5& a) {
    const double a0 = a.c[0];
    Jet5 q;  // a/a0 - 1, nilpotent
    for (int i = 1; i < 5; ++i) q.c[i] = a.c[i] / a0;
    Jet5 acc = constant(1.0), term = constant(1.0);
    double sg = -1.0;
    for (int k = 1; k < 5; ++k) {
      term = term * q;
      acc = acc + sg * term;
      sg = -sg;
    }
    Jet5 out;
    for (int i = 0; i < 5; ++i) out.c[i] = acc.c[i] / a0;
    return out;
  }
  static Jet5 exp(const Jet5& a) {
    Jet5 p = a;
    const double e0 = std::exp(a.c[0]);
    p.c[0] = 0.0;
    Jet5 acc = constant(1.0), term = constant(1.0);
    static const double inv_fact[5] = {1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0};
    for (int k = 1; k < 5; ++k) {
      term = term * p;
      Jet5 t;
      for (int i = 0; i < 5; ++i) t.c[i] = term.c[i] * inv_fact[k];
      acc = acc + t;
    }
    return e0 * acc;
  }
};

// (1+e^t)^d (1+e^{-t})^d evaluated through logs to avoid overflow.
inline double exp_weight(double t, double d) {
  const double lp = t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
  const double lm = t > 0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
  return std::exp(d * (lp + lm));
}

}  // namespace chtorus
