#pragma once

// Functions on the torus that depend only on the tube angle theta1, stored
// as truncated Fourier series. The symmetric subspace (rotational symmetry
// plus reflection through the x1x2-plane) is cosine-only.

#include <cmath>
#include <vector>

#include "chtorus/numerics.hpp"

namespace chtorus {

inline std::vector<double> theta_nodes(std::size_t m) {
  std::vector<double> th(m);
  for (std::size_t j = 0; j < m; ++j) th[j] = 2.0 * pi * double(j) / double(m);
  return th;
}

class CircleField {
 public:
  bool symmetric = true;         // cosine-only
  std::vector<double> cosc;      // cosc[k] multiplies cos(k theta)
  std::vector<double> sinc;      // sinc[k] multiplies sin(k theta); sinc[0] unused
  double truncation_tail = 0.0;  // rms of modes discarded by the producer

  CircleField() = default;
  explicit CircleField(std::size_t modes, bool symmetric_mode = true)
      : symmetric(symmetric_mode), cosc(modes, 0.0) {
    if (!symmetric) sinc.assign(modes, 0.0);
  }

  std::size_t modes() const { return cosc.size(); }

  static CircleField constant(double c, std::size_t modes, bool symmetric_mode = true) {
    CircleField f(modes, symmetric_mode);
    f.cosc[0] = c;
    return f;
  }

  // d^order/dtheta^order of the series at theta
  double evaluate(double theta, int order = 0) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < cosc.size(); ++k) {
      const double kk = double(k);
      double camp = cosc[k], samp = symmetric ? 0.0 : sinc[k];
      for (int d = 0; d < order; ++d) {  // rotate (c,s) -> (k s, -k c) per d/dtheta of basis
        const double nc = kk * samp;
        const double ns = -kk * camp;
        camp = nc;
        samp = ns;
      }
      acc += camp * std::cos(kk * theta) + samp * std::sin(kk * theta);
    }
    return acc;
  }

  std::vector<double> sample(const std::vector<double>& thetas, int order = 0) const {
    std::vector<double> out(thetas.size());
    for (std::size_t j = 0; j < thetas.size(); ++j) out[j] = evaluate(thetas[j], order);
    return out;
  }

  // Projection of uniform samples onto the leading `modes` coefficients.
  // Spectral content between `modes` and the grid Nyquist is reported as
  // truncation_tail rather than silently dropped.
  static CircleField from_samples(const std::vector<double>& values, std::size_t modes,
                                  bool symmetric_mode = true) {
    const std::size_t m = values.size();
    require(m >= 4 && m % 2 == 0, "CircleField::from_samples: even grid size required");
    require(modes >= 1 && modes <= m / 2, "CircleField::from_samples: too many modes");
    CircleField f(modes, symmetric_mode);
    const std::size_t kmax = m / 2;  // analyse all resolvable modes
    double tail2 = 0.0;
    for (std::size_t k = 0; k < kmax; ++k) {
      double ac = 0.0, as = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double ang = 2.0 * pi * double(k) * double(j) / double(m);
        ac += values[j] * std::cos(ang);
        as += values[j] * std::sin(ang);
      }
      ac *= (k == 0 ? 1.0 : 2.0) / double(m);
      as *= 2.0 / double(m);
      if (k < modes) {
        f.cosc[k] = ac;
        if (!symmetric_mode) f.sinc[k] = as;
        if (symmetric_mode) tail2 += 0.5 * as * as;  // sine leakage counts as tail
      } else {
        tail2 += 0.5 * (ac * ac + as * as);
      }
    }
    f.truncation_tail = std::sqrt(tail2);
    return f;
  }

  static CircleField from_function(const std::function<double(double)>& fn,
                                   std::size_t modes, bool symmetric_mode = true,
                                   std::size_t grid = 0) {
    const std::size_t m = grid ? grid : 4 * modes;
    std::vector<double> v(m);
    const auto th = theta_nodes(m);
    for (std::size_t j = 0; j < m; ++j) v[j] = fn(th[j]);
    return from_samples(v, modes, symmetric_mode);
  }

  // integral of f^2 over the circle, from coefficients
  double coefficient_energy() const {
    double e = 2.0 * pi * cosc[0] * cosc[0];
    for (std::size_t k = 1; k < cosc.size(); ++k) {
      e += pi * cosc[k] * cosc[k];
      if (!symmetric) e += pi * sinc[k] * sinc[k];
    }
    return e;
  }

  CircleField& operator+=(const CircleField& o) {
    require(modes() == o.modes() && symmetric == o.symmetric, "CircleField: mismatch");
    for (std::size_t k = 0; k < cosc.size(); ++k) cosc[k] += o.cosc[k];
    if (!symmetric)
      for (std::size_t k = 0; k < sinc.size(); ++k) sinc[k] += o.sinc[k];
    return *this;
  }
  CircleField& operator*=(double s) {
    for (auto& c : cosc) c *= s;
    for (auto& c : sinc) c *= s;
    return *this;
  }
  friend CircleField operator+(CircleField a, const CircleField& b) { return a += b; }
  friend CircleField operator*(double s, CircleField a) { return a *= s; }
  friend CircleField operator-(CircleField a, const CircleField& b) {
    CircleField nb = b;
    nb *= -1.0;
    return a += nb;
  }

  double sup_norm(std::size_t probe = 1024) const {
    double m = 0.0;
    for (std::size_t j = 0; j < probe; ++j)
      m = std::max(m, std::abs(evaluate(2.0 * pi * double(j) / double(probe))));
    return m;
  }
};

}  // namespace chtorus
