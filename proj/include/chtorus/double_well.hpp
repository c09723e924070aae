#pragma once

// Even double-well potentials W with zeros exactly at u = ±1 and W''(1) > 0,
// evaluated together with the first four derivatives.

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "chtorus/numerics.hpp"

namespace chtorus {

struct DoubleWell {
  std::string label;
  // returns {W, W', W'', W''', W''''} at u
  std::function<std::array<double, 5>(double)> evaluate;

  double W(double u) const { return evaluate(u)[0]; }
  double W1(double u) const { return evaluate(u)[1]; }
  double W2(double u) const { return evaluate(u)[2]; }
  double W3(double u) const { return evaluate(u)[3]; }
  double W4(double u) const { return evaluate(u)[4]; }

  double decay_rate() const { return std::sqrt(W2(1.0)); }

  // W(u) = (1-u^2)^2 / 4
  static DoubleWell quartic() {
    DoubleWell w;
    w.label = "quartic";
    w.evaluate = [](double u) -> std::array<double, 5> {
      const double s = 1.0 - u * u;
      return {0.25 * s * s, u * u * u - u, 3.0 * u * u - 1.0, 6.0 * u, 6.0};
    };
    return w;
  }

  // W(u) = (1-u^2)^2 (1 + u^2/2) / 4, an even sextic with W''(1) = 3
  static DoubleWell sextic() {
    return even_poly({0.25, -0.375, 0.0, 0.125}, "sextic");
  }

  // W(u) = sum_k c[k] u^{2k}
  static DoubleWell even_poly(std::vector<double> c, std::string label = "even-poly") {
    DoubleWell w;
    w.label = std::move(label);
    w.evaluate = [c](double u) -> std::array<double, 5> {
      std::array<double, 5> out{0, 0, 0, 0, 0};
      for (std::size_t k = 0; k < c.size(); ++k) {
        const double n = 2.0 * double(k);
        double p = std::pow(u, n);
        out[0] += c[k] * p;
        if (n >= 1) out[1] += c[k] * n * std::pow(u, n - 1);
        if (n >= 2) out[2] += c[k] * n * (n - 1) * std::pow(u, n - 2);
        if (n >= 3) out[3] += c[k] * n * (n - 1) * (n - 2) * std::pow(u, n - 3);
        if (n >= 4) out[4] += c[k] * n * (n - 1) * (n - 2) * (n - 3) * std::pow(u, n - 4);
      }
      return out;
    };
    return w;
  }
};

// Rejects potentials violating the double-well hypotheses. Sampled checks:
// evenness, zeros exactly at +-1, positivity elsewhere, W''(1) = W''(-1) > 0.
inline void validate_double_well(const DoubleWell& w, double range = 1.5,
                                 int samples = 2001) {
  const double tol = 1e-10;
  require(std::abs(w.W(1.0)) <= tol && std::abs(w.W(-1.0)) <= tol,
          "double well '" + w.label + "': W(+-1) must vanish");
  require(w.W2(1.0) > 1e-8, "double well '" + w.label + "': W''(1) must be positive");
  require(std::abs(w.W2(1.0) - w.W2(-1.0)) <= 1e-10 * std::max(1.0, w.W2(1.0)),
          "double well '" + w.label + "': W''(1) != W''(-1)");
  for (int i = 0; i < samples; ++i) {
    const double u = -range + 2.0 * range * double(i) / double(samples - 1);
    const auto a = w.evaluate(u);
    const auto b = w.evaluate(-u);
    require(std::abs(a[0] - b[0]) <= 1e-12 * std::max(1.0, std::abs(a[0])),
            "double well '" + w.label + "': W is not even");
    if (std::abs(std::abs(u) - 1.0) > 1e-3)
      require(a[0] > 0.0, "double well '" + w.label + "': W <= 0 at u=" +
                              std::to_string(u) + " (sign violation)");
  }
}

}  // namespace chtorus
