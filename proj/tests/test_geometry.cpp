#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "chtorus/torus_geometry.hpp"

using namespace chtorus;

namespace {

// central finite differences of a scalar function of theta
double fd1(const std::function<double(double)>& f, double t, double h = 1e-5) {
  return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h);
}
double fd2(const std::function<double(double)>& f, double t, double h = 1e-4) {
  return (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) + 16 * f(t - h) - f(t - 2 * h)) /
         (12 * h * h);
}

double dot(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

std::array<double, 3> fd_partial(const std::function<std::array<double, 3>(double, double)>& f,
                                 double u, double v, int which, double h = 1e-5) {
  auto at = [&](double du, double dv) { return f(u + du, v + dv); };
  std::array<double, 3> out{};
  for (int c = 0; c < 3; ++c) {
    if (which == 0)
      out[c] = (-at(2 * h, 0)[c] + 8 * at(h, 0)[c] - 8 * at(-h, 0)[c] + at(-2 * h, 0)[c]) /
               (12 * h);
    else
      out[c] = (-at(0, 2 * h)[c] + 8 * at(0, h)[c] - 8 * at(0, -h)[c] + at(0, -2 * h)[c]) /
               (12 * h);
  }
  return out;
}

}  // namespace

TEST_CASE("Clifford jet anchor values", "[geometry]") {
  const auto sh = TorusShape::clifford();
  const auto J0 = jet(sh, 0.0);
  CHECK(J0.H == Catch::Approx(-std::sqrt(2.0)).margin(1e-14));
  CHECK(J0.absA2 == Catch::Approx(4.0 - 2.0 * std::sqrt(2.0)).margin(1e-14));
  CHECK(J0.g11 == Catch::Approx(1.0));
  CHECK(J0.g22 == Catch::Approx((std::sqrt(2.0) + 1.0) * (std::sqrt(2.0) + 1.0)));

  const auto Jh = jet(sh, 0.5 * pi);
  CHECK(Jh.k2 == Catch::Approx(0.0).margin(1e-15));
  CHECK(Jh.H == Catch::Approx(-1.0).margin(1e-15));
  CHECK(Jh.K == Catch::Approx(0.0).margin(1e-15));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0.0, 2.0 * pi);
  for (int i = 0; i < 32; ++i) {
    const auto J = jet(sh, U(rng));
    CHECK(std::abs(J.H * J.H - J.absA2 - 2.0 * J.K) <= 1e-13);
  }
}

TEST_CASE("jet matches finite differences of the embedding", "[geometry]") {
  const TorusShape sh(1.7, 0.8);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.0, 2.0 * pi);
  auto Y = [&](double u, double v) { return embed(sh, u, v); };
  auto Nu = [&](double u, double v) { return normal(sh, u, v); };
  for (int i = 0; i < 32; ++i) {
    const double t1 = U(rng), t2 = U(rng);
    const auto J = jet(sh, t1);
    const auto Yu = fd_partial(Y, t1, t2, 0);
    const auto Yv = fd_partial(Y, t1, t2, 1);
    CHECK(std::abs(dot(Yu, Yu) - J.g11) <= 1e-8);
    CHECK(std::abs(dot(Yv, Yv) - J.g22) <= 1e-8);
    CHECK(std::abs(dot(Yu, Yv)) <= 1e-8);
    const auto Nu_u = fd_partial(Nu, t1, t2, 0);
    const auto Nu_v = fd_partial(Nu, t1, t2, 1);
    CHECK(std::abs(-dot(Nu_u, Yu) - J.A11) <= 1e-8);
    CHECK(std::abs(-dot(Nu_v, Yv) - J.A22) <= 1e-8);
    // Christoffels from metric differences: Gamma^1_22 = -g22'/(2 g11)
    auto g22f = [&](double t) { return jet(sh, t).g22; };
    CHECK(std::abs(-fd1(g22f, t1) / (2.0 * J.g11) - J.Gamma1_22) <= 1e-8);
    CHECK(std::abs(fd1(g22f, t1) / (2.0 * J.g22) - J.Gamma2_12) <= 1e-8);
    // curvature derivatives against differences of the closed forms
    auto Hf = [&](double t) { return jet(sh, t).H; };
    auto A2f = [&](double t) { return jet(sh, t).absA2; };
    CHECK(std::abs(fd1(Hf, t1) - J.dH) <= 1e-8);
    CHECK(std::abs(fd2(Hf, t1) - J.d2H) <= 1e-6);
    CHECK(std::abs(fd1(A2f, t1) - J.dAbsA2) <= 1e-8);
    CHECK(std::abs(fd2(A2f, t1) - J.d2AbsA2) <= 1e-6);
  }
}

TEST_CASE("jet parity and rescaling", "[geometry]") {
  const auto sh = TorusShape::clifford();
  for (double t : {0.3, 1.1, 2.5}) {
    const auto Jp = jet(sh, t), Jm = jet(sh, -t);
    CHECK(Jp.H == Catch::Approx(Jm.H).margin(1e-15));
    CHECK(Jp.dH == Catch::Approx(-Jm.dH).margin(1e-15));
    CHECK(Jp.absA2 == Catch::Approx(Jm.absA2).margin(1e-15));
  }
  const double eps = 0.25;
  const TorusShape scaled(sh.R / eps, sh.r / eps);
  for (double t : {0.0, 0.9, 2.2}) {
    CHECK(jet(scaled, t).H == Catch::Approx(eps * jet(sh, t).H).epsilon(1e-13));
    CHECK(jet(scaled, t).absA2 ==
          Catch::Approx(eps * eps * jet(sh, t).absA2).epsilon(1e-13));
  }
}

TEST_CASE("Laplace-Beltrami spectral operator", "[geometry]") {
  const auto sh = TorusShape::clifford();
  const auto one = CircleField::constant(1.0, 16);
  CHECK(laplace_beltrami(sh, one).sup_norm() <= 1e-13);

  // anchor: Lap H at theta1 = 0 equals 3 sqrt2 - 4, checked both spectrally
  // and with high-order differences of the closed form
  const auto Hf = CircleField::from_function(
      [&](double t) { return jet(sh, t).H; }, 64, true);
  const double spec = laplace_beltrami_at(sh, Hf, 0.0);
  CHECK(spec == Catch::Approx(3.0 * std::sqrt(2.0) - 4.0).margin(1e-8));
  auto Hfun = [&](double t) { return jet(sh, t).H; };
  const double fd = fd2(Hfun, 0.0);  // drift term vanishes at 0 by parity
  CHECK(spec == Catch::Approx(fd).margin(1e-6));

  // divergence theorem on a random band-limited field
  CircleField f(10, true);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (std::size_t k = 0; k < f.modes(); ++k) f.cosc[k] = U(rng) / double(1 + k * k);
  CHECK(std::abs(surface_integral(sh, laplace_beltrami(sh, f, 256))) <= 1e-10);

  // self-adjointness in the dsigma inner product; the operator values are
  // used pointwise so no truncation enters the pairing
  CircleField g(10, true);
  for (std::size_t k = 0; k < g.modes(); ++k) g.cosc[k] = U(rng) / double(1 + k);
  const std::size_t mq = 512;
  const auto thq = theta_nodes(mq);
  std::vector<double> pf(mq), pg(mq);
  for (std::size_t j = 0; j < mq; ++j) {
    pf[j] = laplace_beltrami_at(sh, f, thq[j]) * g.evaluate(thq[j]);
    pg[j] = f.evaluate(thq[j]) * laplace_beltrami_at(sh, g, thq[j]);
  }
  const double lhs = surface_integral(sh, CircleField::from_samples(pf, 2, false));
  const double rhs = surface_integral(sh, CircleField::from_samples(pg, 2, false));
  CHECK(std::abs(lhs - rhs) <= 1e-10);
}

TEST_CASE("covariant forms", "[geometry]") {
  const auto sh = TorusShape::clifford();
  const auto c0 = CircleField::constant(2.0, 8);
  auto forms0 = covariant_forms(sh, c0, c0);
  CHECK(forms0.A_grad_grad.sup_norm() <= 1e-14);
  CHECK(forms0.A_hess.sup_norm() <= 1e-14);
  CHECK(forms0.grad_grad.sup_norm() <= 1e-14);
  CHECK(forms0.grad_sq.sup_norm() <= 1e-14);

  CircleField cosf(8, true);
  cosf.cosc[1] = 1.0;
  const auto forms = covariant_forms(sh, cosf, cosf);
  for (double t : {0.2, 1.0, 2.7}) {
    CHECK(forms.grad_grad.evaluate(t) ==
          Catch::Approx(std::sin(t) * std::sin(t)).margin(1e-12));
  }
}

TEST_CASE("Willmore residual: Clifford vanishes, control shape does not", "[geometry]") {
  const auto res = willmore_residual(TorusShape::clifford(), 64);
  CHECK(res.sup_norm() <= 1e-8);

  const auto res_ctrl = willmore_residual(TorusShape(1.8, 1.0), 64);
  CHECK(res_ctrl.sup_norm() >= 1e-2);

  // evenness of the residual in theta1
  for (double t : {0.4, 1.3, 2.9})
    CHECK(res_ctrl.evaluate(t) == Catch::Approx(res_ctrl.evaluate(-t)).margin(1e-12));

  // the two halves of the equation at theta1 = 0 are each 3 sqrt2 - 4
  const auto sh = TorusShape::clifford();
  const auto J0 = jet(sh, 0.0);
  CHECK(0.5 * J0.H * (J0.H * J0.H - 2.0 * J0.absA2) ==
        Catch::Approx(3.0 * std::sqrt(2.0) - 4.0).margin(1e-14));
}

TEST_CASE("surface integrals", "[geometry]") {
  const auto sh = TorusShape::clifford();
  CHECK(surface_integral(sh, CircleField::constant(1.0, 4)) ==
        Catch::Approx(4.0 * std::sqrt(2.0) * pi * pi).margin(1e-10));
  CHECK(surface_area(sh) == Catch::Approx(4.0 * std::sqrt(2.0) * pi * pi).margin(1e-12));

  CircleField sinf(4, false);
  sinf.sinc[1] = 1.0;
  CHECK(std::abs(surface_integral(sh, sinf)) <= 1e-14);

  CircleField cosf(4, true);
  cosf.cosc[1] = 1.0;
  CHECK(surface_integral(sh, cosf) == Catch::Approx(2.0 * pi * pi).margin(1e-10));
}

TEST_CASE("CircleField Parseval and symmetry", "[geometry]") {
  CircleField f(12, true);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (std::size_t k = 0; k < f.modes(); ++k) f.cosc[k] = U(rng);
  const std::size_t m = 128;
  const auto th = theta_nodes(m);
  double grid_energy = 0.0;
  for (double t : th) grid_energy += f.evaluate(t) * f.evaluate(t);
  grid_energy *= 2.0 * pi / double(m);
  CHECK(grid_energy == Catch::Approx(f.coefficient_energy()).epsilon(1e-12));
  for (double t : {0.3, 1.9})
    CHECK(f.evaluate(t) == Catch::Approx(f.evaluate(-t)).margin(1e-13));

  // round trip through samples, with tail reporting
  const auto back = CircleField::from_samples(f.sample(th), f.modes(), true);
  for (std::size_t k = 0; k < f.modes(); ++k)
    CHECK(back.cosc[k] == Catch::Approx(f.cosc[k]).margin(1e-13));
  CHECK(back.truncation_tail <= 1e-13);

  // products widen the spectrum; the discarded part must be reported
  std::vector<double> sq(m);
  for (std::size_t j = 0; j < m; ++j) sq[j] = f.evaluate(th[j]) * f.evaluate(th[j]);
  const auto prod = CircleField::from_samples(sq, 12, true);
  CHECK(prod.truncation_tail > 1e-6);
}

TEST_CASE("shape validation", "[geometry]") {
  CHECK_THROWS(TorusShape(1.0, 1.0));
  CHECK_THROWS(TorusShape(1.0, 2.0));
  CHECK(TorusShape::clifford().is_clifford());
  CHECK_FALSE(TorusShape(1.8, 1.0).is_clifford());
}
