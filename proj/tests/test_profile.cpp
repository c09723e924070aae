#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "chtorus/profile.hpp"

using namespace chtorus;

namespace {

ProfileTable full_quartic(double T = 12.0, int n = 4097) {
  auto tab = solve_heteroclinic(DoubleWell::quartic(), T, n);
  build_eta(tab);
  profile_constants(tab);
  return tab;
}

const ProfileTable& quartic_table() {
  static ProfileTable tab = full_quartic();
  return tab;
}

}  // namespace

TEST_CASE("quartic heteroclinic matches tanh(t/sqrt2)", "[profile]") {
  const auto& tab = quartic_table();
  double worst = 0.0;
  for (std::size_t i = 0; i < tab.n(); ++i) {
    const double t = tab.t_nodes[i];
    if (std::abs(t) > 10.0) continue;
    worst = std::max(worst, std::abs(tab.v[i] - std::tanh(t / std::sqrt(2.0))));
  }
  CHECK(worst <= 1e-8);
  CHECK(tab.v[tab.n() / 2] == 0.0);
  CHECK(tab.decay_rate == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("profile is odd and satisfies the ODE", "[profile]") {
  const auto& tab = quartic_table();
  const std::size_t n = tab.n();
  double odd = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    odd = std::max(odd, std::abs(tab.v[i] + tab.v[n - 1 - i]));
  CHECK(odd <= 1e-13);
  CHECK(tab.ode_residual <= 1e-8);
}

TEST_CASE("first integral holds pointwise", "[profile]") {
  const auto& tab = quartic_table();
  const auto& w = tab.well();
  double worst = 0.0;
  for (std::size_t i = 0; i < tab.n(); ++i)
    worst = std::max(worst,
                     std::abs(0.5 * tab.v1[i] * tab.v1[i] - w.W(tab.v[i])));
  CHECK(worst <= 1e-10);
}

TEST_CASE("exponential decay with reported constant", "[profile]") {
  const auto& tab = quartic_table();
  double C = 0.0;
  for (std::size_t i = 0; i < tab.n(); ++i) {
    const double t = tab.t_nodes[i];
    if (t < 1.0) continue;
    C = std::max(C, std::abs(tab.v[i] - 1.0) * std::exp(tab.decay_rate * t));
  }
  INFO("fitted decay constant " << C);
  CHECK(C > 0.0);
  CHECK(C < 5.0);
}

TEST_CASE("projection constants against closed forms", "[profile]") {
  const auto& tab = quartic_table();
  CHECK(std::abs(tab.c_star - 2.0 * std::sqrt(2.0) / 3.0) <= 1e-8);
  CHECK(std::abs(tab.b_star - 4.0 * std::sqrt(2.0) / 15.0) <= 1e-8);
  CHECK(std::abs(tab.d_const + 8.0 / 5.0) <= 1e-7);
}

TEST_CASE("eta contract", "[profile]") {
  const auto& tab = quartic_table();
  const std::size_t n = tab.n();
  CHECK(tab.eta[n / 2] == 0.0);

  const auto ec = eta_contract_residuals(tab);
  INFO("L*eta residual " << ec.first_order << ", L*^2 eta residual " << ec.second_order);
  CHECK(ec.first_order <= 1e-7);
  CHECK(ec.second_order <= 1e-6);

  std::vector<double> orto(n);
  for (std::size_t i = 0; i < n; ++i) orto[i] = tab.eta[i] * tab.v1[i];
  CHECK(std::abs(simpson(orto, tab.h())) <= 1e-8);

  double odd = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    odd = std::max(odd, std::abs(tab.eta[i] + tab.eta[n - 1 - i]));
  CHECK(odd <= 1e-12);
}

TEST_CASE("projection identities, quartic and sextic wells", "[profile]") {
  for (const auto& well : {DoubleWell::quartic(), DoubleWell::sextic()}) {
    auto tab = solve_heteroclinic(well, std::max(12.0, 8.0 / well.decay_rate()), 4097);
    build_eta(tab);
    profile_constants(tab);
    const auto rep = verify_identities(tab);
    INFO("well " << well.label);
    for (int k = 0; k < 5; ++k) {
      INFO("identity " << k + 1 << " residual " << rep.residual[std::size_t(k)]);
      CHECK(rep.residual[std::size_t(k)] <= 1e-7);
    }
  }
}

TEST_CASE("identity residuals shrink at the discretization order", "[profile]") {
  // Identities 1, 4, 5 integrate analytically sampled exponentially flat
  // data, so their residuals sit at the roundoff floor on any usable grid.
  // Identities 2 and 3 carry the finite-difference error of L*eta and
  // L*(eta'), which must drop by at least the composite-rule order 2^4
  // under node doubling.
  auto coarse = solve_heteroclinic(DoubleWell::quartic(), 12.0, 257);
  build_eta(coarse);
  profile_constants(coarse);
  auto fine = solve_heteroclinic(DoubleWell::quartic(), 12.0, 513);
  build_eta(fine);
  profile_constants(fine);
  const auto rc = verify_identities(coarse);
  const auto rf = verify_identities(fine);
  for (std::size_t k : {std::size_t(1), std::size_t(2)}) {
    INFO("identity " << k + 1 << ": " << rc.residual[k] << " -> " << rf.residual[k]);
    CHECK(rc.residual[k] / std::max(rf.residual[k], 1e-15) >= 16.0);
  }
  for (std::size_t k : {std::size_t(0), std::size_t(3), std::size_t(4)})
    CHECK(rf.residual[k] <= rc.residual[k] + 1e-12);
}

TEST_CASE("weighted sup norm", "[profile]") {
  const auto& tab = quartic_table();
  const std::vector<double> zero(tab.n(), 0.0);
  CHECK(weighted_sup_norm(zero, tab.t_nodes, 0.5, tab.decay_rate).value == 0.0);

  const double delta = 0.5 * tab.decay_rate;
  const auto wn = weighted_sup_norm(tab.v1, tab.t_nodes, delta, tab.decay_rate);
  // dense-grid oracle
  double oracle = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double t = -12.0 + 24.0 * i / 200000.0;
    const double v1 = tab.engine->point(t).v1;
    oracle = std::max(oracle, v1 * exp_weight(t, delta));
  }
  CHECK_FALSE(wn.max_at_boundary);
  CHECK(wn.value == Catch::Approx(oracle).epsilon(1e-6));

  const std::vector<double> ones(tab.n(), 1.0);
  const auto wn1 = weighted_sup_norm(ones, tab.t_nodes, 0.3, tab.decay_rate);
  CHECK(wn1.max_at_boundary);
  CHECK(wn1.value == Catch::Approx(exp_weight(12.0, 0.3)).epsilon(1e-12));

  CHECK_THROWS(weighted_sup_norm(ones, tab.t_nodes, 2.0, tab.decay_rate));
  CHECK_THROWS(weighted_sup_norm(ones, tab.t_nodes, 0.0, tab.decay_rate));
}

TEST_CASE("double well validation rejects bad input", "[profile]") {
  CHECK_THROWS(validate_double_well(
      DoubleWell::even_poly({0.125, -0.5, 0.75, -0.5, 0.125}, "degenerate")));
  // tampered quartic goes negative inside (-1,1)
  auto bad = DoubleWell::quartic();
  bad.evaluate = [inner = bad.evaluate](double u) {
    auto a = inner(u);
    a[0] -= 0.3 * (1 - u * u) * (1 - u * u) * (u * u);
    return a;
  };
  CHECK_THROWS(solve_heteroclinic(bad, 12.0, 513));
  CHECK_NOTHROW(validate_double_well(DoubleWell::quartic()));
  CHECK_NOTHROW(validate_double_well(DoubleWell::sextic()));
}

TEST_CASE("preconditions rejected", "[profile]") {
  CHECK_THROWS(solve_heteroclinic(DoubleWell::quartic(), 12.0, 512));  // even count
  CHECK_THROWS(solve_heteroclinic(DoubleWell::quartic(), 3.0, 513));   // too narrow
}
