#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "chtorus/phase_field.hpp"

using namespace chtorus;

namespace {

const ProfileTable& quartic_profile() {
  static ProfileTable tab = [] {
    auto t = solve_heteroclinic(DoubleWell::quartic(), 12.0, 4097);
    build_eta(t);
    profile_constants(t);
    return t;
  }();
  return tab;
}

const double kTau = 0.8 * (std::sqrt(2.0) - 1.0);

}  // namespace

TEST_CASE("smooth cutoffs", "[phasefield]") {
  const double eps = 0.05;
  const auto cut = build_cutoffs(eps, kTau);

  for (int m : {1, 2, 4, 5}) {
    CHECK(cut.chi(m, 0.0) == 1.0);
    CHECK(cut.chi(m, cut.edge(m)) == 1.0);
    CHECK(cut.chi(m, cut.edge(m) + 1.5) == 0.0);
    CHECK(cut.chi(m, -(cut.edge(m) + 1.5)) == 0.0);
  }

  // chi2 chi1 = chi1 pointwise
  for (double t = -cut.edge(5) - 3.0; t <= cut.edge(5) + 3.0; t += 0.037) {
    const double c1 = cut.chi(1, t), c2 = cut.chi(2, t);
    CHECK(c2 * c1 == c1);
    CHECK(c1 >= 0.0);
    CHECK(c1 <= 1.0);
  }

  // jet derivatives against finite differences inside the transition
  const double s0 = cut.edge(3) + 0.37;
  const auto j = cut.chi_jet(3, s0);
  const double h = 1e-3;
  auto chi3 = [&](double t) { return cut.chi(3, t); };
  const double d1 = (-chi3(s0 + 2 * h) + 8 * chi3(s0 + h) - 8 * chi3(s0 - h) +
                     chi3(s0 - 2 * h)) /
                    (12 * h);
  const double d2 = (-chi3(s0 + 2 * h) + 16 * chi3(s0 + h) - 30 * chi3(s0) +
                     16 * chi3(s0 - h) - chi3(s0 - 2 * h)) /
                    (12 * h * h);
  CHECK(j.deriv(1) == Catch::Approx(d1).margin(1e-8));
  CHECK(j.deriv(2) == Catch::Approx(d2).margin(1e-5));

  CHECK_THROWS(build_cutoffs(eps, 0.0));
  CHECK_THROWS(build_cutoffs(eps, std::sqrt(2.0) - 1.0));
}

TEST_CASE("approximate solution assembly", "[phasefield]") {
  const auto sh = TorusShape::clifford();
  const auto& prof = quartic_profile();
  const double eps = 0.05;
  FermiGrid g(sh, eps, kTau, CircleField(8, true));
  const auto pg = profile_on_grid(g, prof);
  const auto approx = assemble_vtilde(g, prof, pg);

  // phi = 0: vtilde = v + eps^2 (H^2 - 2|A|^2) eta, assembled independently
  double worst = 0.0, sup_corr = 0.0, sup_psi = 0.0, sup_eta = 0.0;
  for (std::size_t j = 0; j < g.M(); ++j) {
    const auto J = jet(sh, g.theta[j]);
    const double psi = J.H * J.H - 2.0 * J.absA2;
    sup_psi = std::max(sup_psi, std::abs(psi));
    for (std::size_t i = 0; i < g.K(); ++i) {
      const auto pt = prof.engine->point(g.t[i]);
      const auto et = prof.engine->eta_point(g.t[i]);
      sup_eta = std::max(sup_eta, std::abs(et.eta));
      const double ref = pt.v + eps * eps * psi * et.eta;
      worst = std::max(worst, std::abs(approx.vtilde.v(Eigen::Index(i), Eigen::Index(j)) - ref));
      sup_corr = std::max(sup_corr,
                          std::abs(approx.vtilde.v(Eigen::Index(i), Eigen::Index(j)) - pt.v));
    }
  }
  CHECK(worst <= 1e-14);
  CHECK(sup_corr <= eps * eps * sup_psi * sup_eta * (1.0 + 1e-12));

  // t = 0 is the nodal line
  for (std::size_t j = 0; j < g.M(); j += 7)
    CHECK(approx.vtilde.v(Eigen::Index(g.K() / 2), Eigen::Index(j)) == 0.0);
}

TEST_CASE("global extension", "[phasefield]") {
  const auto sh = TorusShape::clifford();
  const auto& prof = quartic_profile();
  const double eps = 0.02;  // the full cutoff geometry fits inside the collar
  CircleField phi(8, true);
  phi.cosc[1] = 0.05;
  FermiGrid g(sh, eps, kTau, phi);
  const auto cut = build_cutoffs(eps, kTau);
  REQUIRE(g.T() > cut.edge(5) + 1.5);

  const auto pg = profile_on_grid(g, prof);
  const auto approx = assemble_vtilde(g, prof, pg);
  const auto v = assemble_global_v(g, cut, approx.vtilde);

  for (std::size_t i = 0; i < g.K(); ++i) {
    if (std::abs(g.t[i]) < cut.edge(5) + 1.0) continue;
    for (std::size_t j = 0; j < g.M(); ++j) {
      const double val = v.v(Eigen::Index(i), Eigen::Index(j));
      CHECK((val == 1.0 || val == -1.0));
      CHECK(val == (g.t[i] > 0 ? 1.0 : -1.0));
    }
  }
  // center value is the nodal zero
  CHECK(v.v(Eigen::Index(g.K() / 2), Eigen::Index(0)) == 0.0);

  // blend region deviation is exponentially small in tau/2eps + 5
  const double bound = 2.2 * std::exp(-prof.decay_rate * (cut.edge(5) - 1.0));
  double worst = 0.0;
  for (std::size_t i = 0; i < g.K(); ++i)
    for (std::size_t j = 0; j < g.M(); ++j)
      worst = std::max(worst, std::abs(v.v(Eigen::Index(i), Eigen::Index(j)) -
                                       approx.vtilde.v(Eigen::Index(i), Eigen::Index(j))));
  INFO("blend deviation " << worst << " vs " << bound);
  CHECK(worst <= bound);
}

TEST_CASE("F vanishes on the pure phases", "[phasefield]") {
  const auto sh = TorusShape::clifford();
  FermiGrid g(sh, 0.1, kTau, CircleField(8, true));
  GridField one = g.field("1");
  one.v.setConstant(1.0);
  const auto F = evaluate_F(g, one, DoubleWell::quartic());
  CHECK(F.v.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("directional derivative identities", "[phasefield]") {
  const auto sh = TorusShape::clifford();
  const auto& prof = quartic_profile();
  const auto well = prof.well();
  FermiGrid g(sh, 0.1, kTau, CircleField(8, true));
  const auto pg = profile_on_grid(g, prof);
  const auto approx = assemble_vtilde(g, prof, pg);
  const GridField& u = approx.vtilde;

  GridField dir = g.field("direction");
  for (std::size_t i = 0; i < g.K(); ++i)
    for (std::size_t j = 0; j < g.M(); ++j)
      dir.v(Eigen::Index(i), Eigen::Index(j)) =
          std::exp(-0.5 * g.t[i] * g.t[i]) * (1.0 + 0.4 * std::cos(g.theta[j]));

  const auto Fu = evaluate_F(g, u, well, &approx.dt, &approx.dtt);
  const auto Fpv = evaluate_Fprime(g, u, dir, well);

  // zero direction maps to zero
  CHECK(evaluate_Fprime(g, u, g.field("0"), well).v.cwiseAbs().maxCoeff() <= 1e-12);

  std::vector<double> hs{0.1, 0.05, 0.025}, errs;
  for (double h : hs) {
    GridField uh = u;
    uh.v += h * dir.v;
    const auto Fh = evaluate_F(g, uh, well);
    const double err = (Fh.v - Fu.v - h * Fpv.v).cwiseAbs().maxCoeff();
    errs.push_back(err);
  }
  const auto fit = fit_order(hs, errs);
  INFO("F' slope " << fit.slope);
  CHECK(fit.slope == Catch::Approx(2.0).margin(0.1));

  // Taylor closure with the quadratic remainder from its double-integral form
  GridField w = dir;
  w.v *= 0.2;
  GridField uw = u;
  uw.v += w.v;
  const auto Fuw = evaluate_F(g, uw, well);
  const auto Fpw = evaluate_Fprime(g, u, w, well);
  const auto Q = evaluate_Q(g, u, w, well);
  const double closure = (Fuw.v - Fu.v - Fpw.v - Q.v).cwiseAbs().maxCoeff();
  const double wsup = w.v.cwiseAbs().maxCoeff();
  INFO("Taylor closure " << closure);
  CHECK(closure <= 1e-3 * wsup * wsup * wsup);
}

TEST_CASE("linearization potential Gamma", "[phasefield]") {
  const auto sh = TorusShape::clifford();
  const auto& prof = quartic_profile();
  const double eps = 0.05;
  FermiGrid g(sh, eps, kTau, CircleField(8, true));
  const auto cut = build_cutoffs(eps, kTau);
  const auto pg = profile_on_grid(g, prof);
  const auto approx = assemble_vtilde(g, prof, pg);
  const auto v = assemble_global_v(g, cut, approx.vtilde);
  const auto rep = evaluate_Gamma(g, cut, v, prof.well());

  CHECK(rep.outer_value == Catch::Approx(2.0).margin(1e-14));
  CHECK(rep.min >= 1.62);
  CHECK(rep.bound_ok);
  // inside the chi1 = 1 region the potential is exactly W''(1)
  for (std::size_t i = 0; i < g.K(); ++i) {
    if (std::abs(g.t[i]) > cut.edge(1)) continue;
    CHECK(rep.gamma.v(Eigen::Index(i), 0) == 2.0);
  }
}

TEST_CASE("projection curve is even and symmetry is preserved", "[phasefield]") {
  const auto sh = TorusShape::clifford();
  const auto& prof = quartic_profile();
  FermiGrid g(sh, 0.1, kTau, CircleField(8, true));
  const auto pg = profile_on_grid(g, prof);
  const auto approx = assemble_vtilde(g, prof, pg);
  const auto F = evaluate_F(g, approx.vtilde, prof.well(), &approx.dt, &approx.dtt);

  // F on symmetric data is even in theta: grid columns mirror
  for (std::size_t j = 1; j < g.M() / 2; j += 5)
    for (std::size_t i = 0; i < g.K(); i += 17)
      CHECK(F.v(Eigen::Index(i), Eigen::Index(j)) ==
            Catch::Approx(F.v(Eigen::Index(i), Eigen::Index(g.M() - j))).margin(1e-12));

  const auto q = project_residual(g, F, pg);
  for (double th : {0.3, 1.1, 2.6})
    CHECK(q.evaluate(th) == Catch::Approx(q.evaluate(-th)).margin(1e-12));
}
