#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "saddle/extension.hpp"
#include "saddle/saddle.hpp"
#include "saddle/stability.hpp"

using namespace saddle;

namespace {

const Nonlinearity& ac() {
  static const Nonlinearity n = make_nonlinearity(NonlinearityKind::allen_cahn);
  return n;
}

const SaddleState& minimizer() {
  static const SaddleState st = [] {
    DescentParams dp;
    dp.tol = 1e-9;
    return minimize_energy(ac(), make_grid3(1, 10, std::pow(10.0, 0.75), 0.5), dp);
  }();
  return st;
}

}  // namespace

TEST_CASE("energy of constant fields") {
  const GridSpec3 g = make_grid3(1, 8, 6, 0.5);
  Field3 zero(g, 0.0), one(g, 1.0);
  // box: the bottom dual cells tile [0,R]^2 exactly
  CHECK(discrete_energy(zero, ac(), EnergyRegion::whole(g, false)) == doctest::Approx(0.25 * 64).epsilon(1e-13));
  CHECK(discrete_energy(one, ac(), EnergyRegion::whole(g, false)) == 0.0);
  for (double S : {3.0, 5.0, 7.5}) {
    const double e = discrete_energy(zero, ac(), {EnergyRegion::cylinder, S, S, false});
    const double exact = 0.25 * M_PI * S * S / 4;
    CHECK(std::abs(e - exact) <= 0.25 * 2 * S * g.h_s);
  }
  CHECK_THROWS_AS(discrete_energy(zero, ac(), {EnergyRegion::cylinder, 0, 3, false}), DomainError);
}

TEST_CASE("wedge energy is half the energy of the odd field") {
  GridSpec3 g = make_grid3(2, 6, 4, 0.5);
  Field3 v(g, 0.0);
  for (int k = 0; k < g.nl(); ++k)
    for (int j = 0; j < g.nt(); ++j)
      for (int i = j + 1; i < g.ns(); ++i) v.at(i, j, k) = std::sin(0.7 * i + 0.3 * j * j + 0.2 * k);
  const Field3 odd = odd_reflect(v);
  const double full = discrete_energy(odd, ac(), EnergyRegion::whole(g, false));
  const double half = discrete_energy(odd, ac(), EnergyRegion::whole(g, true));
  CHECK(full == doctest::Approx(2 * half).epsilon(1e-13));
}

TEST_CASE("minimizer on the wedge") {
  const SaddleState& st = minimizer();
  const GridSpec3& g = st.v.grid;
  const auto& hist = st.energy_history;
  for (std::size_t q = 1; q < hist.size(); ++q) CHECK(hist[q] <= hist[q - 1]);
  // the distance candidate is the starting point
  CHECK(hist.front() == doctest::Approx(discrete_energy(distance_candidate(g), ac(), EnergyRegion::whole(g, true))));
  CHECK(hist.back() < hist.front());
  CHECK(discrete_energy(st.v, ac(), EnergyRegion::whole(g, true)) == doctest::Approx(hist.back()).epsilon(1e-10));

  bool inside = true, pinned = true;
  for (int k = 0; k < g.nl(); ++k)
    for (int j = 0; j < g.nt(); ++j)
      for (int i = 0; i < g.ns(); ++i) {
        const double x = st.v.at(i, j, k);
        if (j >= i || i == g.ns() - 1 || k == g.nl() - 1) pinned = pinned && x == 0.0;
        else inside = inside && x > 0 && x < 1;
      }
  CHECK(inside);
  CHECK(pinned);

  const ElResiduals el = euler_lagrange_residuals(st, ac());
  CHECK(el.interior <= 1e-9);
  CHECK(el.bottom <= 1e-9);

  // energy below the zero field on a cylinder
  const Field3 full = odd_reflect(st.v);
  const EnergyRegion c5{EnergyRegion::cylinder, 5, 5, false};
  CHECK(discrete_energy(full, ac(), c5) < discrete_energy(Field3(g, 0.0), ac(), c5));
}

TEST_CASE("continuing the descent does not move the energy") {
  const SaddleState& st = minimizer();
  DescentParams dp;
  dp.tol = 1e-9;
  dp.initial = &st.v;
  const SaddleState again = minimize_energy(ac(), st.v.grid, dp);
  CHECK(std::abs(again.energy_history.back() - st.energy_history.back()) < 1e-9);
}

TEST_CASE("minimizer preconditions and stalls") {
  CustomFunctions even{[](double u) { return 1 - u * u; }, [](double u) { return -2 * u; },
                       [](double u) { return -u + u * u * u / 3; }};
  const GridSpec3 g = make_grid3(1, 4, 4, 0.5);
  CHECK_THROWS_AS(minimize_energy(make_nonlinearity(NonlinearityKind::custom, even), g), PreconditionError);
  DescentParams dp;
  dp.max_sweeps = 2;
  try {
    minimize_energy(ac(), g, dp);
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.history.size() == 3);
  }
}

TEST_CASE("odd reflection") {
  const SaddleState& st = minimizer();
  const SaddleState r = odd_reflect(st);
  const GridSpec3& g = r.v.grid;
  CHECK(r.reflected);
  for (int k = 0; k < g.nl(); k += 3)
    for (int j = 0; j < g.nt(); ++j)
      for (int i = 0; i < g.ns(); ++i) CHECK(r.v.at(i, j, k) == -r.v.at(j, i, k));
  CHECK(odd_reflect(r.v).values == r.v.values);
  CHECK_THROWS_AS(odd_reflect(r), PreconditionError);

  // the reflected field solves the interior equation across the cone
  const Field3 res = pde_residual(r.v, 1);
  double worst = 0;
  for (int k = 1; k + 1 < g.nl(); ++k)
    for (int j = 0; j + 1 < g.nt(); ++j)
      for (int i = 0; i + 1 < g.ns(); ++i) worst = std::max(worst, std::abs(res.at(i, j, k)));
  CHECK(worst <= 1e-8);

  GridSpec3 rect{1, 4, 2, 2, 0.5, 0.5, 0.5};
  CHECK_THROWS_AS(odd_reflect(Field3(rect, 0.0)), PreconditionError);
}

TEST_CASE("comparison candidate") {
  const SaddleState& st = minimizer();
  const GridSpec3& g = st.v.grid;
  const double S = 7, gam = 0.75, beta = 0.6;
  const Field3 w = comparison_candidate(st.v, S, gam, beta);
  const double top = std::pow(S, gam), plateau = top - std::pow(S, beta);
  // (S-2, 0, 0): distance to the cone is (S-2)/sqrt2 > 1
  CHECK(w.at(int((S - 2) / g.h_s + 0.5), 0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  for (int k = 0; k < g.nl(); ++k)
    for (int j = 0; j < g.nt(); ++j)
      for (int i = j; i < g.ns(); ++i) {
        const double s = g.s(i), t = g.t(j), l = g.lambda(k), r = std::hypot(s, t);
        if (r >= S - 1e-12 || l >= top - 1e-12) CHECK(w.at(i, j, k) == st.v.at(i, j, k));
        if (r <= S - 1 && l <= plateau) CHECK(w.at(i, j, k) == doctest::Approx(std::min(1.0, (s - t) / std::sqrt(2.0))));
      }
  CHECK_THROWS_AS(comparison_candidate(st.v, S, 0.6, 0.6), PreconditionError);
  CHECK_THROWS_AS(comparison_candidate(st.v, S, 0.75, 0.4), PreconditionError);
  CHECK_THROWS_AS(comparison_candidate(st.v, 8.5, 0.75, 0.6), PreconditionError);
}

TEST_CASE("cone stability form") {
  const SaddleState& st = minimizer();
  const GridSpec3& g = st.v.grid;
  CHECK(cone_stability_form(st, ac(), Field3(g, 0.0)) == 0.0);
  const Field3 xi = random_test_field(g, 7, true);
  Field3 xi2 = xi;
  for (double& x : xi2.values) x *= 2;
  const double q = cone_stability_form(st, ac(), xi);
  CHECK(cone_stability_form(st, ac(), xi2) == doctest::Approx(4 * q).epsilon(1e-12));
  Field3 bad = xi;
  bad.at(3, 3, 1) = 0.1;
  CHECK_THROWS_AS(cone_stability_form(st, ac(), bad), PreconditionError);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Field3 x = random_test_field(g, seed, true);
    CHECK(cone_stability_form(st, ac(), x) >= -1e-8 * discrete_norm2(x));
  }
}
