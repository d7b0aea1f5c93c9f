#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "saddle/layer.hpp"
#include "saddle/maximal.hpp"
#include "saddle/saddle.hpp"
#include "saddle/stability.hpp"

using namespace saddle;

namespace {

const Nonlinearity& ac() {
  static const Nonlinearity n = make_nonlinearity(NonlinearityKind::allen_cahn);
  return n;
}

double bump_xi(double y, double z, double l) { return std::exp(-0.5 * ((y - 3) * (y - 3) + z * z) - 0.5 * l * l); }
double bump_v(double, double z) { return std::tanh(z); }

Field3 sample_st(const GridSpec3& g, bool zero_outer) {
  Field3 f(g, 0.0);
  for (int k = 0; k < g.nl(); ++k)
    for (int j = 0; j < g.nt(); ++j)
      for (int i = 0; i < g.ns(); ++i) {
        if (zero_outer && (i == g.ns() - 1 || j == g.nt() - 1 || k == g.nl() - 1)) continue;
        const double y = (g.s(i) + g.t(j)) / std::sqrt(2.0), z = (g.s(i) - g.t(j)) / std::sqrt(2.0);
        f.at(i, j, k) = bump_xi(y, z, g.lambda(k));
      }
  return f;
}

Field3 potential_field(const GridSpec3& g) {
  Field3 v(g, 0.0);
  for (int j = 0; j < g.nt(); ++j)
    for (int i = 0; i < g.ns(); ++i) v.at(i, j, 0) = bump_v(0, (g.s(i) - g.t(j)) / std::sqrt(2.0));
  return v;
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = a * std::pow(b / a, double(i) / (n - 1));
  return r;
}

}  // namespace

TEST_CASE("quadratic form basics") {
  const GridSpec3 g = make_grid3(2, 6, 4, 0.5);
  const Field3 v = potential_field(g);
  CHECK(quadratic_form(v, Field3(g, 0.0), ac()) == 0.0);
  const Field3 xi = random_test_field(g, 3, false);
  Field3 xi3 = xi;
  for (double& x : xi3.values) x *= 3;
  CHECK(quadratic_form(v, xi3, ac()) == doctest::Approx(9 * quadratic_form(v, xi, ac())).epsilon(1e-12));
  const Field3 one(g, 1.0);
  for (std::uint64_t s = 0; s < 10; ++s) CHECK(quadratic_form(one, random_test_field(g, s, false), ac()) >= 0.0);
  Field3 bad = xi;
  bad.at(g.ns() - 1, 2, 1) = 1;
  CHECK_THROWS_AS(quadratic_form(v, bad, ac()), PreconditionError);
}

TEST_CASE("quadratic form agrees across coordinates") {
  YZFormInput in;
  in.m = 2;
  in.xi = bump_xi;
  in.potential = [](double y, double z) { return ac().f_prime(bump_v(y, z)); };
  in.y_max = 12;
  in.lambda_max = 8;
  const double ref = quadratic_form_yz(in);
  in.cells_y *= 2, in.cells_tau *= 2, in.cells_lambda *= 2;
  CHECK(quadratic_form_yz(in) == doctest::Approx(ref).epsilon(1e-7));

  double err_prev = 0;
  for (double h : {0.5, 0.25, 0.125}) {
    const GridSpec3 g = make_grid3(2, 10, 8, h);
    const double q = quadratic_form(potential_field(g), sample_st(g, true), ac());
    const double err = std::abs(q - ref);
    MESSAGE("h=" << h << " Q=" << q << " ref=" << ref << " err=" << err);
    if (err_prev > 0) CHECK(err_prev / err > 3.0);
    err_prev = err;
  }
  CHECK(err_prev <= 3e-3 * std::abs(ref));
}

TEST_CASE("comparison monotonicity") {
  const GridSpec3 g = make_grid3(1, 6, 4, 0.5);
  const Field3 v = potential_field(g);
  std::vector<Field3> xs;
  for (std::uint64_t s = 0; s < 5; ++s) xs.push_back(random_test_field(g, s, false));
  const auto same = comparison_monotonicity(v, v, ac(), xs);
  CHECK(same.holds);
  CHECK(same.worst_excess == 0.0);
  Field3 one(g, 1.0);
  Field3 half = v;
  for (double& x : half.values) x *= 0.5;
  const auto r1 = comparison_monotonicity(v, one, ac(), xs);
  const auto r2 = comparison_monotonicity(half, v, ac(), xs);
  CHECK(r1.holds);
  CHECK(r2.holds);
  for (std::size_t q = 0; q < xs.size(); ++q) CHECK(r1.q_w[q] >= r2.q_w[q]);
  CHECK_THROWS_AS(comparison_monotonicity(one, v, ac(), xs), PreconditionError);
}

TEST_CASE("eta2 and specs") {
  CHECK(eta2(0, 5) == 1.0);
  CHECK(eta2(5, 5) == 1.0);
  CHECK(eta2(5.25, 5) == doctest::Approx(0.75));
  CHECK(eta2(6, 5) == 0.0);
  double lip = 0;
  for (int q = 0; q < 1000; ++q) lip = std::max(lip, std::abs(eta2((q + 1) * 0.01, 5) - eta2(q * 0.01, 5)) / 0.01);
  CHECK(lip <= 1 + 1e-9);
  const TestFunctionSpec s = sin_bump_spec(2, 3, 1, 4);
  CHECK(s.phi(1.0) == 0.0);
  CHECK(s.phi(2.5) == doctest::Approx(1.0));
  CHECK(s.phi(4.5) == 0.0);
  const TestFunctionSpec h = hardy_spec(2, 2, 3, 1, 9);
  CHECK(h.phi(0.5) == 0.0);
  CHECK(h.phi(3.0) > 0.0);
  CHECK_THROWS_AS(sin_bump_spec(2, 3, 4, 1).validate(), PreconditionError);
}

TEST_CASE("test function from the maximal state") {
  const GridSpec3 g = make_grid3(2, 12, 10, 0.5);
  const LayerProfile lay = solve_layer(ac(), layer_grid_for(g), 1e-10);
  MonotoneOptions o;
  o.tol = 1e-9;
  const MaximalState ms = monotone_iterate(ac(), g, barrier(lay, choose_K(lay, 2.0)), o);
  const TestFunctionSpec spec = sin_bump_spec(2, 5, 0.5, 4);
  const Field3 xi = build_test_function(ms.v, spec);
  for (int k = 0; k < g.nl(); ++k)
    for (int j = 0; j < g.nt(); ++j)
      for (int i = 0; i < g.ns(); ++i) {
        const double y = (g.s(i) + g.t(j)) / std::sqrt(2.0);
        const double x = xi.at(i, j, k);
        if (g.lambda(k) >= 6 || y >= 8) CHECK(x == 0.0);
        CHECK(x >= 0.0);
        CHECK(x == xi.at(j, i, k));
      }
  CHECK_THROWS_AS(build_test_function(ms.v, sin_bump_spec(4, 5, 0.5, 4)), DomainError);
  CHECK_THROWS_AS(build_test_function(ms.v, sin_bump_spec(2, 9.5, 0.5, 4)), DomainError);

  SearchOptions so;
  so.windows = {{0.25, 2}};
  so.threads = 2;
  const auto narrow = instability_search(ms.v, ac(), {2, 3}, {4, 8}, so);
  CHECK(narrow.rows.size() == 8);
  CHECK(narrow.rows.front().phi_id == "hardy");
  so.windows.push_back({0.25, 2.5});
  const auto wide = instability_search(ms.v, ac(), {2, 3}, {4, 8}, so);
  CHECK(wide.q / wide.norm2 <= narrow.q / narrow.norm2);
  so.threads = 1;
  const auto serial = instability_search(ms.v, ac(), {2, 3}, {4, 8}, so);
  CHECK(serial.q == wide.q);
  std::ostringstream os;
  write_stability_csv(os, wide);
  CHECK(os.str().rfind("a,N,phi_id,rho1,rho2,Q,Q_scaled,norm2\n", 0) == 0);

  const GridSpec3 g1 = make_grid3(1, 6, 4, 0.5);
  CHECK_THROWS_AS(instability_search(Field3(g1, 0.0), ac(), {1}, {1}, so), PreconditionError);
}

TEST_CASE("hardy integral") {
  const auto rho = logspace(1, 100, 4001);
  std::vector<double> sinb(rho.size()), opt(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    sinb[i] = std::sin(M_PI * (rho[i] - 1) / 99);
    opt[i] = std::sin(M_PI * std::log(rho[i]) / std::log(100.0)) / std::sqrt(rho[i]);
  }
  sinb.back() = opt.back() = 0;
  // m=1: the integral of phi'^2
  CHECK(hardy_integral(1, rho, sinb) == doctest::Approx(M_PI * M_PI / (2 * 99)).epsilon(1e-4));
  // m=2: the optimal shape on [1,100] has quotient 1/4 + (pi/ln 100)^2 < 2
  const double c = M_PI / std::log(100.0);
  double w = 0;
  for (std::size_t i = 1; i < rho.size(); ++i)
    w += 0.5 * (opt[i] * opt[i] + opt[i - 1] * opt[i - 1]) * (rho[i] - rho[i - 1]);
  CHECK(hardy_integral(2, rho, opt) == doctest::Approx((0.25 + c * c - 2) * w).epsilon(1e-3));
  CHECK(hardy_integral(2, rho, opt) < 0);
  // the optimal profile changes sign of the integrand balance at 2(m-1) = 2
  for (int m : {4}) {
    for (double b : {2.0, 10.0, 100.0}) {
      const auto r = logspace(1, b, 2001);
      std::vector<double> p(r.size());
      for (std::size_t i = 0; i < r.size(); ++i) p[i] = std::sin(M_PI * std::log(r[i]) / std::log(b)) / std::pow(r[i], 2.5);
      p.back() = 0;
      CHECK(hardy_integral(m, r, p) >= -1e-8);
      for (std::size_t i = 0; i < r.size(); ++i) p[i] = std::sin(M_PI * (r[i] - 1) / (b - 1));
      p.back() = 0;
      CHECK(hardy_integral(m, r, p) >= -1e-8);
    }
  }
  std::vector<double> r0 = {0, 1, 2}, p0 = {0, 1, 0};
  CHECK_THROWS_AS(hardy_integral(2, r0, p0), PreconditionError);
}

TEST_CASE("hardy rayleigh minimum") {
  auto exact = [](int m, double a, double b) {
    const double c = M_PI / std::log(b / a);
    return (2 * m - 3) * (2 * m - 3) / 4.0 + c * c;
  };
  CHECK(hardy_rayleigh_min(2, 1e-3, 1e3, 4000) == doctest::Approx(exact(2, 1e-3, 1e3)).epsilon(1e-4));
  CHECK(hardy_rayleigh_min(4, 1e-3, 1e3, 4000) == doctest::Approx(exact(4, 1e-3, 1e3)).epsilon(1e-4));
  CHECK(hardy_rayleigh_min(3, 1, 100, 2000) == doctest::Approx(exact(3, 1, 100)).epsilon(1e-4));
  double prev = 0;
  for (double b : {1e4, 1e3, 1e2, 10.0}) {
    const double v = hardy_rayleigh_min(2, 1, b, 2000);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(hardy_rayleigh_min(2, 0, 1, 100), PreconditionError);
}

TEST_CASE("dimension criterion") {
  CHECK(dimension_criterion(4) == DimensionVerdict::negative_direction_exists);
  CHECK(dimension_criterion(6) == DimensionVerdict::negative_direction_exists);
  CHECK(dimension_criterion(8) == DimensionVerdict::hardy_nonnegative);
  CHECK(dimension_criterion(2) == DimensionVerdict::hardy_nonnegative);
  for (int n : {4, 6, 8, 10}) {
    const int m = n / 2;
    const bool neg = hardy_rayleigh_min(m, 1e-4, 1e4, 3000) - 2 * (m - 1) < 0;
    CHECK(neg == (dimension_criterion(n) == DimensionVerdict::negative_direction_exists));
  }
  CHECK_THROWS_AS(dimension_criterion(5), PreconditionError);
  CHECK(to_string(DimensionVerdict::hardy_nonnegative) == "hardy_nonnegative");
}
