#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "saddle/model.hpp"

using namespace saddle;

TEST_CASE("st_coordinates") {
  auto [s, t] = st_coordinates({3, 4, 0, 0});
  CHECK(s == doctest::Approx(5));
  CHECK(t == doctest::Approx(0));

  auto [s1, t1] = st_coordinates({-2.5, -2.5});
  CHECK(s1 == doctest::Approx(2.5));
  CHECK(t1 == doctest::Approx(2.5));
  CHECK(cone_distance(s1, t1) == doctest::Approx(0));

  auto [s2, t2] = st_coordinates({1, 0, 0, 1});
  CHECK(s2 == doctest::Approx(1));
  CHECK(t2 == doctest::Approx(1));

  CHECK_THROWS_AS(st_coordinates({1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(st_coordinates({}), DimensionError);
}

TEST_CASE("yz_coordinates") {
  auto [y, z] = yz_coordinates(3, 1);
  CHECK(y == doctest::Approx(2 * std::sqrt(2.0)));
  CHECK(z == doctest::Approx(std::sqrt(2.0)));

  auto [y2, z2] = yz_coordinates(1, 3);
  CHECK(y2 == doctest::Approx(y));
  CHECK(z2 == doctest::Approx(-z));

  CHECK(yz_coordinates(4.2, 4.2).second == 0.0);
  CHECK_THROWS_AS(yz_coordinates(-1, 2), DomainError);
}

TEST_CASE("cone_distance agrees with |z| and transforms invert") {
  CHECK(cone_distance(3, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(cone_distance(7, 7) == 0.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0, 50);
  for (int n = 0; n < 100; ++n) {
    double s = U(rng), t = U(rng);
    auto [y, z] = yz_coordinates(s, t);
    CHECK(std::abs(z) <= y + 1e-14);
    CHECK(cone_distance(s, t) == doctest::Approx(std::abs(z)).epsilon(1e-14));
    auto [s2, t2] = st_from_yz(y, z);
    CHECK(std::abs(s2 - s) <= 1e-12 * (1 + s));
    CHECK(std::abs(t2 - t) <= 1e-12 * (1 + t));
  }
  CHECK_THROWS_AS(cone_distance(1, -1), DomainError);
}

TEST_CASE("built-in nonlinearities") {
  auto ac = make_nonlinearity(NonlinearityKind::allen_cahn);
  CHECK(ac.f(0.5) == doctest::Approx(0.375));
  CHECK(ac.G(0) == doctest::Approx(0.25));
  CHECK(ac.fp1() == doctest::Approx(-2));

  auto pn = make_nonlinearity(NonlinearityKind::peierls_nabarro);
  CHECK(pn.f(0.5) == doctest::Approx(1));
  CHECK(std::abs(pn.G(1)) < 1e-15);
  CHECK(pn.fp1() == doctest::Approx(-M_PI));

  for (const auto* nl : {&ac, &pn}) {
    CHECK(nl->odd.value);
    CHECK(nl->G_double_well.value);
    CHECK(nl->f_prime_decreasing.value);
    CHECK(nl->consistent.value);
    CHECK(std::abs(nl->f(0)) < 1e-15);
    CHECK(std::abs(nl->f(1)) < 1e-15);
    CHECK(std::abs(nl->f(-1)) < 1e-15);
    // f(r)/r non-increasing on (0,1)
    double prev = 1e300;
    for (int i = 1; i < 1000; ++i) {
      double r = i / 1000.0, q = nl->f(r) / r;
      CHECK(q <= prev + 1e-12);
      prev = q;
    }
  }
  CHECK(ac.sup_abs_f_prime == doctest::Approx(2.0));
  CHECK(pn.sup_abs_f_prime == doctest::Approx(M_PI));
}

TEST_CASE("custom nonlinearity validation") {
  CustomFunctions good{[](double u) { return u - u * u * u; }, [](double u) { return 1 - 3 * u * u; },
                       [](double u) { return 0.25 * (1 - u * u) * (1 - u * u); }};
  auto nl = make_nonlinearity(NonlinearityKind::custom, good);
  CHECK(nl.odd.value);

  CustomFunctions bad = good;
  bad.G = [](double u) { return 0.5 * (1 - u * u) * (1 - u * u); };
  CHECK_THROWS_AS(make_nonlinearity(NonlinearityKind::custom, bad), ValidationError);

  CustomFunctions even{[](double u) { return 1 - u * u; }, [](double u) { return -2 * u; },
                       [](double u) { return -u + u * u * u / 3; }};
  auto e = make_nonlinearity(NonlinearityKind::custom, even);
  CHECK_FALSE(e.odd.value);
  CHECK_FALSE(e.G_double_well.value);

  CHECK_THROWS_AS(make_nonlinearity(NonlinearityKind::custom, {}), PreconditionError);
  CHECK_THROWS_AS(make_nonlinearity("cubic"), ValidationError);
}

TEST_CASE("grid specs") {
  GridSpec3 g{2, 10, 10, 5, 0.5, 0.5, 0.25};
  g.validate();
  CHECK(g.ns() == 21);
  CHECK(g.nl() == 21);
  CHECK(g.size() == 21u * 21u * 21u);

  GridSpec3 bad = g;
  bad.h_lambda = 0.3;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = g;
  bad.h_t = 0.25;
  bad.t_max = 10;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  auto r = make_grid3(1, 20, std::pow(20.0, 0.75), 0.5);
  CHECK(r.ns() == 41);
  CHECK(r.lambda_max == doctest::Approx(std::pow(20.0, 0.75)));
  CHECK((r.nl() - 1) % 4 == 0);

  GridSpec2 g2{20, 40, 0.05, 0.05};
  CHECK(g2.nx() == 401);
  CHECK(g2.nl() == 801);
  Field3 f(g, 1.0);
  CHECK(f.values.size() == g.size());
  CHECK(f.finite());
  f.at(1, 2, 3) = NAN;
  CHECK_FALSE(f.finite());
}
