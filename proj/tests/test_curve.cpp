#include <isoloc/curve.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace isoloc;

static Curve C(long a1, long a2, long a3, long a4, long a6) {
  return Curve(Rational(a1), Rational(a2), Rational(a3), Rational(a4), Rational(a6));
}

// y^2 + y = x^3 - x^2 - 10x - 20, the classic conductor-11 optimal curve
static const Curve e11 = C(0, -1, 1, -10, -20);

TEST_CASE("invariants") {
  CHECK(e11.b2() == -4);
  CHECK(e11.b4() == -20);
  CHECK(e11.b6() == -79);
  CHECK(e11.b8() == -21);
  CHECK(e11.c4() == 496);
  CHECK(e11.c6() == 20008);
  CHECK(e11.disc() == -161051);  // -11^5
  CHECK(e11.j() == Rational(-122023936, 161051));
  CHECK_THROWS(C(0, 0, 0, 0, 0));

  // c4^3 - c6^2 = 1728 disc, also for non-integral models
  std::vector<Curve> samples = {
      e11, C(1, 2, 3, 4, 5), C(0, 0, 0, -1, 0),
      Curve(Rational(1, 2), Rational(-2, 3), Rational(5), Rational(0), Rational(7, 4))};
  for (auto& e : samples) {
    CHECK(e.c4() * e.c4() * e.c4() - e.c6() * e.c6() == 1728 * e.disc());
    CHECK(e.fpoly().eval(Rational(0)) == e.b6());
  }
  CHECK(!samples[3].is_integral());
  CHECK(e11.is_integral());
}

TEST_CASE("coordinate changes") {
  std::vector<ModelMap> maps = {
      ModelMap(Rational(2), Rational(3), Rational(-1), Rational(5)),
      ModelMap(Rational(1, 3), Rational(-1, 2), Rational(2), Rational(0)),
      ModelMap(Rational(-1), Rational(0), Rational(0), Rational(1)),
      ModelMap(Rational(5, 7), Rational(1, 4), Rational(-2, 3), Rational(7, 2))};
  for (auto& m : maps) {
    Curve t = transformed(e11, m);
    Rational u4 = m.u * m.u * m.u * m.u;
    CHECK(t.c4() == e11.c4() / u4);
    CHECK(t.c6() == e11.c6() / (u4 * m.u * m.u));
    CHECK(t.disc() == e11.disc() / (u4 * u4 * u4));
    CHECK(t.j() == e11.j());
    CHECK(transformed(t, m.inverse()) == e11);
    CHECK(m.then(m.inverse()).is_identity());
  }
  // composition order
  Curve via_two = transformed(transformed(e11, maps[0]), maps[1]);
  Curve via_one = transformed(e11, maps[0].then(maps[1]));
  CHECK(via_two == via_one);

  // point transport follows the same change of coordinates
  Point p(Rational(5), Rational(5));
  REQUIRE(e11.contains(p));
  for (auto& m : maps) {
    Curve t = transformed(e11, m);
    Point q = m.to_new(p);
    CHECK(t.contains(q));
    CHECK(m.to_old(q) == p);
  }
}

TEST_CASE("point arithmetic") {
  Point p(Rational(5), Rational(5));
  REQUIRE(e11.contains(p));
  Point o = Point::infinity();
  CHECK(e11.add(p, o) == p);
  CHECK(e11.add(p, e11.negate(p)) == o);
  Point p2 = e11.add(p, p);
  CHECK(e11.contains(p2));
  CHECK(p2 == Point(Rational(16), Rational(-61)));
  // p generates the rational 5-torsion
  CHECK(e11.mul(5, p).inf);
  CHECK(!e11.mul(3, p).inf);
  CHECK(e11.mul(-2, p) == e11.negate(p2));
  CHECK(e11.add(e11.add(p, p2), p2) == e11.add(p, e11.add(p2, p2)));

  // (0,0) has order 5 on the Kubert family, including rational parameters
  for (Rational b : {Rational(2), Rational(3), Rational(-1, 2), Rational(7, 5)}) {
    Curve e(Rational(1) - b, -b, -b, Rational(0), Rational(0));
    Point g(Rational(0), Rational(0));
    REQUIRE(e.contains(g));
    CHECK(e.mul(5, g).inf);
    CHECK(!e.mul(2, g).inf);
    CHECK(e.mul(2, g).x == b);  // x(2P) = b pins the parametrization
  }
}

TEST_CASE("division polynomial shapes") {
  Curve e = C(1, -1, 1, -3, 3);
  auto P = division_polynomials_x(e, 9);
  for (long n = 1; n <= 9; ++n) {
    const Poly& pn = P[static_cast<size_t>(n)];
    if (n % 2 == 1) {
      CHECK(pn.degree() == (n * n - 1) / 2);
      CHECK(pn.lc() == n);
    } else {
      CHECK(pn.degree() == (n * n - 4) / 2);
      CHECK(2 * pn.lc() == n);
    }
  }
  // roots of P_2 would be the 2-torsion x-coordinates; here F plays that role
  CHECK(P[2] == Poly(Rational(1)));
  CHECK(P[3] == Poly({e.b8(), 3 * e.b6(), 3 * e.b4(), e.b2(), Rational(3)}));
}

TEST_CASE("multiplication x-maps match point arithmetic") {
  Point p(Rational(5), Rational(5));
  for (long n = 2; n <= 6; ++n) {
    auto [nu, de] = multiplication_x_map(e11, n);
    CHECK(nu.degree() == n * n);
    CHECK(de.degree() == n * n - 1);
    CHECK(de.is_monic());
    CHECK(gcd(nu, de).degree() == 0);
    Point q = e11.mul(n, p);
    if (!q.inf) {
      Rational denv = de.eval(p.x);
      REQUIRE(denv != 0);
      CHECK(nu.eval(p.x) / denv == q.x);
    } else {
      CHECK(de.eval(p.x) == 0);
    }
  }
}

TEST_CASE("isomorphism search") {
  std::vector<ModelMap> maps = {
      ModelMap(Rational(1), Rational(2), Rational(-3), Rational(4)),
      ModelMap(Rational(2, 3), Rational(-1), Rational(1, 2), Rational(0)),
      ModelMap(Rational(-5), Rational(0), Rational(0), Rational(0))};
  for (auto& m : maps) {
    Curve t = transformed(e11, m);
    auto found = find_isomorphism(e11, t);
    REQUIRE(found.has_value());
    CHECK(transformed(e11, *found) == t);
    auto back = find_isomorphism(t, e11);
    REQUIRE(back.has_value());
    CHECK(transformed(t, *back) == e11);
  }
  // twists share j but are not Q-isomorphic
  Curve tw = quadratic_twist(e11, Rational(5));
  CHECK(tw.j() == e11.j());
  CHECK(!find_isomorphism(e11, tw).has_value());
  // different j: nothing to find
  CHECK(!find_isomorphism(e11, C(0, 0, 0, -1, 0)).has_value());

  // j = 0 and j = 1728 models still resolve u up to sign
  Curve j0 = C(0, 0, 0, 0, 1);
  Curve j0b = transformed(j0, ModelMap(Rational(1, 2), Rational(1), Rational(0), Rational(3)));
  REQUIRE(find_isomorphism(j0, j0b).has_value());
  CHECK(transformed(j0, *find_isomorphism(j0, j0b)) == j0b);
  Curve j1728 = C(0, 0, 0, 1, 0);
  Curve j1728b = transformed(j1728, ModelMap(Rational(3), Rational(-2), Rational(1), Rational(0)));
  REQUIRE(find_isomorphism(j1728, j1728b).has_value());
  // sextic twist of j=0 is not isomorphic over Q
  CHECK(!find_isomorphism(j0, C(0, 0, 0, 0, 2)).has_value());
}

TEST_CASE("quadratic twists") {
  Curve tw1 = quadratic_twist(e11, Rational(1));
  CHECK(find_isomorphism(e11, tw1).has_value());
  Curve tw5 = quadratic_twist(e11, Rational(5));
  Curve tw55 = quadratic_twist(tw5, Rational(5));
  CHECK(find_isomorphism(e11, tw55).has_value());
  // twisting by d and by d*square agree up to isomorphism
  Curve twa = quadratic_twist(e11, Rational(3));
  Curve twb = quadratic_twist(e11, Rational(27));
  CHECK(find_isomorphism(twa, twb).has_value());
  CHECK(twa.j() == e11.j());
}
