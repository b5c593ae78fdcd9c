#pragma once

// Elliptic curves over Q in long Weierstrass form, coordinate changes,
// quadratic twists, point arithmetic and division polynomials.

#include <isoloc/qpoly.hpp>

#include <array>

namespace isoloc {

struct Point {
  bool inf = true;
  Rational x{0}, y{0};

  Point() = default;
  Point(Rational px, Rational py) : inf(false), x(std::move(px)), y(std::move(py)) {}
  static Point infinity() { return Point(); }
  bool operator==(const Point& o) const {
    if (inf || o.inf) return inf == o.inf;
    return x == o.x && y == o.y;
  }
};

class Curve {
 public:
  explicit Curve(std::array<Rational, 5> a) : a_(std::move(a)) {
    b2_ = a1() * a1() + 4 * a2();
    b4_ = 2 * a4() + a1() * a3();
    b6_ = a3() * a3() + 4 * a6();
    b8_ = a1() * a1() * a6() + 4 * a2() * a6() - a1() * a3() * a4() + a2() * a3() * a3() -
          a4() * a4();
    c4_ = b2_ * b2_ - 24 * b4_;
    c6_ = -b2_ * b2_ * b2_ + 36 * b2_ * b4_ - 216 * b6_;
    disc_ = -b2_ * b2_ * b8_ - 8 * b4_ * b4_ * b4_ - 27 * b6_ * b6_ + 9 * b2_ * b4_ * b6_;
    if (disc_ == 0) throw std::invalid_argument("singular Weierstrass equation: " + to_string());
    j_ = c4_ * c4_ * c4_ / disc_;
  }
  Curve(Rational a1, Rational a2, Rational a3, Rational a4, Rational a6)
      : Curve(std::array<Rational, 5>{std::move(a1), std::move(a2), std::move(a3), std::move(a4),
                                      std::move(a6)}) {}

  const Rational& a1() const { return a_[0]; }
  const Rational& a2() const { return a_[1]; }
  const Rational& a3() const { return a_[2]; }
  const Rational& a4() const { return a_[3]; }
  const Rational& a6() const { return a_[4]; }
  const std::array<Rational, 5>& ainvs() const { return a_; }
  const Rational& b2() const { return b2_; }
  const Rational& b4() const { return b4_; }
  const Rational& b6() const { return b6_; }
  const Rational& b8() const { return b8_; }
  const Rational& c4() const { return c4_; }
  const Rational& c6() const { return c6_; }
  const Rational& disc() const { return disc_; }
  const Rational& j() const { return j_; }

  bool operator==(const Curve& o) const { return a_ == o.a_; }

  bool is_integral() const {
    for (auto& c : a_)
      if (den(c) != 1) return false;
    return true;
  }

  // F(x) = 4x^3 + b2 x^2 + 2 b4 x + b6 = (2y + a1 x + a3)^2 on the curve.
  Poly fpoly() const {
    return Poly({b6_, 2 * b4_, b2_, Rational(4)});
  }

  bool contains(const Point& p) const {
    if (p.inf) return true;
    Rational lhs = p.y * p.y + a1() * p.x * p.y + a3() * p.y;
    Rational rhs = p.x * p.x * p.x + a2() * p.x * p.x + a4() * p.x + a6();
    return lhs == rhs;
  }

  Point negate(const Point& p) const {
    if (p.inf) return p;
    return Point(p.x, -p.y - a1() * p.x - a3());
  }

  Point add(const Point& p, const Point& q) const {
    if (p.inf) return q;
    if (q.inf) return p;
    if (p.x == q.x) {
      if (q.y == -p.y - a1() * p.x - a3()) return Point::infinity();
    }
    Rational lam;
    if (p.x == q.x)
      lam = (3 * p.x * p.x + 2 * a2() * p.x + a4() - a1() * p.y) / (2 * p.y + a1() * p.x + a3());
    else
      lam = (q.y - p.y) / (q.x - p.x);
    Rational nu = p.y - lam * p.x;
    Rational x3 = lam * lam + a1() * lam - a2() - p.x - q.x;
    Rational y3 = -(lam + a1()) * x3 - nu - a3();
    return Point(x3, y3);
  }

  Point mul(Int n, const Point& p) const {
    Point base = p;
    if (n < 0) {
      base = negate(base);
      n = -n;
    }
    Point acc = Point::infinity();
    while (n > 0) {
      if (mpz_odd_p(n.get_mpz_t())) acc = add(acc, base);
      base = add(base, base);
      n >>= 1;
    }
    return acc;
  }

  std::string to_string() const {
    std::string s = "[";
    for (size_t i = 0; i < 5; ++i) {
      if (i) s += ",";
      s += a_[i].get_str();
    }
    return s + "]";
  }

 private:
  std::array<Rational, 5> a_;
  Rational b2_, b4_, b6_, b8_, c4_, c6_, disc_, j_;
};

// Coordinate change x = u^2 x' + r, y = u^3 y' + s u^2 x' + t taking a model
// to a new one. Composition order: `first.then(second)` changes coordinates
// by `first` and then by `second`.
struct ModelMap {
  Rational u{1}, r{0}, s{0}, t{0};

  ModelMap() = default;
  ModelMap(Rational mu, Rational mr, Rational ms, Rational mt)
      : u(std::move(mu)), r(std::move(mr)), s(std::move(ms)), t(std::move(mt)) {
    if (u == 0) throw std::invalid_argument("coordinate change with u = 0");
  }

  bool is_identity() const { return u == 1 && r == 0 && s == 0 && t == 0; }

  ModelMap then(const ModelMap& m2) const {
    return ModelMap(u * m2.u, u * u * m2.r + r, u * m2.s + s,
                    u * u * u * m2.t + s * u * u * m2.r + t);
  }

  ModelMap inverse() const {
    Rational u2 = u * u;
    return ModelMap(1 / u, -r / u2, -s / u, (r * s - t) / (u2 * u));
  }

  // Coordinates of a new-model point in the old model.
  Point to_old(const Point& p) const {
    if (p.inf) return p;
    Rational x = u * u * p.x + r;
    Rational y = u * u * u * p.y + s * u * u * p.x + t;
    return Point(x, y);
  }
  Point to_new(const Point& p) const { return inverse().to_old(p); }

  bool operator==(const ModelMap& o) const {
    return u == o.u && r == o.r && s == o.s && t == o.t;
  }
};

inline Curve transformed(const Curve& e, const ModelMap& m) {
  const Rational &u = m.u, &r = m.r, &s = m.s, &t = m.t;
  Rational u2 = u * u, u3 = u2 * u;
  Rational a1 = (e.a1() + 2 * s) / u;
  Rational a2 = (e.a2() - s * e.a1() + 3 * r - s * s) / u2;
  Rational a3 = (e.a3() + r * e.a1() + 2 * t) / u3;
  Rational a4 =
      (e.a4() - s * e.a3() + 2 * r * e.a2() - (t + r * s) * e.a1() + 3 * r * r - 2 * s * t) /
      (u2 * u2);
  Rational a6 = (e.a6() + r * e.a4() + r * r * e.a2() + r * r * r - t * e.a3() - t * t -
                 r * t * e.a1()) /
                (u3 * u3);
  return Curve(a1, a2, a3, a4, a6);
}

// The isomorphism from -> to as a coordinate change, if one exists over Q.
inline std::optional<ModelMap> find_isomorphism(const Curve& from, const Curve& to) {
  if (from.j() != to.j()) return std::nullopt;
  std::optional<Rational> u2;
  if (from.c4() != 0 && from.c6() != 0) {
    if (to.c4() == 0 || to.c6() == 0) return std::nullopt;
    u2 = (from.c6() * to.c4()) / (to.c6() * from.c4());
  } else if (from.c4() == 0) {
    if (to.c4() != 0 || to.c6() == 0) return std::nullopt;
    u2 = is_nth_power(from.c6() / to.c6(), 3);
  } else {
    if (to.c6() != 0 || to.c4() == 0) return std::nullopt;
    u2 = is_nth_power(from.c4() / to.c4(), 2);
  }
  if (!u2 || *u2 <= 0) return std::nullopt;
  auto u0 = is_nth_power(*u2, 2);
  if (!u0) return std::nullopt;
  Rational up = *u0, un = -up;
  for (const Rational& u : {up, un}) {
    Rational s = (u * to.a1() - from.a1()) / 2;
    Rational r = (u * u * to.a2() - from.a2() + s * from.a1() + s * s) / 3;
    Rational t = (u * u * u * to.a3() - from.a3() - r * from.a1()) / 2;
    ModelMap m(u, r, s, t);
    if (transformed(from, m) == to) return m;
  }
  return std::nullopt;
}

// Quadratic twist by d, on the fixed short model y^2 = x^3 - 27 c4 x - 54 c6.
// twist by 1 is Q-isomorphic to the input (u = 6 change on the y^2 model).
inline Curve quadratic_twist(const Curve& e, const Rational& d) {
  if (d == 0) throw std::invalid_argument("quadratic twist by zero");
  return Curve(Rational(0), Rational(0), Rational(0), -27 * e.c4() * d * d,
               -54 * e.c6() * d * d * d);
}

// ---- division polynomials ----------------------------------------------------

// x-parts P_n of the division polynomials: psi_n = P_n for n odd and
// psi_n = P_n * (2y + a1 x + a3) for n even. Returns P_0..P_n.
inline std::vector<Poly> division_polynomials_x(const Curve& e, long n) {
  if (n < 0) throw std::invalid_argument("division polynomial index must be >= 0");
  const Rational &b2 = e.b2(), &b4 = e.b4(), &b6 = e.b6(), &b8 = e.b8();
  Poly F = e.fpoly();
  Poly F2 = F * F;
  std::vector<Poly> P;
  P.reserve(static_cast<size_t>(n) + 1);
  P.push_back(Poly());               // P_0
  P.push_back(Poly(Rational(1)));    // P_1
  P.push_back(Poly(Rational(1)));    // P_2
  P.push_back(Poly({b8, 3 * b6, 3 * b4, b2, Rational(3)}));  // P_3
  P.push_back(Poly({b4 * b8 - b6 * b6, b2 * b8 - b4 * b6, 10 * b8, 10 * b6, 5 * b4, b2,
                    Rational(2)}));  // P_4
  for (long i = 5; i <= n; ++i) {
    if (i % 2 == 1) {
      long m = (i - 1) / 2;
      const Poly &Pm2 = P[m + 2], &Pm = P[m], &Pm1 = P[m - 1], &Pp1 = P[m + 1];
      Poly lhs = Pm2 * Pm * Pm * Pm;
      Poly rhs = Pm1 * Pp1 * Pp1 * Pp1;
      P.push_back(m % 2 == 0 ? lhs * F2 - rhs : lhs - rhs * F2);
    } else {
      long m = i / 2;
      P.push_back(P[m] * (P[m + 2] * P[m - 1] * P[m - 1] - P[m - 2] * P[m + 1] * P[m + 1]));
    }
  }
  P.resize(static_cast<size_t>(n) + 1);
  return P;
}

inline Poly division_polynomial_x(const Curve& e, long n) {
  return division_polynomials_x(e, n).back();
}

// x-coordinate of multiplication by n as a reduced fraction (num, den) with
// monic denominator. deg num = n^2, deg den = n^2 - 1.
inline std::pair<Poly, Poly> multiplication_x_map(const Curve& e, long n) {
  if (n == 0) throw std::invalid_argument("multiplication by zero has no x-map");
  if (n < 0) n = -n;  // x(-P) = x(P)
  if (n == 1) return {Poly::x(), Poly(Rational(1))};
  auto P = division_polynomials_x(e, n + 1);
  Poly F = e.fpoly();
  Poly num, den;
  if (n % 2 == 1) {
    num = Poly::x() * (P[n] * P[n]) - F * (P[n - 1] * P[n + 1]);
    den = P[n] * P[n];
  } else {
    num = Poly::x() * (F * (P[n] * P[n])) - P[n - 1] * P[n + 1];
    den = F * (P[n] * P[n]);
  }
  Poly g = gcd(num, den);
  if (g.degree() > 0) {
    num = num / g;
    den = den / g;
  }
  Rational lead = den.lc();
  return {(1 / lead) * num, (1 / lead) * den};
}

}  // namespace isoloc
