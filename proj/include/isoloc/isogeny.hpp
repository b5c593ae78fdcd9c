#pragma once

// Separable isogenies between elliptic curves over Q, tracked through their
// action on x-coordinates. The y-component is determined up to sign by the
// x-map together with the differential scalar, and nothing downstream needs
// it explicitly.

#include <isoloc/curve.hpp>
#include <isoloc/local.hpp>
#include <isoloc/modpoly.hpp>

#include <optional>

namespace isoloc {

struct Isogeny {
  Curve domain;
  Curve codomain;
  long degree;
  Poly kernel;    // monic, vanishing exactly at the x-coordinates of the
                  // nonzero kernel points; Poly(1) when not tracked
  Poly num, den;  // x(phi(P)) = num(x(P)) / den(x(P)), reduced, den monic
  Rational scalar;  // phi^* omega_codomain = scalar * omega_domain
};

namespace detail {

inline void reduce_xmap(Poly& num, Poly& den) {
  Poly g = gcd(num, den);
  if (g.degree() > 0) {
    num = num / g;
    den = den / g;
  }
  Rational lead = den.lc();
  if (lead != 1) {
    num = (Rational(1) / lead) * num;
    den = (Rational(1) / lead) * den;
  }
}

// P(n/d) * d^max(deg P, height), as a polynomial.
inline Poly eval_fraction(const Poly& P, const Poly& n, const Poly& d, long height) {
  long D = std::max(P.degree(), height);
  if (P.is_zero()) return Poly();
  Poly acc(P.coeff(D));
  Poly dpow(Rational(1));
  for (long i = D - 1; i >= 0; --i) {
    dpow = dpow * d;
    acc = acc * n + P.coeff(i) * dpow;
  }
  return acc;
}

}  // namespace detail

// Quotient of e by the finite subgroup whose nonzero points have the roots of
// kernel_poly as x-coordinates. The input must be squarefree; it genuinely has
// to cut out a subgroup stable under negation for the result to be an isogeny
// (callers verify this downstream via the dual composition check). The
// returned map is normalized: it pulls the codomain differential back to the
// domain one, so scalar = 1.
inline Isogeny velu(const Curve& e, const Poly& kernel_poly) {
  Poly g = kernel_poly.monic();
  if (g.degree() < 1)
    return {e, e, 1, Poly(Rational(1)), Poly::x(), Poly(Rational(1)), Rational(1)};
  if (gcd(g, g.derivative()).degree() != 0)
    throw std::invalid_argument("velu: kernel polynomial must be squarefree");

  // Split off 2-torsion x-coordinates: those points are their own negatives,
  // so they enter the coefficient sums with half the weight of a +-pair.
  Poly F = e.fpoly();
  Poly g2 = gcd(g, F);
  Poly g1 = (g2.degree() > 0) ? g / g2 : g;

  Rational T(0), W(0);
  auto accumulate = [&](const Poly& h, const Rational& weight) {
    if (h.degree() < 1) return;
    auto p = h.power_sums(3);
    Rational d(h.degree());
    T += weight * (6 * p[2] + e.b2() * p[1] + d * e.b4());
    W += weight * (10 * p[3] + 2 * e.b2() * p[2] + 3 * e.b4() * p[1] + d * e.b6());
  };
  accumulate(g1, Rational(1));
  accumulate(g2, make_rational(1, 2));

  Curve cod(e.a1(), e.a2(), e.a3(), e.a4() - 5 * T, e.a6() - e.b2() * T - 7 * W);

  // x-map: x + sum over kernel representatives of t_i/(x - x_i) + u_i/(x - x_i)^2
  // with t_i = 6x_i^2 + b2 x_i + b4 (halved at 2-torsion) and u_i = F(x_i).
  // The numerators of the combined partial fractions interpolate t resp. u at
  // the roots, which is what (t g' mod g) computes.
  Poly t({e.b4(), e.b2(), Rational(6)});
  Poly A1 = (g1.degree() > 0) ? (t * g1.derivative()) % g1 : Poly();
  Poly A2 = (g2.degree() > 0) ? ((make_rational(1, 2) * t) * g2.derivative()) % g2 : Poly();
  Poly B = (F * g.derivative()) % g;

  Poly num = Poly::x() * (g * g) + A1 * (g1 * (g2 * g2)) + A2 * ((g1 * g1) * g2) -
             (B.derivative() * g - B * g.derivative());
  Poly den = g * g;
  detail::reduce_xmap(num, den);

  long degree = 1 + 2 * g1.degree() + g2.degree();
  if (num.degree() != degree || den.degree() != degree - 1)
    throw std::logic_error("velu: x-map degree mismatch, kernel not a subgroup?");
  return {e, cod, degree, g, num, den, Rational(1)};
}

// outer after inner. Kernel polynomial of the composite is not tracked.
inline Isogeny compose(const Isogeny& outer, const Isogeny& inner) {
  if (!(outer.domain.ainvs() == inner.codomain.ainvs()))
    throw std::invalid_argument("compose: middle models do not match");
  long h = std::max(outer.num.degree(), outer.den.degree());
  Poly n = detail::eval_fraction(outer.num, inner.num, inner.den, h);
  Poly d = detail::eval_fraction(outer.den, inner.num, inner.den, h);
  detail::reduce_xmap(n, d);
  return {inner.domain, outer.codomain, outer.degree * inner.degree,
          Poly(Rational(1)), n, d, outer.scalar * inner.scalar};
}

// Rewrite phi in new coordinates on each side: the new domain is
// transformed(phi.domain, dom_map) and likewise for the codomain.
inline Isogeny transport(const Isogeny& phi, const ModelMap& dom_map, const ModelMap& cod_map) {
  Curve D = transformed(phi.domain, dom_map);
  Curve C = transformed(phi.codomain, cod_map);
  Rational ud2 = dom_map.u * dom_map.u;
  Poly n = phi.num.compose_linear(ud2, dom_map.r);
  Poly d = phi.den.compose_linear(ud2, dom_map.r);
  Rational uc2 = cod_map.u * cod_map.u;
  n = (Rational(1) / uc2) * (n - cod_map.r * d);
  detail::reduce_xmap(n, d);
  Poly k = phi.kernel;
  if (k.degree() > 0) k = k.compose_linear(ud2, dom_map.r).monic();
  return {D, C, phi.degree, k, n, d, phi.scalar * cod_map.u / dom_map.u};
}

inline bool same_x_map(const Isogeny& phi, const Poly& num, const Poly& den) {
  return phi.num * den == num * phi.den;
}

// Monic polynomials cutting out the rational subgroups of order p. For odd p
// these are the degree-(p-1)/2 rational divisors of the p-division polynomial
// whose root sets are stable under doubling; for p = 2 the rational roots of
// F give the candidate halves.
inline std::vector<Poly> kernel_polynomials(const Curve& e, long p) {
  if (p < 2) throw std::invalid_argument("kernel_polynomials: order must be at least 2");
  std::vector<Poly> out;
  if (p == 2) {
    for (const Rational& x0 : rational_roots(e.fpoly()))
      out.push_back(Poly({-x0, Rational(1)}));
    return out;
  }
  Poly P = division_polynomial_x(e, p);
  long target = (p - 1) / 2;
  auto [n2, d2] = multiplication_x_map(e, 2);
  for (const Poly& g : monic_rational_divisors(P, target)) {
    // stability under doubling: R is g(x(2Q)) with denominators cleared
    Poly R = detail::eval_fraction(g, n2, d2, g.degree());
    if (g.divides(R)) out.push_back(g);
  }
  return out;
}

inline std::vector<Isogeny> isogenies_of_degree(const Curve& e, long p) {
  std::vector<Isogeny> out;
  for (const Poly& k : kernel_polynomials(e, p)) out.push_back(velu(e, k));
  return out;
}

// Degree-p isogeny from `from` onto the exact model `to`, if one exists.
inline std::optional<Isogeny> find_isogeny(const Curve& from, const Curve& to, long p) {
  for (const Poly& k : kernel_polynomials(from, p)) {
    Isogeny phi = velu(from, k);
    if (auto iso = find_isomorphism(phi.codomain, to))
      return transport(phi, ModelMap(), *iso);
  }
  return std::nullopt;
}

// The dual: the isogeny back from the codomain such that the composite is
// multiplication by the degree on x-coordinates. Defined up to sign, which the
// x-map cannot see; the scalar satisfies |scalar * dual.scalar| = degree.
inline Isogeny dual_isogeny(const Isogeny& phi) {
  auto [mn, md] = multiplication_x_map(phi.domain, phi.degree);
  for (const Poly& k : kernel_polynomials(phi.codomain, phi.degree)) {
    Isogeny psi = velu(phi.codomain, k);
    auto iso = find_isomorphism(psi.codomain, phi.domain);
    if (!iso) continue;
    Isogeny cand = transport(psi, ModelMap(), *iso);
    if (!same_x_map(compose(cand, phi), mn, md)) continue;
    Rational prod = phi.scalar * cand.scalar;
    if (prod != phi.degree && prod != -Rational(phi.degree))
      throw std::logic_error("dual_isogeny: scalar product is not the degree");
    return cand;
  }
  throw std::runtime_error("dual_isogeny: no rational dual found");
}

// Same isogeny rewritten between the global minimal models of its two ends.
inline Isogeny minimal_model_isogeny(const Isogeny& phi) {
  auto [md, mm] = global_minimal_model(phi.domain);
  auto [cd, cm] = global_minimal_model(phi.codomain);
  (void)md;
  (void)cd;
  return transport(phi, mm, cm);
}

// True when every nonzero kernel point reduces to the identity at l, i.e. the
// kernel sits inside the formal group of the minimal model: all its
// x-coordinates there have negative valuation.
inline bool kernel_in_formal_group(const Isogeny& phi, const Int& l) {
  if (phi.kernel.degree() < 1)
    throw std::invalid_argument("kernel_in_formal_group: kernel polynomial not tracked");
  auto [M, m] = global_minimal_model(phi.domain);
  (void)M;
  Poly k = phi.kernel.compose_linear(m.u * m.u, m.r).monic();
  return newton_polygon(k.coeffs(), l).all_root_valuations_negative();
}

// y^2 = x^3 + a x^2 + b x with kernel {O, (0,0)}, quotient in the classical
// normalized coordinates. Agrees with velu after the x -> x - a translation.
inline Isogeny two_isogeny(const Rational& a, const Rational& b) {
  Curve dom(Rational(0), a, Rational(0), b, Rational(0));
  Curve cod(Rational(0), -2 * a, Rational(0), a * a - 4 * b, Rational(0));
  return {dom, cod, 2, Poly::x(), Poly({b, a, Rational(1)}), Poly::x(), Rational(1)};
}

// y^2 = x^3 + a (x - b)^2 with the order-3 subgroup at x = 0.
inline Isogeny three_isogeny(const Rational& a, const Rational& b) {
  Curve dom(Rational(0), a, Rational(0), -2 * a * b, a * b * b);
  Curve cod(Rational(0), a, Rational(0), 18 * a * b, a * b * (16 * a - 27 * b));
  Poly num({4 * a * b * b, -4 * a * b, Rational(0), Rational(1)});
  return {dom, cod, 3, Poly::x(), num, Poly::x() * Poly::x(), Rational(1)};
}

}  // namespace isoloc
