#pragma once

#include <utility>
#include <vector>

#include "curve.hpp"
#include "qpoly.hpp"
#include "real.hpp"

namespace isoloc {

// Period lattice of a Weierstrass model, for the differential
// dx/(2y + a1 x + a3). Two shapes occur over R:
//   disc > 0: rectangular, lattice Z*w1 + Z*(i*w2im)
//   disc < 0: rhombic, lattice Z*w1 + Z*(w1 + i*w2im)/2
// where w1 is the least positive real period.
struct Periods {
  Real omega1;
  Real omega2_im;
  bool rectangular;
  Real real_period;     // measure of E(R): 2*w1 with two components, else w1
  Real complex_period;  // twice the measure of E(C) = 4x lattice covolume
};

namespace detail {

inline Real eval_poly(const Poly& p, const Real& x, mpfr_prec_t prec) {
  Real acc(0, prec);
  for (long i = p.degree(); i >= 0; --i) acc = acc * x + Real(p.coeff(i), prec);
  return acc;
}

// Certified approximations of the real roots of a squarefree polynomial,
// ascending, each within 2^-bits of the true root.
inline std::vector<Real> real_roots(const Poly& f, long bits, mpfr_prec_t prec) {
  std::vector<Real> out;
  Rational eps = Rational(1) / Rational(Int(1) << static_cast<unsigned long>(bits));
  for (auto iv : isolate_real_roots(f)) {
    iv = refine_root(f, iv, eps);
    Rational mid = (iv.first + iv.second) / 2;
    out.emplace_back(mid, prec);
  }
  return out;
}

}  // namespace detail

// Periods of the given model to roughly `prec` significant bits. Guard digits
// scale with the coefficient height so that close root clusters stay resolved.
inline Periods periods(const Curve& e, mpfr_prec_t prec) {
  Poly f = e.fpoly();
  long height_bits = 0;
  Poly fz = primitive_integer_part(f);
  for (long i = 0; i <= fz.degree(); ++i) {
    size_t b = mpz_sizeinbase(num(fz.coeff(i)).get_mpz_t(), 2);
    height_bits = std::max(height_bits, static_cast<long>(b));
  }
  mpfr_prec_t wprec = prec + 64 + 2 * height_bits;
  long bits = static_cast<long>(wprec) + 8;

  Real pi = Real::pi(wprec);
  Real w1(wprec), w2im(wprec);
  bool rect = e.disc() > 0;

  auto roots = detail::real_roots(f, bits, wprec);
  if (rect) {
    if (roots.size() != 3) throw std::logic_error("positive discriminant needs three real roots");
    const Real& e3 = roots[0];
    const Real& e2 = roots[1];
    const Real& e1 = roots[2];
    Real s13 = sqrt(e1 - e3), s12 = sqrt(e1 - e2), s23 = sqrt(e2 - e3);
    w1 = pi / agm(s13, s12);
    w2im = pi / agm(s13, s23);
  } else {
    if (roots.size() != 1) throw std::logic_error("negative discriminant needs one real root");
    const Real& e1 = roots[0];
    // With f = 4(x-e1)(x-z)(x-conj z), f'(e1) = 4|e1-z|^2.
    Real B = sqrt(detail::eval_poly(f.derivative(), e1, wprec)) / Real(2, wprec);
    Real A = Real(Rational(3, 2), wprec) * e1 + Real(e.b2() / 8, wprec);
    Real two(2, wprec);
    w1 = two * pi / agm(two * sqrt(B), sqrt(two * (B + A)));
    w2im = two * pi / agm(two * sqrt(B), sqrt(two * (B - A)));
  }

  Real covol = rect ? w1 * w2im : w1 * w2im / Real(2, wprec);
  Periods out{Real(prec), Real(prec), rect, Real(prec), Real(prec)};
  mpfr_set(out.omega1.get(), w1.get(), MPFR_RNDN);
  mpfr_set(out.omega2_im.get(), w2im.get(), MPFR_RNDN);
  Real rp = rect ? Real(2, wprec) * w1 : w1;
  mpfr_set(out.real_period.get(), rp.get(), MPFR_RNDN);
  Real cp = Real(4, wprec) * covol;
  mpfr_set(out.complex_period.get(), cp.get(), MPFR_RNDN);
  return out;
}

// q = exp(2 pi i tau) for the lattice above; real for both shapes, positive
// rectangular and negative rhombic.
inline Real nome(const Periods& P) {
  mpfr_prec_t prec = P.omega1.prec();
  Real pi = Real::pi(prec);
  if (P.rectangular) return exp(-(Real(2, prec) * pi * P.omega2_im / P.omega1));
  return -exp(-(pi * P.omega2_im / P.omega1));
}

}  // namespace isoloc
