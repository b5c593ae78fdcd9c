#pragma once

// Numerical q-expansion identities tying the period lattice to the
// discriminant. These exercise the analytic layer end to end: if the lattice
// normalization, the AGM, or the minimal models were off, nothing here would
// come back rational.

#include "verify.hpp"

namespace isoloc {

namespace detail {

// q from a half-basis ratio t = im/re scale: rectangular lattices use
// exp(-2 pi t), rhombic ones -exp(-pi t).
inline Real nome_from_ratio(const Real& t, bool rectangular, mpfr_prec_t prec) {
  Real pi = Real::pi(prec);
  if (rectangular) return exp(Real(-2, prec) * pi * t);
  return -exp(-pi * t);
}

inline Real eta24_product(const Real& q, long terms, mpfr_prec_t prec) {
  // prod (1-q^n)^24, truncated
  Real acc(1, prec), qn(1, prec), one(1, prec);
  for (long n = 1; n <= terms; ++n) {
    qn = qn * q;
    acc = acc * pow_si(one - qn, 24);
  }
  return acc;
}

}  // namespace detail

// Best rational approximation to x with denominator at most den_bound, by
// continued fractions. Partial quotients below the working resolution are cut
// off so noise bits never fabricate huge denominators.
inline Rational nearest_rational(const Real& x, const Int& den_bound) {
  mpfr_prec_t prec = x.prec();
  Real t = x;
  Int h0 = 0, k0 = 1, h1 = 1, k1 = 0;
  Rational best = 0;
  for (int i = 0; i < 64; ++i) {
    Int a;
    {
      mpfr_t fl;
      mpfr_init2(fl, prec);
      mpfr_floor(fl, t.get());
      mpfr_get_z(a.get_mpz_t(), fl, MPFR_RNDN);
      mpfr_clear(fl);
    }
    Int h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (i > 0 && k2 > den_bound) break;
    best = make_rational(h2, k2);
    h0 = h1;
    k0 = k1;
    h1 = h2;
    k1 = k2;
    Real frac = t - Real(Rational(a), prec);
    if (frac.is_zero() || frac < Real::pow2(-static_cast<long>(prec) + 16, prec)) break;
    t = Real(1, prec) / frac;
  }
  return best;
}

// Relative error of (2 pi / omega1)^12 * q * prod(1-q^n)^24 against the
// discriminant of the given model. Exact in the limit, so the return value
// measures truncation plus rounding only.
inline Real delta_tau_check(const Curve& e, long terms, mpfr_prec_t prec) {
  mpfr_prec_t wprec = prec + 64;
  Periods P = periods(e, wprec);
  Real q = nome(P);
  Real lhs = pow_si(Real(2, wprec) * Real::pi(wprec) / P.omega1, 12) * q *
             detail::eta24_product(q, terms, wprec);
  Real target(e.disc(), wprec);
  return abs(lhs / target - Real(1, wprec));
}

struct EtaQuotientReport {
  Real computed;          // the eta quotient, evaluated at the source lattice
  Rational reconstructed; // nearest rational with denominator at most 10^6
  Real error;             // relative gap between computed and reconstructed
  Rational expected;      // exact 12th root of disc(target)^p / disc(source)
  bool root_exists = false;      // the disc ratio is a 12th power in Q
  bool twelfth_power_ok = false; // reconstructed^12 matches the disc ratio exactly
};

// The degree-p eta quotient q^{(p^2-1)/12} prod (1-q^{pn})^{2p} / (1-q^n)^2,
// evaluated on a basis of the source lattice adapted to the kernel, recovers
// the exact 12th root of disc(target)^p / disc(source). Runs on the direction
// whose pullback scalar has absolute value p, so that the target lattice is
// index p inside the source one.
inline EtaQuotientReport eta_quotient_check(const PreparedPair& P, long terms,
                                            mpfr_prec_t prec) {
  long p = P.p;
  if (p % 2 == 0 || (p * p - 1) % 12 != 0)
    throw std::invalid_argument("eta quotient check needs degree 5 or more");
  const Isogeny& psi = abs(P.phi.scalar) == p   ? P.phi
                       : abs(P.dual.scalar) == p ? P.dual
                                                  : throw std::logic_error(
                                                       "no direction scales the differential by p");
  EtaQuotientReport out;
  Rational ratio = psi.codomain.disc();
  Rational rp = 1;
  for (long i = 0; i < p; ++i) rp *= ratio;
  rp /= psi.domain.disc();
  if (auto root = is_nth_power(rp, 12)) {
    out.root_exists = true;
    out.expected = *root;
  }

  mpfr_prec_t wprec = prec + 64;
  Periods ps = periods(psi.domain, wprec);
  bool real_kernel = detail::kernel_is_real(psi);
  Real w1(0, wprec), q(0, wprec);
  int sign = 1;
  if (real_kernel) {
    // kernel along the real half-basis: tau stretches by p vertically
    w1 = ps.omega1;
    q = nome(ps);
  } else {
    // kernel along the imaginary direction: swap the basis, so the "real"
    // half-period is i*omega2_im and the nome comes from the inverted ratio
    w1 = ps.omega2_im;
    q = detail::nome_from_ratio(ps.omega1 / ps.omega2_im, ps.rectangular, wprec);
    if (((p - 1) / 2) % 2 == 1) sign = -1;  // (2 pi / w1)^(p-1) for imaginary w1
  }

  Real acc(1, wprec), qn(1, wprec), one(1, wprec);
  std::vector<Real> powers;  // q^n for n = 1..terms, reused for q^{pn}
  powers.reserve(terms);
  for (long n = 1; n <= terms; ++n) {
    qn = qn * q;
    powers.push_back(qn);
    acc = acc / pow_si(one - qn, 2);
  }
  for (long n = 1; n * p <= terms; ++n) acc = acc * pow_si(one - powers[n * p - 1], 2 * p);
  Real qhead = pow_si(q, (p * p - 1) / 12);
  Real value = Real(sign, wprec) * pow_si(Real(2, wprec) * Real::pi(wprec) / w1, p - 1) * qhead * acc;
  out.computed = value;
  out.reconstructed = nearest_rational(value, Int(1000000));
  Rational power = 1;
  for (int i = 0; i < 12; ++i) power *= out.reconstructed;
  out.twelfth_power_ok = power == rp;
  if (out.reconstructed == 0)
    out.error = abs(value);
  else
    out.error = abs(value / Real(out.reconstructed, wprec) - one);
  return out;
}

}  // namespace isoloc
