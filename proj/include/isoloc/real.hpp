#pragma once

#include <mpfr.h>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "arith.hpp"

namespace isoloc {

// Arbitrary-precision real number on top of MPFR. Each value carries its own
// precision; binary operations round to the larger operand precision.
class Real {
 public:
  explicit Real(mpfr_prec_t prec = 64) {
    check_prec(prec);
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  Real(long x, mpfr_prec_t prec) {
    check_prec(prec);
    mpfr_init2(v_, prec);
    mpfr_set_si(v_, x, MPFR_RNDN);
  }
  Real(const Rational& x, mpfr_prec_t prec) {
    check_prec(prec);
    mpfr_init2(v_, prec);
    mpfr_set_q(v_, x.get_mpq_t(), MPFR_RNDN);
  }
  Real(const Real& o) {
    mpfr_init2(v_, o.prec());
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, o.prec());
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(Real o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

  // Shortest decimal string that rounds back to the value is overkill here;
  // fixed scientific notation keeps CLI output reproducible.
  std::string to_string(int digits) const {
    if (digits < 1) digits = 1;
    char* s = nullptr;
    mpfr_asprintf(&s, "%.*Re", digits - 1, v_);
    std::string out(s);
    mpfr_free_str(s);
    return out;
  }

  static Real pow2(long e, mpfr_prec_t prec) {
    Real r(1, prec);
    mpfr_mul_2si(r.v_, r.v_, e, MPFR_RNDN);
    return r;
  }

  friend Real operator-(const Real& a) {
    Real r(a.prec());
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
#define ISOLOC_REAL_BINOP(op, fn)                       \
  friend Real operator op(const Real& a, const Real& b) { \
    Real r(std::max(a.prec(), b.prec()));               \
    fn(r.v_, a.v_, b.v_, MPFR_RNDN);                    \
    return r;                                           \
  }
  ISOLOC_REAL_BINOP(+, mpfr_add)
  ISOLOC_REAL_BINOP(-, mpfr_sub)
  ISOLOC_REAL_BINOP(*, mpfr_mul)
  ISOLOC_REAL_BINOP(/, mpfr_div)
#undef ISOLOC_REAL_BINOP

  friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }

  friend Real abs(const Real& a) {
    Real r(a.prec());
    mpfr_abs(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend Real sqrt(const Real& a) {
    if (a.sign() < 0) throw std::domain_error("sqrt of negative value");
    Real r(a.prec());
    mpfr_sqrt(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend Real agm(const Real& a, const Real& b) {
    Real r(std::max(a.prec(), b.prec()));
    mpfr_agm(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real exp(const Real& a) {
    Real r(a.prec());
    mpfr_exp(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend Real log(const Real& a) {
    if (a.sign() <= 0) throw std::domain_error("log of non-positive value");
    Real r(a.prec());
    mpfr_log(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  // a^e for integer e, by MPFR's correctly rounded power.
  friend Real pow_si(const Real& a, long e) {
    Real r(a.prec());
    mpfr_pow_si(r.v_, a.v_, e, MPFR_RNDN);
    return r;
  }

  static Real pi(mpfr_prec_t prec) {
    check_prec(prec);
    Real r(prec);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }

 private:
  static void check_prec(mpfr_prec_t prec) {
    if (prec < MPFR_PREC_MIN || prec > 1L << 26)
      throw std::invalid_argument("unreasonable MPFR precision request");
  }
  mpfr_t v_;
};

}  // namespace isoloc
