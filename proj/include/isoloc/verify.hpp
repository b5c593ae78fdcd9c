#pragma once

// Pair-level verification: build the isogeny and its dual between global
// minimal models, predict every local invariant of the target from the source,
// and compare against what gets computed directly on the target. Also settles
// the archimedean side: exact predicted period ratios against AGM values.

#include <set>

#include "periods.hpp"
#include "predict.hpp"

namespace isoloc {

struct PreparedPair {
  Isogeny phi;   // source -> target, global minimal models, kernel tracked
  Isogeny dual;  // target -> source
  long p = 0;
};

inline PreparedPair prepare_pair(const Isogeny& phi_in) {
  Isogeny phi = minimal_model_isogeny(phi_in);
  Isogeny dual = dual_isogeny(phi);
  long p = phi.degree;
  return PreparedPair{std::move(phi), std::move(dual), p};
}

inline std::vector<Int> relevant_primes(const PreparedPair& P) {
  std::set<Int> s;
  for (const Int& l : bad_primes(P.phi.domain)) s.insert(l);
  for (const Int& l : bad_primes(P.phi.codomain)) s.insert(l);
  s.insert(Int(P.p));
  return {s.begin(), s.end()};
}

struct LocalComparison {
  Int l;
  LocalPrediction pred;
  LocalData source, target;
  long scalar_valuation = 0;  // computed v_l of the pullback scalar
  std::vector<std::string> mismatches;
  bool ok() const { return mismatches.empty(); }
};

inline LocalComparison compare_local(const PreparedPair& P, const Int& l) {
  LocalComparison out{l,
                      predict_local(P.phi, l),
                      local_data(P.phi.domain, l),
                      local_data(P.phi.codomain, l),
                      val(P.phi.scalar, l).v,
                      {}};
  if (out.pred.delta && *out.pred.delta != out.target.delta) out.mismatches.push_back("delta");
  if (out.pred.type && !(*out.pred.type == out.target.type)) out.mismatches.push_back("kodaira");
  if (out.pred.conductor && *out.pred.conductor != out.target.f)
    out.mismatches.push_back("conductor");
  if (out.pred.tamagawa_ratio &&
      *out.pred.tamagawa_ratio != make_rational(out.source.c, out.target.c))
    out.mismatches.push_back("tamagawa");
  if (out.pred.scalar_valuation && *out.pred.scalar_valuation != out.scalar_valuation)
    out.mismatches.push_back("scalar");
  // the scalar is a unit away from p no matter what
  if (Int(P.p) != l && out.scalar_valuation != 0) out.mismatches.push_back("scalar");
  return out;
}

namespace detail {

// Is some (hence every) nonzero kernel point real? Only meaningful for odd
// degree, where the kernel is cyclic of odd order: the kernel is real iff the
// kernel polynomial has a real root at which the two-torsion cubic is positive.
inline bool kernel_is_real(const Isogeny& phi) {
  Poly g = phi.kernel;
  Poly f = phi.domain.fpoly();
  if (gcd(g, f).degree() != 0)
    throw std::logic_error("odd-order kernel shares a root with the two-torsion cubic");
  for (auto iv : isolate_real_roots(g)) {
    for (;;) {
      if (iv.first == iv.second) {
        if (f.eval(iv.first) > 0) return true;
        break;
      }
      if (count_real_roots(f, iv.first, iv.second) == 0) {
        Rational mid = (iv.first + iv.second) / 2;
        if (f.eval(mid) > 0) return true;
        break;
      }
      iv = refine_root(g, iv, (iv.second - iv.first) / 4);
    }
  }
  return false;
}

// Kernel/cokernel balance of phi on real points.
inline long real_kernel_cokernel_ratio(const Isogeny& phi) {
  if (phi.degree % 2 != 0) return kernel_is_real(phi) ? phi.degree : 1;
  // degree 2: shift the kernel point to the origin of y^2 = x^3 + a x^2 + b x
  Rational x0 = -phi.kernel.coeff(0);
  Rational c2 = phi.domain.b2() / 4, c1 = phi.domain.b4() / 2;
  Rational a = 3 * x0 + c2;
  Rational b = (3 * x0 + 2 * c2) * x0 + c1;
  bool balanced = b > 0 && (a < 0 || 4 * b > a * a);
  return balanced ? 1 : 2;
}

}  // namespace detail

struct PeriodComparison {
  Rational predicted_real_ratio;     // Omega(source)/Omega(target), exact
  Rational predicted_complex_ratio;  // same for the complex periods
  Real real_ratio;                   // computed by AGM
  Real complex_ratio;
  long kappa = 1;  // kernel/cokernel size of phi on real points
  bool real_ok = false, complex_ok = false;
};

// Compare AGM period ratios against the exact predictions. `tol_bits` is the
// relative tolerance exponent: agreement within 2^-tol_bits is required.
inline PeriodComparison compare_periods(const PreparedPair& P, mpfr_prec_t prec, long tol_bits) {
  PeriodComparison out;
  out.kappa = detail::real_kernel_cokernel_ratio(P.phi);
  Rational a = abs(P.phi.scalar);
  out.predicted_real_ratio = Rational(out.kappa) / a;
  out.predicted_complex_ratio = Rational(P.p) / (a * a);
  Periods ps = periods(P.phi.domain, prec);
  Periods pt = periods(P.phi.codomain, prec);
  out.real_ratio = ps.real_period / pt.real_period;
  out.complex_ratio = ps.complex_period / pt.complex_period;
  Real tol = Real::pow2(-tol_bits, prec);
  Real one(1, prec);
  out.real_ok = abs(out.real_ratio / Real(out.predicted_real_ratio, prec) - one) < tol;
  out.complex_ok = abs(out.complex_ratio / Real(out.predicted_complex_ratio, prec) - one) < tol;
  return out;
}

// Does the kernel consist of rational points?
inline bool kernel_is_rational(const Isogeny& phi) {
  Poly f = phi.domain.fpoly();
  for (const Rational& x0 : rational_roots(phi.kernel)) {
    Rational fx = f.eval(x0);
    if (phi.degree == 2) {
      if (fx == 0) return true;  // two-torsion: y is determined rationally
      continue;
    }
    if (fx > 0 && is_nth_power(fx, 2)) return true;
  }
  return false;
}

struct PairReport {
  PreparedPair pair;
  std::vector<LocalComparison> locals;
  std::optional<PeriodComparison> period;
  bool ok() const {
    for (const auto& lc : locals)
      if (!lc.ok()) return false;
    if (period && !(period->real_ok && period->complex_ok)) return false;
    return true;
  }
};

inline PairReport verify_pair(const Isogeny& phi_in, bool with_periods = true,
                              mpfr_prec_t prec = 256, long tol_bits = 40) {
  PreparedPair pair = prepare_pair(phi_in);
  std::vector<LocalComparison> locals;
  for (const Int& l : relevant_primes(pair)) locals.push_back(compare_local(pair, l));
  std::optional<PeriodComparison> period;
  if (with_periods) period = compare_periods(pair, prec, tol_bits);
  return PairReport{std::move(pair), std::move(locals), std::move(period)};
}

}  // namespace isoloc
