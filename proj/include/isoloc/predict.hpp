#pragma once

// Predicts the local invariants of the target of a p-isogeny from the source
// curve alone (plus the kernel), and checks the prediction against what Tate's
// algorithm computes on the target. Fields that the classification genuinely
// leaves open stay unset and are skipped by the comparison.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "isogeny.hpp"
#include "local.hpp"
#include "modpoly.hpp"

namespace isoloc {

inline KodairaSymbol opposite_type(const KodairaSymbol& t) {
  using F = KodairaSymbol::Family;
  switch (t.fam) {
    case F::II: return KodairaSymbol::IIstar();
    case F::IIstar: return KodairaSymbol::II();
    case F::III: return KodairaSymbol::IIIstar();
    case F::IIIstar: return KodairaSymbol::III();
    case F::IV: return KodairaSymbol::IVstar();
    case F::IVstar: return KodairaSymbol::IV();
    case F::I0star: return KodairaSymbol::I0star();
    default: throw std::invalid_argument("opposite_type: not an exchangeable additive type");
  }
}

struct LocalPrediction {
  Int l;
  std::string row;  // classification of the source curve that drove the prediction
  std::optional<long> delta;
  std::optional<KodairaSymbol> type;
  std::optional<long> conductor;
  std::optional<Rational> tamagawa_ratio;   // c(source)/c(target)
  std::optional<long> scalar_valuation;     // v_l of the differential pullback scalar
};

namespace detail {

// Quadratic twist class over Q_l that turns additive potentially good
// reduction into good reduction, when a quadratic twist suffices.
inline std::optional<Rational> good_twist_class(const Curve& e, const Int& l) {
  std::vector<Rational> classes;
  if (l == 2) {
    for (long u : {-1, 2, -2, 5, -5, 10, -10}) classes.push_back(Rational(u));
  } else {
    Rational u(least_nonresidue(l));
    classes = {u, Rational(l), u * Rational(l)};
  }
  for (const Rational& d : classes)
    if (local_data(quadratic_twist(e, d), l).delta == 0) return d;
  return std::nullopt;
}

// Tamagawa ratio for 2-isogenies through a quadratic extension F = Q_l(sqrt d)
// where the curve picks up good or split multiplicative reduction: the ratio
// is decided by which of the two minimal discriminants is a norm from F.
inline Rational norm_ratio(const Rational& disc_dom, const Rational& disc_cod, const Rational& d,
                           const Int& l) {
  if (hilbert_symbol(disc_dom / disc_cod, d, l) == 1) return Rational(1);
  if (hilbert_symbol(disc_dom, d, l) == 1) return Rational(2);
  return Rational(1, 2);
}

// Does E(Q_l) contain a point of order 3? Only called for l != 3, where any
// such point has integral x on an integral model.
inline bool has_local_three_torsion(const Curve& e, const Int& l) {
  Poly p3 = division_polynomial_x(e, 3);
  Poly f = e.fpoly();
  for (unsigned K = 24; K <= 3072; K *= 2) {
    std::vector<Int> roots;
    try {
      roots = zl_roots(p3, l, K);
    } catch (const std::runtime_error&) {
      continue;  // precision too small to certify, try again
    }
    bool retry = false;
    for (const Int& r : roots) {
      // y exists over Q_l iff f(x) is a square there; read the valuation and
      // unit of f(x) off the approximation once it is accurate enough.
      Rational fr = f.eval(Rational(r));
      if (fr == 0) throw std::logic_error("three-torsion x collided with two-torsion");
      long v = val(fr, l).v;
      if (v + 4 > static_cast<long>(K)) {
        retry = true;  // approximation cannot separate valuation and unit yet
        break;
      }
      if (v % 2 != 0) continue;
      Rational u = unit_part(fr, l);
      bool square = (l == 2) ? unit_mod(u, 2, 3) == 1 : legendre_unit(u, l) == 1;
      if (square) return true;
    }
    if (!retry) return false;
  }
  throw std::runtime_error("has_local_three_torsion: could not certify at any precision");
}

// Kernel of phi lies in the formal group over the field where the source
// acquires good reduction. On the l-minimal model this happens exactly when
// every kernel x-coordinate has valuation below delta/6.
inline bool kernel_formal_over_good_field(const Isogeny& phi, const LocalData& ld) {
  if (phi.kernel.degree() < 1)
    throw std::invalid_argument("kernel_formal_over_good_field: kernel not tracked");
  Poly k = phi.kernel.compose_linear(ld.to_minimal.u * ld.to_minimal.u, ld.to_minimal.r).monic();
  NewtonPolygon np = newton_polygon(k.coeffs(), ld.l);
  if (np.zero_roots > 0) return false;
  Rational bound(ld.delta, 6);
  for (auto& [s, m] : np.slopes) {
    (void)m;
    if (s >= bound) return false;
  }
  return true;
}

}  // namespace detail

// Predict the invariants of the isogeny's target at l from the source side.
// `phi` must run between globally minimal models with its kernel tracked.
inline LocalPrediction predict_local(const Isogeny& phi, const Int& l) {
  const Curve& E = phi.domain;
  const long p = phi.degree;
  LocalData ld = local_data(E, l);
  LocalPrediction out;
  out.l = l;
  out.conductor = ld.f;  // the conductor exponent is an isogeny invariant

  auto scalar_for_direction = [&](bool j_drops_by_p) {
    // pullback scalar is a unit at l != p; for (potentially) multiplicative
    // reduction at l = p it is a unit exactly when v(j) = p v(j').
    if (Int(p) != l) return std::optional<long>(0);
    return std::optional<long>(j_drops_by_p ? 0 : 1);
  };

  switch (ld.cls) {
    case ReductionClass::GoodOrdinary: {
      out.row = "good ordinary";
      out.delta = 0;
      out.type = KodairaSymbol::I0();
      out.tamagawa_ratio = Rational(1);
      if (Int(p) == l)
        out.scalar_valuation = detail::kernel_formal_over_good_field(phi, ld) ? 1 : 0;
      else
        out.scalar_valuation = 0;
      return out;
    }
    case ReductionClass::GoodSupersingular: {
      if (Int(p) == l)
        throw std::logic_error(
            "good supersingular reduction cannot carry an isogeny of the residue degree over Q_l");
      out.row = "good supersingular";
      out.delta = 0;
      out.type = KodairaSymbol::I0();
      out.tamagawa_ratio = Rational(1);
      out.scalar_valuation = 0;
      return out;
    }
    case ReductionClass::SplitMultiplicative:
    case ReductionClass::NonsplitMultiplicative: {
      bool split = ld.cls == ReductionClass::SplitMultiplicative;
      long dd = ld.delta;  // = -v(j)
      // The two Tate parameters are q and q^p in one of the two orders; which
      // order is read off the j-invariants of the pair.
      long vjp = val(phi.codomain.j(), l).v;
      bool j_drops;  // true when v(j') = v(j)/p
      if (dd % p == 0 && vjp == -dd / p)
        j_drops = true;
      else if (vjp == -dd * p)
        j_drops = false;
      else
        throw std::logic_error("multiplicative pair with unrelated j-valuations");
      long ddp = j_drops ? dd / p : dd * p;
      out.row = split ? "split multiplicative" : "nonsplit multiplicative";
      out.row += j_drops ? ", j-valuation divided by p" : ", j-valuation multiplied by p";
      out.delta = ddp;
      out.type = KodairaSymbol::In(ddp);
      if (split) {
        out.tamagawa_ratio = make_rational(Int(dd), Int(ddp));
      } else if (p != 2 || (dd % 2 == 0 && ddp % 2 == 0)) {
        out.tamagawa_ratio = Rational(1);
      } else {
        out.tamagawa_ratio = (ddp % 2 != 0) ? Rational(2) : Rational(1, 2);
      }
      out.scalar_valuation = scalar_for_direction(j_drops);
      return out;
    }
    case ReductionClass::Additive:
      break;
  }

  // additive reduction from here on
  const Curve& M = ld.minimal;
  if (potentially_multiplicative(E, l)) {
    long vj = val(E.j(), l).v;  // negative
    long vjp = val(phi.codomain.j(), l).v;
    bool j_drops;
    if (vj % p == 0 && vjp == vj / p)
      j_drops = true;
    else if (vjp == vj * p)
      j_drops = false;
    else
      throw std::logic_error("potentially multiplicative pair with unrelated j-valuations");
    out.row = std::string("additive potentially multiplicative, j-valuation ") +
              (j_drops ? "divided" : "multiplied") + " by p";
    long dprime = ld.delta + (vj - vjp);
    out.delta = dprime;
    if (ld.type.fam != KodairaSymbol::Family::Instar &&
        ld.type.fam != KodairaSymbol::Family::I0star)
      throw std::logic_error("potentially multiplicative additive reduction must be In*");
    long nprime = ld.type.n + (dprime - ld.delta);  // I0* carries n = 0
    if (nprime < 0) throw std::logic_error("negative In* index predicted");
    out.type = nprime == 0 ? KodairaSymbol::I0star() : KodairaSymbol::Instar(nprime);
    if (p >= 3) {
      out.tamagawa_ratio = Rational(1);
    } else {
      // quadratic twist by -c6 has split multiplicative reduction
      Rational d = -M.c6();
      out.tamagawa_ratio = detail::norm_ratio(M.disc(), phi.codomain.disc(), d, l);
    }
    out.scalar_valuation = scalar_for_direction(j_drops);
    return out;
  }

  // additive, potentially good
  if (Int(p) != l) {
    out.row = "additive potentially good, away from p";
    out.delta = ld.delta;
    out.type = ld.type;
    out.scalar_valuation = 0;
    if (p == 3 &&
        (ld.type.fam == KodairaSymbol::Family::IV || ld.type.fam == KodairaSymbol::Family::IVstar) &&
        l % 3 != 1) {
      // cube roots of unity are missing from Q_l, so the component group
      // comparison hinges on rational 3-torsion
      out.row += " (IV with mu_3 absent)";
      out.tamagawa_ratio = detail::has_local_three_torsion(M, l) ? Rational(3) : Rational(1, 3);
    } else if (p == 2 && ld.type.fam == KodairaSymbol::Family::I0star) {
      auto d = detail::good_twist_class(M, l);
      if (!d) throw std::logic_error("I0* away from 2 must be a quadratic twist of a good curve");
      out.tamagawa_ratio = detail::norm_ratio(M.disc(), phi.codomain.disc(), *d, l);
    } else {
      out.tamagawa_ratio = Rational(1);
    }
    return out;
  }

  // additive, potentially good, at l = p
  if (potentially_ordinary(E, l)) {
    out.row = "additive potentially ordinary at p";
    out.delta = ld.delta;
    out.type = ld.type;
    if (p >= 3) {
      out.tamagawa_ratio = Rational(1);
    } else {
      auto d = detail::good_twist_class(M, l);
      if (!d)
        throw std::logic_error("potentially ordinary at 2 must be a quadratic twist of a good curve");
      out.tamagawa_ratio = detail::norm_ratio(M.disc(), phi.codomain.disc(), *d, l);
    }
    out.scalar_valuation = detail::kernel_formal_over_good_field(phi, ld) ? 1 : 0;
    return out;
  }
  if (ld.f == 2) {
    out.row = "additive tame potentially supersingular at p";
    out.delta = 12 - ld.delta;
    out.type = opposite_type(ld.type);
    out.tamagawa_ratio = Rational(1);
    // the pullback scalar is genuinely undetermined here
    return out;
  }
  out.row = "additive wild potentially supersingular at p";
  if (p > 3) throw std::logic_error("wild reduction is impossible at primes above 3");
  return out;
}

}  // namespace isoloc
