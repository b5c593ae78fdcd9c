#pragma once

// Local reduction data at a prime: Kodaira type, minimal model, conductor
// exponent, component count and Tamagawa number via Tate's algorithm, plus
// the reduction classification used downstream (ordinary/supersingular,
// split/nonsplit, potentially good/multiplicative).

#include <isoloc/curve.hpp>
#include <isoloc/modpoly.hpp>

#include <climits>

namespace isoloc {

struct KodairaSymbol {
  enum class Family { I0, In, II, III, IV, I0star, Instar, IVstar, IIIstar, IIstar };
  Family fam = Family::I0;
  long n = 0;  // index for In and In*

  KodairaSymbol() = default;
  KodairaSymbol(Family f, long idx = 0) : fam(f), n(idx) {}
  static KodairaSymbol I0() { return {Family::I0}; }
  static KodairaSymbol In(long n) { return {Family::In, n}; }
  static KodairaSymbol II() { return {Family::II}; }
  static KodairaSymbol III() { return {Family::III}; }
  static KodairaSymbol IV() { return {Family::IV}; }
  static KodairaSymbol I0star() { return {Family::I0star}; }
  static KodairaSymbol Instar(long n) { return {Family::Instar, n}; }
  static KodairaSymbol IVstar() { return {Family::IVstar}; }
  static KodairaSymbol IIIstar() { return {Family::IIIstar}; }
  static KodairaSymbol IIstar() { return {Family::IIstar}; }

  bool operator==(const KodairaSymbol& o) const { return fam == o.fam && n == o.n; }

  bool is_additive() const { return fam != Family::I0 && fam != Family::In; }

  // geometric components of the special fibre of the minimal regular model
  long components() const {
    switch (fam) {
      case Family::I0: return 1;
      case Family::In: return n;
      case Family::II: return 1;
      case Family::III: return 2;
      case Family::IV: return 3;
      case Family::I0star: return 5;
      case Family::Instar: return 5 + n;
      case Family::IVstar: return 7;
      case Family::IIIstar: return 8;
      case Family::IIstar: return 9;
    }
    return 0;
  }

  std::string str() const {
    switch (fam) {
      case Family::I0: return "I0";
      case Family::In: return "I" + std::to_string(n);
      case Family::II: return "II";
      case Family::III: return "III";
      case Family::IV: return "IV";
      case Family::I0star: return "I0*";
      case Family::Instar: return "I" + std::to_string(n) + "*";
      case Family::IVstar: return "IV*";
      case Family::IIIstar: return "III*";
      case Family::IIstar: return "II*";
    }
    return "?";
  }
};

struct TateResult {
  Int l;
  KodairaSymbol type;
  long delta = 0;  // valuation of the minimal discriminant
  long f = 0;      // conductor exponent
  long m = 1;      // components of the special fibre
  Int c = 1;       // Tamagawa number
  bool split = false;  // meaningful for In only
  Curve minimal{Rational(0), Rational(0), Rational(0), Rational(0), Rational(1)};
  ModelMap to_minimal;  // input model -> minimal
};

namespace detail {

inline long vl_int(const Rational& x, const Int& l) {
  if (x == 0) return LONG_MAX / 4;
  return val(num(x), l);
}

// The unique singular point of the reduction mod l (requires l | disc).
inline std::pair<Int, Int> singular_point(const Curve& e, const Int& l) {
  if (l < 5) {
    for (Int x = 0; x < l; ++x)
      for (Int y = 0; y < l; ++y) {
        Int a1 = num(e.a1()) % l, a2 = num(e.a2()) % l, a3 = num(e.a3()) % l;
        Int a4 = num(e.a4()) % l, a6 = num(e.a6()) % l;
        Int on = (y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6) % l;
        Int fx = (a1 * y - 3 * x * x - 2 * a2 * x - a4) % l;
        Int fy = (2 * y + a1 * x + a3) % l;
        if (on % l == 0 && fx % l == 0 && fy % l == 0) return {x, y};
      }
    throw std::logic_error("singular_point: no singular point found mod " + l.get_str());
  }
  // l odd: complete the square; singular x is the repeated root of F.
  modp::ZPoly F = {num(e.b6()), 2 * num(e.b4()), num(e.b2()), Int(4)};
  modp::ZPoly g = modp::gcd_mod(F, modp::derivative(F, l), l);
  auto roots = modp::roots_mod_l(g, l);
  if (roots.empty()) throw std::logic_error("singular_point: repeated root missing");
  Int x0 = roots[0];
  Int inv2 = (l + 1) / 2;
  Int y0 = (-(num(e.a1()) * x0 + num(e.a3())) % l) * inv2 % l;
  if (y0 < 0) y0 += l;
  return {x0, y0};
}

// exact quotient a / l^k for integral a with v(a) >= k, reduced mod l
inline Int quo_mod(const Rational& a, const Int& l, unsigned k) {
  Int n = num(a), lk;
  mpz_pow_ui(lk.get_mpz_t(), l.get_mpz_t(), k);
  if (n % lk != 0) throw std::logic_error("quo_mod: valuation too small");
  Int r = (n / lk) % l;
  if (r < 0) r += l;
  return r;
}

// Multiplicity of x as a root of f mod l, by repeated synthetic division.
// Derivative-based tests are unreliable in characteristic 2 and 3.
inline int root_multiplicity(const modp::ZPoly& f, const Int& x, const Int& l) {
  modp::ZPoly cur = modp::reduce(f, l);
  int m = 0;
  while (modp::deg(cur) >= 1) {
    long d = modp::deg(cur);
    modp::ZPoly q(d);
    q[d - 1] = cur[d];
    for (long i = d - 1; i >= 1; --i) q[i - 1] = (cur[i] + x * q[i]) % l;
    Int rem = (cur[0] + x * q[0]) % l;
    if (rem != 0) break;
    ++m;
    cur = modp::reduce(q, l);
  }
  return m;
}

}  // namespace detail

// Tate's algorithm at l on an integral model. The returned model is minimal
// at l and still integral; the map composes all coordinate changes made.
inline TateResult tate_algorithm(const Curve& input, const Int& l) {
  if (!input.is_integral()) throw std::invalid_argument("tate_algorithm wants an integral model");
  if (mpz_probab_prime_p(l.get_mpz_t(), 40) == 0)
    throw std::invalid_argument("tate_algorithm: " + l.get_str() + " is not prime");
  TateResult res;
  res.l = l;
  Curve E = input;
  ModelMap acc;
  auto apply = [&](const ModelMap& m) {
    acc = acc.then(m);
    E = transformed(E, m);
  };
  auto vA = [&](const Rational& x) { return detail::vl_int(x, l); };
  auto finish = [&](KodairaSymbol type, Int c, bool split, long d) {
    res.type = type;
    res.delta = d;
    res.m = type.components();
    res.f = d - res.m + 1;
    res.c = c;
    res.split = split;
    res.minimal = E;
    res.to_minimal = acc;
  };
  Int lq2 = l * l;

  for (int guard = 0;; ++guard) {
    if (guard > 100) throw std::logic_error("tate_algorithm: did not terminate");
    long d = vA(E.disc());
    if (d == 0) {
      finish(KodairaSymbol::I0(), 1, false, 0);
      return res;
    }
    auto [x0, y0] = detail::singular_point(E, l);
    apply(ModelMap(Rational(1), Rational(x0), Rational(0), Rational(y0)));

    if (vA(E.b2()) == 0) {
      // node: tangent directions from T^2 + a1 T - a2
      modp::ZPoly tq = {-num(E.a2()), num(E.a1()), Int(1)};
      bool split = !modp::roots_mod_l(tq, l).empty();
      Int c = split ? Int(d) : (d % 2 == 0 ? Int(2) : Int(1));
      finish(KodairaSymbol::In(d), c, split, d);
      return res;
    }
    if (vA(E.a6()) < 2) {
      finish(KodairaSymbol::II(), 1, false, d);
      return res;
    }
    if (vA(E.b8()) < 3) {
      finish(KodairaSymbol::III(), 2, false, d);
      return res;
    }
    if (vA(E.b6()) < 3) {
      modp::ZPoly quad = {-detail::quo_mod(E.a6(), l, 2), detail::quo_mod(E.a3(), l, 1), Int(1)};
      Int c = modp::roots_mod_l(quad, l).empty() ? 1 : 3;
      finish(KodairaSymbol::IV(), c, false, d);
      return res;
    }

    // normalize: v(a1)>=1, v(a2)>=1, v(a3)>=2, v(a4)>=2, v(a6)>=3
    auto normalized = [&](const Curve& c) {
      return detail::vl_int(c.a1(), l) >= 1 && detail::vl_int(c.a2(), l) >= 1 &&
             detail::vl_int(c.a3(), l) >= 2 && detail::vl_int(c.a4(), l) >= 2 &&
             detail::vl_int(c.a6(), l) >= 3;
    };
    if (l == 2) {
      bool done = false;
      for (Int r = 0; r < 8 && !done; ++r)
        for (Int s = 0; s < 4 && !done; ++s)
          for (Int t = 0; t < 8 && !done; ++t) {
            ModelMap m(Rational(1), Rational(r), Rational(s), Rational(t));
            if (normalized(transformed(E, m))) {
              apply(m);
              done = true;
            }
          }
      if (!done) throw std::logic_error("tate_algorithm: normalization failed at 2");
    } else {
      Int inv2 = (l + 1) / 2;  // 1/2 mod l
      Int s = (-num(E.a1()) % l) * inv2 % l;
      if (s < 0) s += l;
      apply(ModelMap(Rational(1), Rational(0), Rational(s), Rational(0)));
      Int inv2q = (lq2 + 1) / 2;  // 1/2 mod l^2
      Int t = (-num(E.a3()) % lq2) * inv2q % lq2;
      if (t < 0) t += lq2;
      apply(ModelMap(Rational(1), Rational(0), Rational(0), Rational(t)));
      if (!normalized(E)) throw std::logic_error("tate_algorithm: normalization failed");
    }

    // cubic P(T) = T^3 + (a2/l) T^2 + (a4/l^2) T + (a6/l^3) mod l; a repeated
    // root of a cubic is rational, so scanning rational roots finds it
    modp::ZPoly P = {detail::quo_mod(E.a6(), l, 3), detail::quo_mod(E.a4(), l, 2),
                     detail::quo_mod(E.a2(), l, 1), Int(1)};
    int rep_mult = 1;  // multiplicity of the repeated root, 1 if none
    Int theta = 0;
    for (const Int& r : modp::roots_mod_l(P, l)) {
      int mu = detail::root_multiplicity(P, r, l);
      if (mu > rep_mult) {
        rep_mult = mu;
        theta = r;
      }
    }

    if (rep_mult == 1) {
      Int c = 1 + Int(modp::roots_mod_l(P, l).size());
      finish(KodairaSymbol::I0star(), c, false, d);
      return res;
    }
    apply(ModelMap(Rational(1), Rational(theta * l), Rational(0), Rational(0)));

    if (rep_mult == 2) {
      // I_n* chain; model now has v(a2)=1, v(a3)>=2, v(a4)>=3, v(a6)>=4
      for (long q = 2;; ++q) {
        if (q > d) throw std::logic_error("tate_algorithm: I_n* chain did not terminate");
        Int alpha = detail::quo_mod(E.a3(), l, static_cast<unsigned>(q));
        Int beta = detail::quo_mod(E.a6(), l, static_cast<unsigned>(2 * q));
        bool dbl = (l == 2) ? (alpha % 2 == 0) : ((alpha * alpha + 4 * beta) % l == 0);
        if (!dbl) {
          modp::ZPoly quad = {-beta, alpha, Int(1)};
          Int c = modp::roots_mod_l(quad, l).empty() ? 2 : 4;
          finish(KodairaSymbol::Instar(2 * q - 3), c, false, d);
          return res;
        }
        Int y1;
        if (l == 2) y1 = beta % 2;
        else y1 = ((-alpha % l) * ((l + 1) / 2)) % l;
        if (y1 < 0) y1 += l;
        Int lq;
        mpz_pow_ui(lq.get_mpz_t(), l.get_mpz_t(), static_cast<unsigned long>(q));
        apply(ModelMap(Rational(1), Rational(0), Rational(0), Rational(y1 * lq)));

        Int a = detail::quo_mod(E.a2(), l, 1);
        Int b = detail::quo_mod(E.a4(), l, static_cast<unsigned>(q + 1));
        Int cc = detail::quo_mod(E.a6(), l, static_cast<unsigned>(2 * q + 1));
        bool dblB = (l == 2) ? (b % 2 == 0) : ((b * b - 4 * a * cc) % l == 0);
        if (!dblB) {
          modp::ZPoly quad = {cc, b, a};
          Int c = modp::roots_mod_l(quad, l).empty() ? 2 : 4;
          finish(KodairaSymbol::Instar(2 * q - 2), c, false, d);
          return res;
        }
        Int x1;
        if (l == 2) {
          x1 = cc % 2;  // double root of X^2 + c over F_2
        } else {
          Int inv;
          Int twoa = 2 * a % l;
          mpz_invert(inv.get_mpz_t(), twoa.get_mpz_t(), l.get_mpz_t());
          x1 = (-b % l) * inv % l;
        }
        if (x1 < 0) x1 += l;
        apply(ModelMap(Rational(1), Rational(x1 * lq), Rational(0), Rational(0)));
      }
    }

    // triple root: v(a2)>=2, v(a4)>=3, v(a6)>=4
    {
      Int alpha = detail::quo_mod(E.a3(), l, 2);
      Int beta = detail::quo_mod(E.a6(), l, 4);
      bool dbl = (l == 2) ? (alpha % 2 == 0) : ((alpha * alpha + 4 * beta) % l == 0);
      if (!dbl) {
        modp::ZPoly quad = {-beta, alpha, Int(1)};
        Int c = modp::roots_mod_l(quad, l).empty() ? 1 : 3;
        finish(KodairaSymbol::IVstar(), c, false, d);
        return res;
      }
      Int y1;
      if (l == 2) y1 = beta % 2;
      else y1 = ((-alpha % l) * ((l + 1) / 2)) % l;
      if (y1 < 0) y1 += l;
      apply(ModelMap(Rational(1), Rational(0), Rational(0), Rational(y1 * lq2)));

      if (vA(E.a4()) < 4) {
        finish(KodairaSymbol::IIIstar(), 2, false, d);
        return res;
      }
      if (vA(E.a6()) < 6) {
        finish(KodairaSymbol::IIstar(), 1, false, d);
        return res;
      }
      // non-minimal: rescale by u = l and start over
      apply(ModelMap(Rational(l), Rational(0), Rational(0), Rational(0)));
      if (!E.is_integral())
        throw std::logic_error("tate_algorithm: rescale left a fractional model");
    }
  }
}

// Clear denominators: a model map with u = 1/N making all a_i integral.
inline std::pair<Curve, ModelMap> integral_model(const Curve& e) {
  Int N = 1;
  for (auto& c : e.ainvs()) N = lcm(N, den(c));
  ModelMap m(Rational(1) / Rational(N), Rational(0), Rational(0), Rational(0));
  return {transformed(e, m), m};
}

// Globally minimal integral model with the standard normalization
// a1, a3 in {0,1} and a2 in {-1,0,1}.
inline std::pair<Curve, ModelMap> global_minimal_model(const Curve& e) {
  auto [E, acc] = integral_model(e);
  if (E.disc() != 0) {
    for (auto& [l, mult] : factorize(num(E.disc()))) {
      (void)mult;
      TateResult tr = tate_algorithm(E, l);
      E = tr.minimal;
      acc = acc.then(tr.to_minimal);
    }
  }
  auto fdiv = [](const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
  };
  Int s = -fdiv(num(E.a1()), 2);
  Int a2s = num(E.a2()) - s * num(E.a1()) - s * s;
  Int r = -fdiv(a2s + 1, 3);
  Int t = -fdiv(num(E.a3()) + r * num(E.a1()), 2);
  ModelMap fin(Rational(1), Rational(r), Rational(s), Rational(t));
  E = transformed(E, fin);
  return {E, acc.then(fin)};
}

// Primes of bad reduction (of the minimal model).
inline std::vector<Int> bad_primes(const Curve& e) {
  auto [E, m] = global_minimal_model(e);
  (void)m;
  std::vector<Int> out;
  Int d = num(E.disc());
  for (auto& [l, mult] : factorize(d)) {
    (void)mult;
    out.push_back(l);
  }
  return out;
}

// ---- point counts and reduction classes --------------------------------------

// #E(F_l) for a model with good reduction at l.
inline Int count_points(const Curve& e, const Int& l) {
  if (!e.is_integral()) throw std::invalid_argument("count_points: integral model required");
  if (detail::vl_int(e.disc(), l) != 0)
    throw std::invalid_argument("count_points: bad reduction at " + l.get_str());
  if (l > 20000000) throw std::invalid_argument("count_points: prime too large for enumeration");
  if (l == 2) {
    Int cnt = 1;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        Int v = num(e.a6()) + x * (num(e.a4()) + x * (num(e.a2()) + x)) - y * y -
                num(e.a1()) * x * y - num(e.a3()) * y;
        if (v % 2 == 0) ++cnt;
      }
    return cnt;
  }
  // z^2 = F(x) with z = 2y + a1 x + a3
  Int b2 = num(e.b2()) % l, b4 = num(e.b4()) % l, b6 = num(e.b6()) % l;
  Int cnt = l + 1;
  for (Int x = 0; x < l; ++x) {
    Int fx = (((4 * x + b2) * x + 2 * b4) * x + b6) % l;
    cnt += mpz_legendre(fx.get_mpz_t(), l.get_mpz_t());
  }
  return cnt;
}

inline Int frobenius_trace(const Curve& e, const Int& l) { return l + 1 - count_points(e, l); }

// Is jbar in F_l a supersingular j-invariant?
inline bool supersingular_j(const Int& jbar_in, const Int& l) {
  Int jbar = jbar_in % l;
  if (jbar < 0) jbar += l;
  if (l == 2 || l == 3) return jbar == 0;
  Int j1728 = Int(1728) % l;
  if (jbar == 0) return l % 3 == 2;
  if (jbar == j1728) return l % 4 == 3;
  // any curve with this j-invariant: y^2 = x^3 + 3j(1728-j) x + 2j(1728-j)^2
  Int w = (Int(1728) - jbar) % l;
  Curve ej(Rational(0), Rational(0), Rational(0), Rational(3 * jbar * w % l),
           Rational(2 * jbar * w % l * w % l));
  return frobenius_trace(ej, l) % l == 0;
}

enum class ReductionClass {
  GoodOrdinary,
  GoodSupersingular,
  SplitMultiplicative,
  NonsplitMultiplicative,
  Additive
};

inline std::string reduction_name(ReductionClass c) {
  switch (c) {
    case ReductionClass::GoodOrdinary: return "good ordinary";
    case ReductionClass::GoodSupersingular: return "good supersingular";
    case ReductionClass::SplitMultiplicative: return "split multiplicative";
    case ReductionClass::NonsplitMultiplicative: return "nonsplit multiplicative";
    case ReductionClass::Additive: return "additive";
  }
  return "?";
}

struct LocalData {
  Int l;
  KodairaSymbol type;
  long delta = 0;
  long f = 0;
  long m = 1;
  Int c = 1;
  ReductionClass cls = ReductionClass::GoodOrdinary;
  Curve minimal{Rational(0), Rational(0), Rational(0), Rational(0), Rational(1)};
  ModelMap to_minimal;
};

inline LocalData local_data(const Curve& e, const Int& l) {
  auto [E0, m0] = integral_model(e);
  TateResult tr = tate_algorithm(E0, l);
  LocalData out;
  out.l = l;
  out.type = tr.type;
  out.delta = tr.delta;
  out.f = tr.f;
  out.m = tr.m;
  out.c = tr.c;
  out.minimal = tr.minimal;
  out.to_minimal = m0.then(tr.to_minimal);
  if (tr.type.fam == KodairaSymbol::Family::I0) {
    out.cls = (frobenius_trace(tr.minimal, l) % l == 0) ? ReductionClass::GoodSupersingular
                                                        : ReductionClass::GoodOrdinary;
  } else if (tr.type.fam == KodairaSymbol::Family::In) {
    out.cls = tr.split ? ReductionClass::SplitMultiplicative
                       : ReductionClass::NonsplitMultiplicative;
  } else {
    out.cls = ReductionClass::Additive;
  }
  return out;
}

// For additive reduction: does the curve acquire multiplicative reduction
// over an extension (v(j) < 0), or good reduction?
inline bool potentially_multiplicative(const Curve& e, const Int& l) {
  Valuation v = val(e.j(), l);
  return v.is_finite() && v.v < 0;
}

// For potentially good reduction: ordinary or supersingular after base
// change, read off the reduction of j.
inline bool potentially_ordinary(const Curve& e, const Int& l) {
  Valuation v = val(e.j(), l);
  if (v.is_finite() && v.v < 0)
    throw std::invalid_argument("potentially_ordinary: curve is potentially multiplicative");
  Int jbar = 0;
  if (v.is_finite() && v.v == 0) jbar = unit_mod(e.j(), l, 1);
  return !supersingular_j(jbar, l);
}

// Additive reduction is tame exactly when the conductor exponent is 2.
inline bool tame_additive(const LocalData& d) {
  if (d.cls != ReductionClass::Additive) throw std::invalid_argument("tame_additive: not additive");
  return d.f == 2;
}

}  // namespace isoloc
