#pragma once

// Polynomial arithmetic mod primes and prime powers: factorization over F_q,
// quadratic Hensel lifting, degree-targeted divisor search over Z (the
// engine behind isogeny-kernel discovery), and l-adic root finding.

#include <isoloc/qpoly.hpp>

#include <numeric>

namespace isoloc {
namespace modp {

using ZPoly = std::vector<Int>;  // dense, ascending, reduced mod the ambient modulus

inline void trim(ZPoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline ZPoly reduce(const ZPoly& f, const Int& m) {
  ZPoly r(f.size());
  for (size_t i = 0; i < f.size(); ++i) {
    r[i] = f[i] % m;
    if (r[i] < 0) r[i] += m;
  }
  trim(r);
  return r;
}

inline long deg(const ZPoly& f) { return static_cast<long>(f.size()) - 1; }

inline ZPoly add(const ZPoly& a, const ZPoly& b, const Int& m) {
  ZPoly c(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) c[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) c[i] += b[i];
  return reduce(c, m);
}

inline ZPoly sub(const ZPoly& a, const ZPoly& b, const Int& m) {
  ZPoly c(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) c[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) c[i] -= b[i];
  return reduce(c, m);
}

inline ZPoly mul(const ZPoly& a, const ZPoly& b, const Int& m) {
  if (a.empty() || b.empty()) return {};
  ZPoly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return reduce(c, m);
}

inline ZPoly scale(const Int& s, const ZPoly& a, const Int& m) {
  ZPoly c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[i] * s;
  return reduce(c, m);
}

// Division with remainder; requires lc(b) invertible mod m.
inline std::pair<ZPoly, ZPoly> divrem(const ZPoly& a, const ZPoly& b, const Int& m) {
  if (b.empty()) throw std::invalid_argument("mod-m division by zero polynomial");
  Int inv;
  if (!mpz_invert(inv.get_mpz_t(), b.back().get_mpz_t(), m.get_mpz_t()))
    throw std::invalid_argument("mod-m division: leading coefficient not invertible");
  ZPoly r = a;
  long db = deg(b);
  if (deg(a) < db) return {{}, reduce(a, m)};
  ZPoly q(static_cast<size_t>(deg(a) - db) + 1, 0);
  for (long k = deg(a) - db; k >= 0; --k) {
    if (deg(r) != db + k) continue;
    Int f = r.back() * inv % m;
    q[static_cast<size_t>(k)] = f;
    for (long i = 0; i <= db; ++i) {
      size_t idx = static_cast<size_t>(i + k);
      r[idx] = (r[idx] - f * b[static_cast<size_t>(i)]) % m;
    }
    trim(r);
    r = reduce(r, m);
  }
  trim(q);
  return {reduce(q, m), r};
}

inline ZPoly rem(const ZPoly& a, const ZPoly& b, const Int& m) { return divrem(a, b, m).second; }

inline ZPoly monic(const ZPoly& f, const Int& m) {
  if (f.empty()) return f;
  Int inv;
  if (!mpz_invert(inv.get_mpz_t(), f.back().get_mpz_t(), m.get_mpz_t()))
    throw std::invalid_argument("monic: leading coefficient not invertible");
  return scale(inv, f, m);
}

// gcd over F_l (l prime), returned monic.
inline ZPoly gcd_mod(ZPoly a, ZPoly b, const Int& l) {
  a = reduce(a, l);
  b = reduce(b, l);
  while (!b.empty()) {
    ZPoly r = rem(a, b, l);
    a = std::move(b);
    b = std::move(r);
  }
  return a.empty() ? a : monic(a, l);
}

// Extended Euclid over F_l: s,t with s*a + t*b = 1 (a, b coprime).
inline std::pair<ZPoly, ZPoly> bezout_mod(const ZPoly& a, const ZPoly& b, const Int& l) {
  ZPoly r0 = reduce(a, l), r1 = reduce(b, l);
  ZPoly s0 = {Int(1)}, s1 = {}, t0 = {}, t1 = {Int(1)};
  while (!r1.empty()) {
    auto [q, r2] = divrem(r0, r1, l);
    ZPoly s2 = sub(s0, mul(q, s1, l), l);
    ZPoly t2 = sub(t0, mul(q, t1, l), l);
    r0 = std::move(r1); r1 = std::move(r2);
    s0 = std::move(s1); s1 = std::move(s2);
    t0 = std::move(t1); t1 = std::move(t2);
  }
  if (deg(r0) != 0) throw std::invalid_argument("bezout_mod: inputs not coprime");
  Int inv;
  mpz_invert(inv.get_mpz_t(), r0[0].get_mpz_t(), l.get_mpz_t());
  return {scale(inv, s0, l), scale(inv, t0, l)};
}

inline ZPoly derivative(const ZPoly& f, const Int& m) {
  if (f.size() <= 1) return {};
  ZPoly d(f.size() - 1);
  for (size_t i = 1; i < f.size(); ++i) d[i - 1] = f[i] * static_cast<long>(i);
  return reduce(d, m);
}

inline Int eval_mod(const ZPoly& f, const Int& x, const Int& m) {
  Int r = 0;
  for (size_t i = f.size(); i-- > 0;) r = (r * x + f[i]) % m;
  if (r < 0) r += m;
  return r;
}

// base^e mod (f, m); base reduced mod f first.
inline ZPoly powmod(ZPoly base, Int e, const ZPoly& f, const Int& m) {
  ZPoly result = {Int(1)};
  base = rem(base, f, m);
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) result = rem(mul(result, base, m), f, m);
    base = rem(mul(base, base, m), f, m);
    e >>= 1;
  }
  return result;
}

inline bool is_squarefree_mod(const ZPoly& f, const Int& l) {
  ZPoly fl = reduce(f, l);
  if (deg(fl) < 1) return false;
  return deg(gcd_mod(fl, derivative(fl, l), l)) == 0;
}

// deterministic little generator for equal-degree splitting
struct SplitRng {
  uint64_t s = 0x9E3779B97F4A7C15ULL;
  uint64_t next() {
    s ^= s << 13; s ^= s >> 7; s ^= s << 17;
    return s;
  }
};

// All roots of f in F_l (f arbitrary, not identically zero mod l).
inline std::vector<Int> roots_mod_l(const ZPoly& f_in, const Int& l) {
  ZPoly f = reduce(f_in, l);
  std::vector<Int> roots;
  if (f.empty()) throw std::invalid_argument("roots_mod_l: polynomial vanishes mod l");
  if (deg(f) == 0) return roots;
  if (l < 32) {
    for (Int x = 0; x < l; ++x)
      if (eval_mod(f, x, l) == 0) roots.push_back(x);
    return roots;
  }
  // split off the product of distinct linear factors: gcd(f, x^l - x)
  ZPoly x = {Int(0), Int(1)};
  ZPoly xl = powmod(x, l, f, l);
  ZPoly g = gcd_mod(f, sub(xl, x, l), l);
  SplitRng rng;
  std::function<void(ZPoly)> split = [&](ZPoly h) {
    if (deg(h) == 0) return;
    if (deg(h) == 1) {
      Int r = (l - h[0] % l) % l;  // monic: x + c
      roots.push_back(r * 1 % l);
      return;
    }
    while (true) {
      Int a = Int(rng.next()) % l;
      ZPoly probe = {a, Int(1)};
      ZPoly w = powmod(probe, (l - 1) / 2, h, l);
      ZPoly w1 = sub(w, {Int(1)}, l);
      ZPoly d = gcd_mod(h, w1, l);
      if (deg(d) > 0 && deg(d) < deg(h)) {
        split(d);
        split(divrem(h, d, l).first);
        return;
      }
    }
  };
  split(g);
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Monic irreducible factorization over F_l via distinct-degree + equal-degree
// splitting. Requires f squarefree mod l; l odd.
inline std::vector<ZPoly> factor_mod_l(const ZPoly& f_in, const Int& l) {
  if (l == 2) throw std::invalid_argument("factor_mod_l: use an odd prime");
  ZPoly f = monic(reduce(f_in, l), l);
  std::vector<ZPoly> out;
  ZPoly x = {Int(0), Int(1)};
  ZPoly h = x;  // x^(l^i) mod f, running
  SplitRng rng;
  std::function<void(const ZPoly&, long)> edf = [&](const ZPoly& g, long d) {
    if (deg(g) == static_cast<long>(d)) {
      out.push_back(g);
      return;
    }
    Int ld;
    mpz_pow_ui(ld.get_mpz_t(), l.get_mpz_t(), static_cast<unsigned long>(d));
    Int e = (ld - 1) / 2;
    while (true) {
      ZPoly r(static_cast<size_t>(deg(g)), 0);
      for (auto& c : r) c = Int(rng.next()) % l;
      trim(r);
      if (r.empty()) continue;
      ZPoly w = sub(powmod(r, e, g, l), {Int(1)}, l);
      ZPoly dgcd = gcd_mod(g, w, l);
      if (deg(dgcd) > 0 && deg(dgcd) < deg(g)) {
        edf(dgcd, d);
        edf(divrem(g, dgcd, l).first, d);
        return;
      }
    }
  };
  long i = 0;
  while (deg(f) > 0) {
    ++i;
    if (2 * i > deg(f)) {
      out.push_back(f);
      break;
    }
    h = powmod(h, l, f, l);
    ZPoly g = gcd_mod(f, sub(h, x, l), l);
    if (deg(g) > 0) {
      edf(g, i);
      f = divrem(f, g, l).first;
      h = rem(h, f, l);
    }
  }
  return out;
}

// One quadratic Hensel step: f = g*h (mod m), s*g + t*h = 1 (mod m), all monic
// except s,t; returns the lifted tuple mod m^2.
struct HenselPair {
  ZPoly g, h, s, t;
};

inline HenselPair hensel_step(const ZPoly& f, const HenselPair& p, const Int& m) {
  Int m2 = m * m;
  ZPoly e = sub(reduce(f, m2), mul(p.g, p.h, m2), m2);
  ZPoly gstar = add(p.g, rem(mul(p.t, e, m2), p.g, m2), m2);
  ZPoly hstar = add(p.h, rem(mul(p.s, e, m2), p.h, m2), m2);
  ZPoly b = sub(add(mul(p.s, gstar, m2), mul(p.t, hstar, m2), m2), {Int(1)}, m2);
  ZPoly sstar = sub(p.s, rem(mul(p.s, b, m2), hstar, m2), m2);
  ZPoly tstar = sub(p.t, rem(mul(p.t, b, m2), gstar, m2), m2);
  return {gstar, hstar, sstar, tstar};
}

// Lift the split f = (prod left)(prod right) from mod l to mod M (M = l^(2^k) >= target).
// Returns all leaf factors lifted mod M, in the input order.
inline void hensel_tree(const ZPoly& f, const std::vector<ZPoly>& factors, size_t lo, size_t hi,
                        const Int& l, const Int& M, std::vector<ZPoly>& out) {
  if (hi - lo == 1) {
    out.push_back(reduce(f, M));
    return;
  }
  size_t mid = lo + (hi - lo) / 2;
  ZPoly g = {Int(1)}, h = {Int(1)};
  for (size_t i = lo; i < mid; ++i) g = mul(g, factors[i], l);
  for (size_t i = mid; i < hi; ++i) h = mul(h, factors[i], l);
  auto [s, t] = bezout_mod(g, h, l);
  HenselPair p{g, h, s, t};
  Int m = l;
  while (m < M) {
    p = hensel_step(f, p, m);
    m = m * m;
  }
  // p is now valid mod m >= M; renormalize to M
  hensel_tree(reduce(p.g, M), factors, lo, mid, l, M, out);
  hensel_tree(reduce(p.h, M), factors, mid, hi, l, M, out);
}

inline Int symmetric_rep(const Int& a, const Int& m) {
  Int r = a % m;
  if (r < 0) r += m;
  if (2 * r > m) r -= m;
  return r;
}

}  // namespace modp

// All monic integer divisors of given degree of a monic squarefree integer
// polynomial, by Zassenhaus-style modular factoring and subset recombination.
inline std::vector<Poly> monic_integer_divisors(const Poly& f, long degree_target) {
  if (!f.is_monic()) throw std::invalid_argument("monic_integer_divisors: monic input required");
  for (auto& c : f.coeffs())
    if (den(c) != 1) throw std::invalid_argument("monic_integer_divisors: integer input required");
  std::vector<Poly> found;
  if (degree_target <= 0 || degree_target > f.degree()) return found;
  if (degree_target == f.degree()) {
    found.push_back(f);
    return found;
  }
  // choose an odd prime keeping f squarefree
  modp::ZPoly zf(f.coeffs().size());
  for (size_t i = 0; i < zf.size(); ++i) zf[i] = num(f.coeff(static_cast<long>(i)));
  Int q = 0;
  for (long cand : {1000003L, 1000033L, 1000037L, 1000039L, 1000081L, 1000099L,
                    1000117L, 1000121L, 1000133L, 1000151L, 2000003L, 2000029L}) {
    if (modp::is_squarefree_mod(zf, cand)) {
      q = cand;
      break;
    }
  }
  if (q == 0) throw std::runtime_error("monic_integer_divisors: no good reduction prime found");

  auto irr = modp::factor_mod_l(zf, q);
  // coefficient bound for monic divisors (coarse Mignotte-style)
  Int maxc = 1;
  for (auto& c : f.coeffs()) {
    Int t = abs(num(c));
    if (t > maxc) maxc = t;
  }
  Int B = (Int(f.degree()) + 1) * maxc;
  mpz_mul_2exp(B.get_mpz_t(), B.get_mpz_t(), static_cast<mp_bitcnt_t>(f.degree() + 1));
  Int M = q;
  while (M < 2 * B + 1) M = M * M;
  std::vector<modp::ZPoly> lifted;
  modp::hensel_tree(modp::reduce(zf, M), irr, 0, irr.size(), q, M, lifted);

  // enumerate subsets with degree sum = degree_target
  size_t n = lifted.size();
  std::vector<size_t> pick;
  std::function<void(size_t, long)> rec = [&](size_t i, long need) {
    if (need == 0) {
      modp::ZPoly prod = {Int(1)};
      for (size_t j : pick) prod = modp::mul(prod, lifted[j], M);
      std::vector<Rational> coeffs(prod.size());
      for (size_t j = 0; j < prod.size(); ++j) coeffs[j] = Rational(modp::symmetric_rep(prod[j], M));
      Poly cand(std::move(coeffs));
      if (cand.degree() == degree_target && cand.divides(f)) found.push_back(cand);
      return;
    }
    if (i >= n) return;
    long remaining = 0;
    for (size_t j = i; j < n; ++j) remaining += modp::deg(lifted[j]);
    if (remaining < need) return;
    if (modp::deg(lifted[i]) <= need) {
      pick.push_back(i);
      rec(i + 1, need - modp::deg(lifted[i]));
      pick.pop_back();
    }
    rec(i + 1, need);
  };
  rec(0, degree_target);
  std::sort(found.begin(), found.end(),
            [](const Poly& a, const Poly& b) { return a.coeffs() < b.coeffs(); });
  found.erase(std::unique(found.begin(), found.end()), found.end());
  return found;
}

// Monic rational divisors of given degree of an arbitrary squarefree f in Q[x],
// via the monic integer model F(y) = c^(d-1) f(y/c), c = lc of the primitive part.
inline std::vector<Poly> monic_rational_divisors(const Poly& f_in, long degree_target) {
  Poly zp = primitive_integer_part(f_in);
  Rational c = zp.lc();
  long d = zp.degree();
  std::vector<Rational> F(static_cast<size_t>(d) + 1);
  // F monic integer: F(y) = c^(d-1) f(y/c), so coeff_i(F) = coeff_i(f) * c^(d-1-i)
  F[static_cast<size_t>(d)] = 1;
  Rational pw(1);
  for (long i = d - 1; i >= 0; --i) {
    F[static_cast<size_t>(i)] = zp.coeff(i) * pw;
    pw *= c;
  }
  std::vector<Poly> out;
  for (auto& G : monic_integer_divisors(Poly(std::move(F)), degree_target)) {
    // g(x) = G(c x) / c^k
    Poly g = G.compose_linear(c, Rational(0));
    out.push_back(g.monic());
  }
  return out;
}

// ---- l-adic roots -----------------------------------------------------------

// Representatives mod l^K of all roots of f in Z_l. Throws if existence cannot
// be certified at the requested precision (caller retries with larger K).
inline std::vector<Int> zl_roots(const Poly& f_in, const Int& l, unsigned K) {
  Poly zp = primitive_integer_part(squarefree_part(f_in));
  modp::ZPoly f(zp.coeffs().size());
  for (size_t i = 0; i < f.size(); ++i) f[i] = num(zp.coeff(static_cast<long>(i)));
  Int lK;
  mpz_pow_ui(lK.get_mpz_t(), l.get_mpz_t(), K);
  std::vector<Int> out;
  // recursive cluster refinement: F tracks f(r + l^k y) / l^content
  std::function<void(const Int&, unsigned, const modp::ZPoly&)> rec =
      [&](const Int& r, unsigned k, const modp::ZPoly& F) {
        if (k >= K) {
          // certify via Hensel: v(f(r)) >= K and 2 v(f'(r)) < K
          Int fr = modp::eval_mod(f, r, lK);
          Int dfr = modp::eval_mod(modp::derivative(f, lK * l), r, lK);
          long vdf = (dfr == 0) ? static_cast<long>(K) : val(dfr, l);
          if (fr == 0 && 2 * vdf < static_cast<long>(K)) {
            out.push_back(r);
            return;
          }
          throw std::runtime_error("zl_roots: precision too small to certify root");
        }
        for (auto& t : modp::roots_mod_l(F, l)) {
          // G(y) = F(t + l y) / l^content
          modp::ZPoly G(F.size(), 0);
          // expand via Horner on (t + l y)
          for (size_t i = F.size(); i-- > 0;) {
            // G = G * (t + l y) + F[i]
            modp::ZPoly next(G.size() + 1, 0);
            for (size_t j = 0; j < G.size(); ++j) {
              next[j] += G[j] * t;
              next[j + 1] += G[j] * l;
            }
            next[0] += F[i];
            modp::trim(next);
            G = std::move(next);
          }
          long vmin = -1;
          for (auto& c : G)
            if (c != 0) vmin = (vmin < 0) ? val(c, l) : std::min(vmin, val(c, l));
          if (vmin < 0) {
            // F(t + l y) identically zero: cannot happen for nonzero F
            throw std::runtime_error("zl_roots: degenerate cluster");
          }
          Int shift;
          mpz_pow_ui(shift.get_mpz_t(), l.get_mpz_t(), static_cast<unsigned long>(vmin));
          for (auto& c : G) c /= shift;
          Int pk;
          mpz_pow_ui(pk.get_mpz_t(), l.get_mpz_t(), k);
          rec(r + t * pk, k + 1, G);
        }
      };
  rec(0, 0, f);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace isoloc
