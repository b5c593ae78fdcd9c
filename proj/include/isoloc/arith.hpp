#pragma once

// Exact arithmetic helpers over Q: valuations, n-th powers, Hilbert symbols,
// Newton polygons and integer factorization. Everything here is exact; the
// only probabilistic piece is Miller-Rabin inside factorize(), used with
// enough rounds that a failure would be a hardware event, not a math one.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace isoloc {

using Int = mpz_class;
using Rational = mpq_class;

inline Int num(const Rational& q) { return Int(q.get_num()); }
inline Int den(const Rational& q) { return Int(q.get_den()); }

inline Rational make_rational(const Int& n, const Int& d) {
  if (d == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

// l-adic valuation; infinite flag encodes v(0) = +oo.
struct Valuation {
  long v = 0;
  bool infinite = false;

  bool operator==(const Valuation& o) const = default;
  bool is_finite() const { return !infinite; }
};

inline Valuation val_infinity() { return Valuation{0, true}; }

inline long val(const Int& n, const Int& l) {
  if (n == 0) throw std::invalid_argument("val: zero integer has infinite valuation");
  if (l < 2) throw std::invalid_argument("val: modulus must be a prime >= 2");
  Int rest;
  return static_cast<long>(mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), l.get_mpz_t()));
}

inline Valuation val(const Rational& x, const Int& l) {
  if (x == 0) return val_infinity();
  long v = val(num(x), l) - val(den(x), l);
  return Valuation{v, false};
}

// Unit part u of x = l^v * u (x nonzero).
inline Rational unit_part(const Rational& x, const Int& l) {
  if (x == 0) throw std::invalid_argument("unit_part of zero");
  Int n = num(x), d = den(x), rest;
  mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), l.get_mpz_t());
  n = rest;
  mpz_remove(rest.get_mpz_t(), d.get_mpz_t(), l.get_mpz_t());
  return make_rational(n, rest);
}

// Exact n-th root test over Q; returns the root with positive sign for even n.
inline std::optional<Rational> is_nth_power(const Rational& x, unsigned long n) {
  if (n == 0) throw std::invalid_argument("is_nth_power: n must be positive");
  if (x == 0) return Rational(0);
  if (x < 0 && n % 2 == 0) return std::nullopt;
  Int xn = num(x), xd = den(x);
  Int rn, rd;
  bool neg = xn < 0;
  Int a = abs(xn);
  if (!mpz_root(rn.get_mpz_t(), a.get_mpz_t(), n)) return std::nullopt;
  if (!mpz_root(rd.get_mpz_t(), xd.get_mpz_t(), n)) return std::nullopt;
  // mpz_root returns truncated roots; nonzero return means exact.
  if (neg) rn = -rn;
  return make_rational(rn, rd);
}

// Legendre symbol of a rational unit at an odd prime.
inline int legendre_unit(const Rational& u, const Int& l) {
  Int n = num(u), d = den(u);
  int s = mpz_legendre(n.get_mpz_t(), l.get_mpz_t()) * mpz_legendre(d.get_mpz_t(), l.get_mpz_t());
  if (s == 0) throw std::invalid_argument("legendre_unit: argument not an l-adic unit");
  return s;
}

// Residue of an l-adic unit modulo l^k (denominator inverted mod l^k).
inline Int unit_mod(const Rational& u, const Int& l, unsigned k) {
  Int m;
  mpz_pow_ui(m.get_mpz_t(), l.get_mpz_t(), k);
  Int d = den(u) % m, inv;
  if (!mpz_invert(inv.get_mpz_t(), d.get_mpz_t(), m.get_mpz_t()))
    throw std::invalid_argument("unit_mod: denominator not invertible");
  Int r = (num(u) % m) * inv % m;
  if (r < 0) r += m;
  return r;
}

inline bool is_square_in_Ql(const Rational& x, const Int& l) {
  if (x == 0) return true;
  Valuation v = val(x, l);
  if (v.v % 2 != 0) return false;
  Rational u = unit_part(x, l);
  if (l == 2) return unit_mod(u, 2, 3) == 1;
  return legendre_unit(u, l) == 1;
}

inline bool is_square_in_R(const Rational& x) { return x >= 0; }

// Hilbert symbol (a,b)_l over Q_l; l = 0 denotes the real place.
inline int hilbert_symbol(const Rational& a, const Rational& b, const Int& l) {
  if (a == 0 || b == 0) throw std::invalid_argument("hilbert_symbol: arguments must be nonzero");
  if (l == 0) return (a < 0 && b < 0) ? -1 : 1;
  if (l < 2) throw std::invalid_argument("hilbert_symbol: place must be 0 or a prime");
  long alpha = val(a, l).v, beta = val(b, l).v;
  Rational u = unit_part(a, l), v = unit_part(b, l);
  if (l == 2) {
    // (a,b)_2 = (-1)^{eps(u)eps(v) + alpha*omega(v) + beta*omega(u)}
    auto eps = [](const Int& r) { return ((r - 1) / 2) % 2 != 0; };     // r mod 8 in {1,3,5,7}
    auto omega = [](const Int& r) { return ((r * r - 1) / 8) % 2 != 0; };
    Int ru = unit_mod(u, 2, 3), rv = unit_mod(v, 2, 3);
    bool e = (eps(ru) && eps(rv)) ^ ((alpha % 2 != 0) && omega(rv)) ^ ((beta % 2 != 0) && omega(ru));
    return e ? -1 : 1;
  }
  int s = 1;
  if ((alpha % 2 != 0) && (beta % 2 != 0) && ((l - 1) / 2) % 2 != 0) s = -s;
  if (beta % 2 != 0) s *= legendre_unit(u, l);
  if (alpha % 2 != 0) s *= legendre_unit(v, l);
  return s;
}

// Lower Newton polygon. "Slopes" are reported as root valuations: an entry
// (s, m) means exactly m roots of valuation s in any splitting field of Q_l.
// Roots equal to zero (valuation +oo) are counted separately.
struct NewtonPolygon {
  std::vector<std::pair<long, Rational>> vertices;   // (index, valuation of coeff)
  std::vector<std::pair<Rational, long>> slopes;     // (root valuation, multiplicity)
  long zero_roots = 0;

  bool all_root_valuations_negative() const {
    if (zero_roots > 0) return false;
    for (auto& [s, m] : slopes)
      if (s >= 0) return false;
    return true;
  }
};

inline NewtonPolygon newton_polygon(const std::vector<Rational>& coeffs, const Int& l) {
  if (coeffs.empty() || coeffs.back() == 0)
    throw std::invalid_argument("newton_polygon: leading coefficient must be nonzero");
  NewtonPolygon np;
  long d = static_cast<long>(coeffs.size()) - 1;
  long i0 = 0;
  while (coeffs[static_cast<size_t>(i0)] == 0) ++i0;
  np.zero_roots = i0;
  // Monotone lower hull over the points (i, v(c_i)), skipping zero coefficients.
  std::vector<std::pair<long, Rational>> pts;
  for (long i = i0; i <= d; ++i) {
    const Rational& c = coeffs[static_cast<size_t>(i)];
    if (c == 0) continue;
    pts.emplace_back(i, Rational(val(c, l).v));
  }
  std::vector<std::pair<long, Rational>>& hull = np.vertices;
  for (auto& p : pts) {
    while (hull.size() >= 2) {
      auto& a = hull[hull.size() - 2];
      auto& b = hull[hull.size() - 1];
      // pop b when it lies on or above the segment a-p
      if ((b.second - a.second) * (p.first - a.first) >= (p.second - a.second) * (b.first - a.first))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  for (size_t k = 0; k + 1 < hull.size(); ++k) {
    Rational slope = (hull[k + 1].second - hull[k].second) / Rational(hull[k + 1].first - hull[k].first);
    long mult = hull[k + 1].first - hull[k].first;
    np.slopes.emplace_back(-slope, mult);   // root valuation = -(hull slope)
  }
  std::sort(np.slopes.begin(), np.slopes.end(),
            [](auto& a, auto& b) { return a.first < b.first; });
  // merge equal valuations
  std::vector<std::pair<Rational, long>> merged;
  for (auto& s : np.slopes) {
    if (!merged.empty() && merged.back().first == s.first)
      merged.back().second += s.second;
    else
      merged.push_back(s);
  }
  np.slopes = std::move(merged);
  return np;
}

// ---- integer factorization -------------------------------------------------

inline bool is_probable_prime(const Int& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

namespace detail {

inline Int pollard_rho(const Int& n) {
  // Brent's cycle variant; n odd composite, not a prime power obstacle here.
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(0xD1B54A32D192ED03ULL);
  while (true) {
    Int c = rng.get_z_range(n - 3) + 1;
    Int x = rng.get_z_range(n), y = x, d = 1;
    Int saved_x, saved_y;
    int power = 1, lam = 0;
    while (d == 1) {
      if (lam == power) {
        x = y;
        power *= 2;
        lam = 0;
      }
      y = (y * y + c) % n;
      ++lam;
      d = gcd(abs(x - y), n);
    }
    if (d != n) return d;
  }
}

inline void factor_into(Int n, std::map<Int, int>& out) {
  if (n <= 1) return;
  if (is_probable_prime(n)) {
    out[n] += 1;
    return;
  }
  // perfect-power shortcut speeds up rho on squares
  if (mpz_perfect_square_p(n.get_mpz_t())) {
    Int r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    std::map<Int, int> sub;
    factor_into(r, sub);
    for (auto& [p, e] : sub) out[p] += 2 * e;
    return;
  }
  Int d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace detail

// Prime factorization of |n| by trial division up to 10^6 then Pollard rho.
inline std::vector<std::pair<Int, int>> factorize(const Int& n_in) {
  if (n_in == 0) throw std::invalid_argument("factorize: zero");
  Int n = abs(n_in);
  std::map<Int, int> fac;
  for (long p : {2L, 3L, 5L}) {
    while (n % p == 0) {
      fac[p] += 1;
      n /= p;
    }
  }
  // 2,3,5-wheel trial division
  static const int wheel[] = {4, 2, 4, 2, 4, 6, 2, 6};
  long d = 7;
  int wi = 0;
  while (d <= 1000000 && n > 1) {
    if (Int(d) * d > n) break;
    while (n % d == 0) {
      fac[d] += 1;
      n /= d;
    }
    d += wheel[wi];
    wi = (wi + 1) % 8;
  }
  if (n > 1) {
    if (Int(d) * d > n || is_probable_prime(n))
      fac[n] += 1;
    else
      detail::factor_into(n, fac);
  }
  return {fac.begin(), fac.end()};
}

// Smallest positive quadratic non-residue mod an odd prime.
inline Int least_nonresidue(const Int& l) {
  for (Int n = 2;; ++n)
    if (mpz_legendre(n.get_mpz_t(), l.get_mpz_t()) == -1) return n;
}

// Rational reconstruction: find n/d with u = n/d mod m, |n| <= nbound, 0 < d <= dbound.
inline std::optional<Rational> rational_reconstruct(const Int& u_in, const Int& m,
                                                    const Int& nbound, const Int& dbound) {
  Int u = u_in % m;
  if (u < 0) u += m;
  Int r0 = m, r1 = u, t0 = 0, t1 = 1;
  while (r1 > nbound) {
    Int q = r0 / r1;
    Int r2 = r0 - q * r1, t2 = t0 - q * t1;
    r0 = r1;
    r1 = r2;
    t0 = t1;
    t1 = t2;
  }
  if (t1 == 0) return std::nullopt;
  if (abs(t1) > dbound) return std::nullopt;
  if (gcd(r1, t1) != 1) return std::nullopt;
  Rational q = make_rational(t1 < 0 ? -r1 : r1, abs(t1));
  // verify: q = u mod m
  Int check = (num(q) - u * den(q)) % m;
  if (check != 0) return std::nullopt;
  return q;
}

}  // namespace isoloc
