#pragma once

// Dense univariate polynomials over Q. Small degrees throughout (division
// polynomials cap out at a few dozen), so schoolbook arithmetic is fine.

#include <isoloc/arith.hpp>

#include <cassert>
#include <functional>

namespace isoloc {

class Poly {
 public:
  Poly() = default;
  explicit Poly(const Rational& c) : c_{c} { trim(); }
  explicit Poly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Poly x() { return Poly({Rational(0), Rational(1)}); }
  static Poly from_roots(const std::vector<Rational>& roots) {
    Poly p(Rational(1));
    for (auto& r : roots) p = p * Poly({-r, Rational(1)});
    return p;
  }

  long degree() const { return static_cast<long>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rational>& coeffs() const { return c_; }
  Rational coeff(long i) const {
    return (i >= 0 && i < static_cast<long>(c_.size())) ? c_[static_cast<size_t>(i)] : Rational(0);
  }
  Rational lc() const {
    if (is_zero()) throw std::invalid_argument("lc of zero polynomial");
    return c_.back();
  }
  bool is_monic() const { return !is_zero() && c_.back() == 1; }

  Poly operator-() const {
    Poly r = *this;
    for (auto& a : r.c_) a = -a;
    return r;
  }
  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()), Rational(0));
    for (size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return Poly(std::move(c));
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<Rational> c(a.c_.size() + b.c_.size() - 1, Rational(0));
    for (size_t i = 0; i < a.c_.size(); ++i)
      for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(c));
  }
  friend Poly operator*(const Rational& s, const Poly& a) {
    Poly r = a;
    for (auto& x : r.c_) x *= s;
    r.trim();
    return r;
  }
  bool operator==(const Poly& o) const { return c_ == o.c_; }

  // Euclidean division over Q.
  friend std::pair<Poly, Poly> divrem(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw std::invalid_argument("polynomial division by zero");
    Poly r = a;
    std::vector<Rational> q(std::max<long>(a.degree() - b.degree() + 1, 0), Rational(0));
    while (!r.is_zero() && r.degree() >= b.degree()) {
      Rational f = r.lc() / b.lc();
      long k = r.degree() - b.degree();
      q[static_cast<size_t>(k)] = f;
      for (long i = 0; i <= b.degree(); ++i)
        r.c_[static_cast<size_t>(i + k)] -= f * b.c_[static_cast<size_t>(i)];
      r.trim();
    }
    return {Poly(std::move(q)), r};
  }
  friend Poly operator/(const Poly& a, const Poly& b) { return divrem(a, b).first; }
  friend Poly operator%(const Poly& a, const Poly& b) { return divrem(a, b).second; }

  bool divides(const Poly& a) const { return divrem(a, *this).second.is_zero(); }

  Poly derivative() const {
    if (c_.size() <= 1) return Poly();
    std::vector<Rational> d(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = Rational(static_cast<long>(i)) * c_[i];
    return Poly(std::move(d));
  }

  Rational eval(const Rational& x) const {
    Rational r(0);
    for (size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
    return r;
  }

  Poly monic() const {
    if (is_zero()) return *this;
    return (Rational(1) / lc()) * (*this);
  }

  // Substitute x -> s*x + r.
  Poly compose_linear(const Rational& s, const Rational& r) const {
    Poly acc, pw(Rational(1)), lin({r, s});
    for (size_t i = 0; i < c_.size(); ++i) {
      acc = acc + c_[i] * pw;
      pw = pw * lin;
    }
    return acc;
  }

  // Power sums p_1..p_k of the roots via Newton's identities (monic input).
  std::vector<Rational> power_sums(long k) const {
    if (!is_monic()) throw std::invalid_argument("power_sums wants a monic polynomial");
    long d = degree();
    // e_i with sign: coeff(x^{d-i}) = (-1)^i e_i
    std::vector<Rational> e(static_cast<size_t>(d) + 1, Rational(0));
    for (long i = 0; i <= d; ++i) {
      Rational v = coeff(d - i);
      e[static_cast<size_t>(i)] = (i % 2 == 0) ? v : -v;
    }
    std::vector<Rational> p(static_cast<size_t>(k) + 1, Rational(0));
    for (long n = 1; n <= k; ++n) {
      Rational s(0);
      for (long i = 1; i < n; ++i)
        if (i <= d) s += ((i % 2 == 1) ? e[static_cast<size_t>(i)] : -e[static_cast<size_t>(i)]) *
                         p[static_cast<size_t>(n - i)];
      Rational en = (n <= d) ? e[static_cast<size_t>(n)] : Rational(0);
      Rational term = ((n % 2 == 1) ? en : -en) * Rational(n);
      p[static_cast<size_t>(n)] = s + term;
    }
    return p;
  }

  std::string to_string(const std::string& var = "x") const {
    if (is_zero()) return "0";
    std::string s;
    for (long i = degree(); i >= 0; --i) {
      Rational a = coeff(i);
      if (a == 0) continue;
      if (!s.empty()) s += (a > 0) ? " + " : " - ";
      else if (a < 0) s += "-";
      Rational m = abs(a);
      bool unit = (m == 1) && i > 0;
      if (!unit) s += m.get_str();
      if (i > 0) {
        if (!unit) s += "*";
        s += var;
        if (i > 1) s += "^" + std::to_string(i);
      }
    }
    return s;
  }

 private:
  std::vector<Rational> c_;
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
};

inline Poly gcd(const Poly& a, const Poly& b) {
  Poly x = a, y = b;
  while (!y.is_zero()) {
    Poly r = x % y;
    x = y;
    y = r;
  }
  return x.is_zero() ? x : x.monic();
}

inline Poly squarefree_part(const Poly& f) {
  if (f.degree() <= 0) return f.monic();
  return (f / gcd(f, f.derivative())).monic();
}

// Clears denominators and removes integer content; sign of lc preserved.
inline Poly primitive_integer_part(const Poly& f) {
  if (f.is_zero()) return f;
  Int d = 1;
  for (auto& c : f.coeffs()) d = lcm(d, den(c));
  Int g = 0;
  std::vector<Rational> out;
  out.reserve(f.coeffs().size());
  for (auto& c : f.coeffs()) {
    Rational v = c * Rational(d);
    out.push_back(v);
    g = gcd(g, num(v));
  }
  if (g == 0) g = 1;
  for (auto& c : out) c /= Rational(g);
  return Poly(std::move(out));
}

// ---- real root machinery (Sturm) -------------------------------------------

inline std::vector<Poly> sturm_chain(const Poly& f) {
  std::vector<Poly> chain;
  Poly a = squarefree_part(f);
  if (a.degree() <= 0) return chain;
  chain.push_back(a);
  chain.push_back(a.derivative());
  while (!chain.back().is_zero() && chain.back().degree() > 0) {
    Poly r = chain[chain.size() - 2] % chain.back();
    if (r.is_zero()) break;
    chain.push_back(-r);
  }
  return chain;
}

namespace detail {
inline int sign_at(const Poly& p, const Rational& x) {
  Rational v = p.eval(x);
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}
inline int sign_at_inf(const Poly& p, int dir) {
  if (p.is_zero()) return 0;
  int s = p.lc() > 0 ? 1 : -1;
  if (dir < 0 && p.degree() % 2 == 1) s = -s;
  return s;
}
inline int sign_changes(const std::vector<int>& signs) {
  int n = 0, last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++n;
    last = s;
  }
  return n;
}
}  // namespace detail

// Number of distinct real roots in (a, b]; pass nullopt for -oo / +oo.
inline int count_real_roots(const Poly& f, std::optional<Rational> a, std::optional<Rational> b) {
  auto chain = sturm_chain(f);
  if (chain.empty()) return 0;
  std::vector<int> sa, sb;
  for (auto& p : chain) {
    sa.push_back(a ? detail::sign_at(p, *a) : detail::sign_at_inf(p, -1));
    sb.push_back(b ? detail::sign_at(p, *b) : detail::sign_at_inf(p, +1));
  }
  return detail::sign_changes(sa) - detail::sign_changes(sb);
}

inline int count_real_roots(const Poly& f) { return count_real_roots(f, std::nullopt, std::nullopt); }

// Cauchy bound: all real roots lie in [-B, B].
inline Rational root_bound(const Poly& f) {
  if (f.degree() <= 0) return Rational(1);
  Rational m(0);
  for (long i = 0; i < f.degree(); ++i) {
    Rational t = abs(f.coeff(i) / f.lc());
    if (t > m) m = t;
  }
  return m + 1;
}

// Isolating intervals (a,b] for the distinct real roots of f, by bisection.
inline std::vector<std::pair<Rational, Rational>> isolate_real_roots(const Poly& f) {
  std::vector<std::pair<Rational, Rational>> out;
  int total = count_real_roots(f);
  if (total == 0) return out;
  Rational B = root_bound(f);
  std::function<void(Rational, Rational, int)> rec = [&](Rational lo, Rational hi, int k) {
    if (k == 0) return;
    if (k == 1) {
      out.emplace_back(lo, hi);
      return;
    }
    Rational mid = (lo + hi) / 2;
    int left = count_real_roots(f, lo, mid);
    rec(lo, mid, left);
    rec(mid, hi, k - left);
  };
  rec(-B, B, total);
  std::sort(out.begin(), out.end());
  return out;
}

// Shrink an isolating interval of squarefree f until width <= eps. If a
// bisection midpoint is an exact root the interval collapses to a point.
inline std::pair<Rational, Rational> refine_root(const Poly& f, std::pair<Rational, Rational> iv,
                                                 const Rational& eps) {
  while (iv.second - iv.first > eps) {
    Rational mid = (iv.first + iv.second) / 2;
    if (f.eval(mid) == 0) return {mid, mid};
    if (count_real_roots(f, iv.first, mid) == 1)
      iv.second = mid;
    else
      iv.first = mid;
  }
  return iv;
}

namespace detail {
inline Rational floor_q(const Rational& x) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), num(x).get_mpz_t(), den(x).get_mpz_t());
  return Rational(q);
}
// Simplest rational (minimal denominator) in the closed interval [lo, hi].
inline Rational simplest_in(const Rational& lo, const Rational& hi) {
  Rational fl = floor_q(lo);
  if (fl >= lo) return fl;            // lo is an integer
  if (fl + 1 <= hi) return fl + 1;    // an integer lies inside
  return fl + Rational(1) / simplest_in(Rational(1) / (hi - fl), Rational(1) / (lo - fl));
}
}  // namespace detail

// All rational roots of f, each exactly verified. Denominator bound comes
// from the rational root theorem on the primitive integer model of f.
inline std::vector<Rational> rational_roots(const Poly& f_in) {
  std::vector<Rational> roots;
  if (f_in.is_zero()) throw std::invalid_argument("rational_roots of zero polynomial");
  Poly f = squarefree_part(f_in);
  if (f.degree() <= 0) return roots;
  Int dlim = abs(num(primitive_integer_part(f).lc()));
  // two distinct rationals with denominators <= dlim differ by >= 1/dlim^2
  Rational eps = Rational(1) / Rational(2 * dlim * dlim);
  for (auto iv : isolate_real_roots(f)) {
    iv = refine_root(f, iv, eps);
    if (iv.first == iv.second) {
      roots.push_back(iv.first);
      continue;
    }
    Rational cand = detail::simplest_in(iv.first, iv.second);
    if (den(cand) <= dlim && f.eval(cand) == 0) roots.push_back(cand);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace isoloc
