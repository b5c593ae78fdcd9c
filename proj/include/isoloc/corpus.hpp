#pragma once

// Corpus plumbing: line-delimited JSON records describing isogenous pairs,
// realization of records into actual isogenies, and the seeded generators
// that mass-produce 2- and 3-isogeny families.

#include <array>
#include <optional>
#include <random>
#include <string>

#include "json.hpp"
#include "verify.hpp"

namespace isoloc {

struct CorpusEntry {
  std::string label;
  long p = 0;
  std::array<Rational, 5> curve_a{};
  std::optional<std::array<Rational, 5>> curve_b;
  std::optional<std::vector<Rational>> kernel_poly;  // low to high degree
  std::vector<Int> bad_primes;                       // optional hint, never trusted for math
};

// Raised when an entry is well-formed but cannot be turned into a pair
// (typically: no rational kernel on curve_a). Callers count these as skips.
struct SkipEntry : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Rational json_rational(const nlohmann::json& j) {
  if (j.is_number_integer()) return Rational(static_cast<long>(j.get<long long>()));
  if (j.is_string()) {
    Rational r;
    if (r.set_str(j.get<std::string>(), 10) != 0)
      throw std::runtime_error("bad rational literal: " + j.get<std::string>());
    r.canonicalize();
    return r;
  }
  throw std::runtime_error("expected integer or rational string, got " + j.dump());
}

inline nlohmann::json rational_json(const Rational& r) {
  if (den(r) == 1 && num(r).fits_slong_p()) return nlohmann::json(num(r).get_si());
  return nlohmann::json(r.get_str());
}

}  // namespace detail

inline CorpusEntry parse_entry(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line);
  if (!j.is_object()) throw std::runtime_error("corpus line is not a JSON object");
  CorpusEntry e;
  e.label = j.value("label", std::string("?"));
  if (!j.contains("p") || !j["p"].is_number_integer())
    throw std::runtime_error("missing or non-integer field 'p'");
  e.p = j["p"].get<long>();
  if (e.p < 2) throw std::runtime_error("'p' must be at least 2");
  auto read_curve = [&](const nlohmann::json& arr, const char* name) {
    if (!arr.is_array() || arr.size() != 5)
      throw std::runtime_error(std::string(name) + " must be an array of five coefficients");
    std::array<Rational, 5> a;
    for (int i = 0; i < 5; ++i) a[i] = detail::json_rational(arr[i]);
    return a;
  };
  if (!j.contains("curve_a")) throw std::runtime_error("missing field 'curve_a'");
  e.curve_a = read_curve(j["curve_a"], "curve_a");
  if (j.contains("curve_b")) e.curve_b = read_curve(j["curve_b"], "curve_b");
  if (j.contains("kernel_poly")) {
    const auto& arr = j["kernel_poly"];
    if (!arr.is_array() || arr.empty()) throw std::runtime_error("kernel_poly must be a nonempty array");
    std::vector<Rational> k;
    for (const auto& c : arr) k.push_back(detail::json_rational(c));
    e.kernel_poly = std::move(k);
  }
  if (j.contains("bad_primes"))
    for (const auto& q : j["bad_primes"]) e.bad_primes.push_back(Int(q.get<long>()));
  return e;
}

inline std::string serialize_entry(const CorpusEntry& e) {
  nlohmann::ordered_json j;
  j["label"] = e.label;
  j["p"] = e.p;
  auto curve_json = [](const std::array<Rational, 5>& a) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Rational& c : a) arr.push_back(detail::rational_json(c));
    return arr;
  };
  j["curve_a"] = curve_json(e.curve_a);
  if (e.curve_b) j["curve_b"] = curve_json(*e.curve_b);
  if (e.kernel_poly) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Rational& c : *e.kernel_poly) arr.push_back(detail::rational_json(c));
    j["kernel_poly"] = arr;
  }
  if (!e.bad_primes.empty()) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Int& q : e.bad_primes) arr.push_back(q.get_si());
    j["bad_primes"] = arr;
  }
  return j.dump();
}

namespace detail {

// A provided kernel polynomial must actually cut out a rational subgroup of
// the claimed order: right degree, divides the division polynomial, stable
// under doubling. Vélu on anything else would silently produce garbage.
inline void check_kernel(const Curve& a, const Poly& k, long p) {
  if (k.degree() != (p == 2 ? 1 : (p - 1) / 2))
    throw std::runtime_error("kernel_poly degree does not match p");
  if (p == 2) {
    if (a.fpoly().eval(-k.coeff(0) / k.coeff(1)) != 0)
      throw std::runtime_error("kernel_poly root is not a two-torsion abscissa");
    return;
  }
  Poly g = k.monic();
  if (!g.divides(division_polynomial_x(a, p)))
    throw std::runtime_error("kernel_poly does not divide the division polynomial");
  auto [n2, d2] = multiplication_x_map(a, 2);
  if (!g.divides(detail::eval_fraction(g, n2, d2, g.degree())))
    throw std::runtime_error("kernel_poly is not stable under doubling");
}

}  // namespace detail

// Turn a corpus record into an isogeny between the recorded models.
// Throws SkipEntry when curve_a simply has no rational kernel to follow, and
// runtime_error when the record contradicts itself.
inline Isogeny realize(const CorpusEntry& ce) {
  Curve a(ce.curve_a);  // the constructor rejects singular equations
  std::optional<Curve> b;
  if (ce.curve_b) b.emplace(*ce.curve_b);
  if (ce.kernel_poly) {
    Poly k(*ce.kernel_poly);
    detail::check_kernel(a, k, ce.p);
    Isogeny phi = velu(a, k);
    if (b) {
      auto iso = find_isomorphism(phi.codomain, *b);
      if (!iso) throw std::runtime_error("kernel quotient is not isomorphic to curve_b");
      return transport(phi, ModelMap(), *iso);
    }
    return phi;
  }
  if (b) {
    auto phi = find_isogeny(a, *b, ce.p);
    if (!phi)
      throw std::runtime_error("no rational isogeny of degree " + std::to_string(ce.p) +
                               " between the given models");
    return *phi;
  }
  auto kernels = kernel_polynomials(a, ce.p);
  if (kernels.empty()) throw SkipEntry("no rational kernel");
  return velu(a, kernels.front());
}

// Record an already-constructed isogeny, so realizing the entry later needs no
// kernel search.
inline CorpusEntry make_entry(std::string label, const Isogeny& phi) {
  CorpusEntry e;
  e.label = std::move(label);
  e.p = phi.degree;
  const Curve& A = phi.domain;
  const Curve& B = phi.codomain;
  e.curve_a = {A.a1(), A.a2(), A.a3(), A.a4(), A.a6()};
  e.curve_b = std::array<Rational, 5>{B.a1(), B.a2(), B.a3(), B.a4(), B.a6()};
  std::vector<Rational> k;
  for (long i = 0; i <= phi.kernel.degree(); ++i) k.push_back(phi.kernel.coeff(i));
  e.kernel_poly = std::move(k);
  return e;
}

// Seeded random corpora for the 2- and 3-isogeny families. The draw is
// reduced from the raw mt19937_64 stream by hand so corpora are identical
// across standard libraries.
inline std::vector<CorpusEntry> family_corpus(long p, long count, unsigned long seed,
                                              long bound = 100) {
  if (p != 2 && p != 3) throw std::invalid_argument("families exist for p = 2 and p = 3 only");
  std::mt19937_64 rng(seed);
  auto draw = [&]() { return static_cast<long>(rng() % (2 * bound + 1)) - bound; };
  std::vector<CorpusEntry> out;
  out.reserve(count);
  while (static_cast<long>(out.size()) < count) {
    long av = draw(), bv = draw();
    Rational a(av), b(bv);
    try {
      Isogeny phi = p == 2 ? two_isogeny(a, b) : three_isogeny(a, b);
      std::string label = "fam" + std::to_string(p) + "-" + std::to_string(out.size()) + "(" +
                          std::to_string(av) + "," + std::to_string(bv) + ")";
      out.push_back(make_entry(std::move(label), phi));
    } catch (const std::invalid_argument&) {
      continue;  // singular pick, redraw
    }
  }
  return out;
}

}  // namespace isoloc
