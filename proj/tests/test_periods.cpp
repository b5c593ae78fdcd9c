#include <isoloc/modular.hpp>
#include <isoloc/verify.hpp>

#include <mpfr.h>

#include <catch2/catch_amalgamated.hpp>

using namespace isoloc;

static Curve C(long a1, long a2, long a3, long a4, long a6) {
  return Curve(Rational(a1), Rational(a2), Rational(a3), Rational(a4), Rational(a6));
}

static Real R(const char* s, mpfr_prec_t prec = 256) {
  Real r(prec);
  mpfr_set_str(r.get(), s, 10, MPFR_RNDN);
  return r;
}

static double rel_gap(const Real& x, const Real& y) {
  return abs(x / y - Real(1, std::max(x.prec(), y.prec()))).to_double();
}

TEST_CASE("lemniscatic lattice of y^2 = x^3 - x") {
  Periods P = periods(C(0, 0, 0, -1, 0), 256);
  CHECK(P.rectangular);
  // real period is twice the lemniscate constant
  CHECK(rel_gap(P.real_period, R("5.24411510858423962092967917978")) < 1e-25);
  // square lattice: both half-periods agree
  CHECK(rel_gap(P.omega1, P.omega2_im) < 1e-60);
  CHECK(rel_gap(P.complex_period, Real(4, 256) * P.omega1 * P.omega1) < 1e-60);
}

TEST_CASE("rhombic lattice of the conductor 11 curve") {
  Periods P = periods(C(0, -1, 1, -10, -20), 256);
  CHECK(!P.rectangular);
  CHECK(rel_gap(P.omega1, R("1.269209304279553421688794617")) < 1e-25);
  // one real component: the real period is omega1 itself
  CHECK(rel_gap(P.real_period, P.omega1) < 1e-70);
}

TEST_CASE("conductor 50 periods and their ratio") {
  Periods a = periods(C(1, 1, 1, -3, 1), 256);
  Periods b = periods(C(1, 1, 1, -13, -219), 256);
  CHECK(rel_gap(a.omega1, R("4.78405613293813982194219382744")) < 1e-25);
  CHECK(rel_gap(b.omega1, R("9.56811226587627964388438765489e-01")) < 1e-25);
  CHECK(rel_gap(a.omega1, Real(5, 256) * b.omega1) < 1e-25);
}

TEST_CASE("real kernel and cokernel balance for degree 2") {
  // kernel at the origin of y^2 = x^3 + a x^2 + b x; the quotient keeps both
  // real components only when the identity component contains no 2-torsion
  struct Case {
    long a, b, kappa;
  };
  for (Case t : {Case{0, 1, 1}, Case{0, -1, 2}, Case{-5, 1, 1}, Case{5, 1, 2}}) {
    PreparedPair P = prepare_pair(two_isogeny(Rational(t.a), Rational(t.b)));
    PeriodComparison pc = compare_periods(P, 256, 40);
    INFO("a=" << t.a << " b=" << t.b);
    CHECK(pc.kappa == t.kappa);
    CHECK(pc.real_ok);
    CHECK(pc.complex_ok);
  }
}

TEST_CASE("degree 5 kernels of the conductor 11 curve") {
  Curve e11 = C(0, -1, 1, -10, -20);
  auto kers = kernel_polynomials(e11, 5);
  REQUIRE(kers.size() == 2);
  bool seen_rational = false, seen_irrational = false;
  for (const Poly& k : kers) {
    PreparedPair P = prepare_pair(velu(e11, k));
    PeriodComparison pc = compare_periods(P, 256, 40);
    REQUIRE(pc.real_ok);
    REQUIRE(pc.complex_ok);
    bool rational = kernel_is_rational(P.phi);
    if (rational) {
      seen_rational = true;
      // the (5,5) torsion kernel: quotient is the curve with a6 = -263580
      CHECK(P.phi.codomain.ainvs() ==
            C(0, -1, 1, -7820, -263580).ainvs());
      CHECK(pc.kappa == 5);
      CHECK(pc.predicted_real_ratio == 5);
    } else {
      seen_irrational = true;
      CHECK(P.phi.codomain.ainvs() == C(0, -1, 1, 0, 0).ainvs());
      CHECK(pc.kappa == 1);
      CHECK(pc.predicted_real_ratio == Rational(1, 5));
    }
    CHECK(pc.predicted_complex_ratio ==
          Rational(5) / (abs(P.phi.scalar) * abs(P.phi.scalar)));
  }
  CHECK(seen_rational);
  CHECK(seen_irrational);
}

TEST_CASE("semistable odd degree: ratio p, unit scalar, rational kernel agree") {
  Curve e11 = C(0, -1, 1, -10, -20);
  std::vector<Isogeny> pairs;
  for (const Poly& k : kernel_polynomials(e11, 5)) pairs.push_back(velu(e11, k));
  Curve e11a3 = C(0, -1, 1, 0, 0);
  for (const Poly& k : kernel_polynomials(e11a3, 5)) pairs.push_back(velu(e11a3, k));
  REQUIRE(pairs.size() == 3);  // 11a1 has two 5-kernels, 11a3 only the one back
  for (const Isogeny& phi : pairs) {
    PreparedPair P = prepare_pair(phi);
    PeriodComparison pc = compare_periods(P, 256, 40);
    REQUIRE(pc.real_ok);
    bool ratio_is_p = pc.predicted_real_ratio == 5;
    bool unit_scalar = val(P.phi.scalar, Int(5)).v == 0;
    bool rational_kernel = kernel_is_rational(P.phi);
    CHECK(ratio_is_p == unit_scalar);
    CHECK(unit_scalar == rational_kernel);
  }
}

TEST_CASE("eta quotient recovers the exact discriminant root") {
  Curve e11 = C(0, -1, 1, -10, -20);
  for (const Poly& k : kernel_polynomials(e11, 5)) {
    PreparedPair P = prepare_pair(velu(e11, k));
    EtaQuotientReport rep = eta_quotient_check(P, 220, 256);
    REQUIRE(rep.root_exists);
    CHECK(rep.reconstructed == rep.expected);
    CHECK(rep.twelfth_power_ok);
    CHECK(rep.error.to_double() < 1e-15);
    if (kernel_is_rational(P.phi)) CHECK(rep.reconstructed == 121);
  }
  // conductor 50 pair, additive at 5: still an exact 12th power
  PreparedPair Q = prepare_pair(velu(C(1, 1, 1, -3, 1),
                                     kernel_polynomials(C(1, 1, 1, -3, 1), 5).at(0)));
  EtaQuotientReport rep50 = eta_quotient_check(Q, 220, 256);
  CHECK(rep50.reconstructed == 4);
  CHECK(rep50.twelfth_power_ok);
  CHECK(rep50.error.to_double() < 1e-15);
}

TEST_CASE("eta quotient rejects even degree") {
  PreparedPair P = prepare_pair(two_isogeny(Rational(6), Rational(5)));
  CHECK_THROWS_AS(eta_quotient_check(P, 100, 256), std::invalid_argument);
}

TEST_CASE("discriminant from the truncated q-product") {
  // one lattice of each shape; 100 terms leave error far below 1e-20
  CHECK(delta_tau_check(C(0, 0, 0, -1, 0), 100, 256).to_double() < 1e-20);
  CHECK(delta_tau_check(C(0, -1, 1, -10, -20), 100, 256).to_double() < 1e-20);
  CHECK(delta_tau_check(C(1, 1, 1, -3, 1), 100, 256).to_double() < 1e-20);
}

TEST_CASE("continued fraction reconstruction") {
  CHECK(nearest_rational(Real(Rational(22, 7), 256), Int(100)) == Rational(22, 7));
  CHECK(nearest_rational(Real(Rational(1, 3), 256), Int(1000000)) == Rational(1, 3));
  CHECK(nearest_rational(Real::pi(256), Int(10)) == Rational(22, 7));
  CHECK(nearest_rational(Real::pi(256), Int(120)) == Rational(355, 113));
  CHECK(nearest_rational(Real(-7, 256), Int(10)) == Rational(-7));
}
