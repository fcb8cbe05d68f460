#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "oracles.hpp"

using namespace vexact;

namespace {

Rational q(long a, long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}
Dyadic dy(long m, std::int64_t e) { return Dyadic(mpz_class(m), e); }

VolterraFunction single(Schedule s = Schedule::ByIndex) {
  return VolterraFunction(finite_class({{q(1, 4), q(3, 4)}}), s);
}
VolterraFunction three(Schedule s = Schedule::ByIndex) {
  return VolterraFunction(finite_class({{q(1, 8), q(1, 4)}, {q(3, 8), q(1, 2)}, {q(5, 8), q(7, 8)}}), s);
}

/// MPFR value of x^2 sin(1/x^2) at 300 bits.
Rational mpfr_h(const Dyadic& x) {
  mpfr_t a, t;
  mpfr_init2(a, 300);
  mpfr_init2(t, 300);
  oracle::set_dyadic(a, x);
  mpfr_sqr(t, a, MPFR_RNDN);
  mpfr_ui_div(t, 1, t, MPFR_RNDN);
  mpfr_sin(t, t, MPFR_RNDN);
  mpfr_mul(t, t, a, MPFR_RNDN);
  mpfr_mul(t, t, a, MPFR_RNDN);
  Rational r = oracle::to_rational(t);
  mpfr_clear(a);
  mpfr_clear(t);
  return r;
}

}  // namespace

TEST(Ingredients, RootOfHPrime) {
  for (std::int64_t p : {10, 64, 200}) {
    DyInterval x0 = find_x0(Precision{p});
    EXPECT_TRUE(x0.width_at_most(p));
    EXPECT_TRUE(oracle::consistent(x0, oracle::kX0));
  }
  DyInterval x0 = find_x0(Precision{20});
  EXPECT_GE(x0.lo().to_rational(), q(47, 100));
  EXPECT_LE(x0.hi().to_rational(), q(48, 100));
  // 1/x0^2 is the first positive root of tan u = u
  DyInterval u = div_interval(DyInterval::point(Dyadic(1)), find_x0(Precision{120}).square(), 100);
  EXPECT_TRUE(oracle::max_error(u, oracle::kU1) < oracle::pow2q(-90));
}

TEST(Ingredients, HValues) {
  const auto& ing = *default_ingredients();
  EXPECT_TRUE(oracle::consistent(ing.h.eval(dy(1, -1), Precision{100}), oracle::kHHalf));
  EXPECT_TRUE(oracle::consistent(ing.h_at_x0(Precision{190}), oracle::kHX0));
  EXPECT_EQ(ing.h.eval(Dyadic(), Precision{10}), DyInterval());
  EXPECT_EQ(ing.h_prime.eval(Dyadic(), Precision{10}), DyInterval());
  EXPECT_THROW(ing.h_prime(DyInterval(Dyadic(0), dy(1, -4)), Precision{10}), DomainError);
}

TEST(Ingredients, HAgainstMpfr) {
  std::mt19937_64 rng(11);
  const auto& ing = *default_ingredients();
  for (int i = 0; i < 60; ++i) {
    Dyadic x(mpz_class(static_cast<unsigned long>(rng() >> 12) + 1), -52 - static_cast<long>(rng() % 6));
    DyInterval v = ing.h.eval(x, Precision{80});
    ASSERT_TRUE(v.width_at_most(80));
    Rational ref = mpfr_h(x);
    ASSERT_TRUE(v.lo().to_rational() - oracle::pow2q(-200) <= ref && ref <= v.hi().to_rational() + oracle::pow2q(-200))
        << x;
  }
}

TEST(Ingredients, GIsGluedAndSymmetric) {
  const auto& ing = *default_ingredients();
  DyInterval mid = ing.g.eval(dy(1, -1), Precision{80});
  EXPECT_TRUE(oracle::consistent(mid, std::string(oracle::kHX0).substr(0, 22)));
  DyInterval a = ing.g.eval(dy(3, -4), Precision{80});
  DyInterval b = ing.g.eval(dy(13, -4), Precision{80});
  EXPECT_TRUE(a.intersects(b));
  EXPECT_EQ(ing.g.eval(Dyadic(1), Precision{40}), DyInterval());
  // g' is 0 on the plateau and antisymmetric across 1/2
  EXPECT_EQ(ing.g_prime.eval(dy(1, -1), Precision{40}), DyInterval());
  DyInterval l = ing.g_prime.eval(dy(3, -4), Precision{60});
  DyInterval r = ing.g_prime.eval(dy(13, -4), Precision{60});
  EXPECT_TRUE((l + r).contains(Dyadic()));
}

TEST(Ingredients, GPrimeAtWitnessOffsets) {
  for (int k = 1; k <= 3; ++k) {
    DyInterval z = enclose(oracle::decimal(oracle::kZ[k - 1]), Precision{120});
    DyInterval v = g_prime_eval(z.mid(), Precision{50});
    EXPECT_TRUE(oracle::max_error(v, oracle::kGPrimeZ[k - 1]) < oracle::pow2q(-40)) << k;
  }
  // rational offsets go through shrinking enclosures
  DyInterval third = g_prime_eval(q(1, 3), Precision{40});
  EXPECT_TRUE(third.width_at_most(40));
}

TEST(Volterra, SinglePieceValues) {
  VolterraFunction F = single();
  DyInterval v = F.f_eval(dy(1, -1), Precision{120});
  EXPECT_TRUE(v.width_at_most(120));
  EXPECT_TRUE(oracle::consistent(v, oracle::kFHalfSingle));
  EXPECT_EQ(F.f_eval(dy(1, -2), Precision{40}), DyInterval());
  EXPECT_EQ(F.f_eval(dy(1, -3), Precision{40}), DyInterval());
  EXPECT_EQ(F.f_eval(Dyadic(1), Precision{40}), DyInterval());
  EXPECT_THROW(F.f_eval(Dyadic(2), Precision{10}), DomainError);
}

TEST(Volterra, StageScheduleWeights) {
  VolterraFunction F = single(Schedule::ByStage);
  DyInterval v = F.f_eval(dy(1, -1), Precision{100});
  EXPECT_TRUE(oracle::consistent(v.mul_pow2(1), oracle::kFHalfSingle));
  VolterraFunction G = three(Schedule::ByStage);
  Pi01Class c = G.snapshot();
  c.advance_to(3);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(G.weight_exponent(i, c.pieces()[i]), static_cast<std::int64_t>(i + 1));
  VolterraFunction H = three(Schedule::ByIndex);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(H.weight_exponent(i, c.pieces()[i]), static_cast<std::int64_t>(i));
}

TEST(Volterra, SchedulesShareSupport) {
  VolterraFunction a = three(Schedule::ByIndex), b = three(Schedule::ByStage);
  for (int i = 0; i <= 64; ++i) {
    Dyadic x(mpz_class(i), -6);
    bool za = a.f_eval(x, Precision{40}) == DyInterval();
    bool zb = b.f_eval(x, Precision{40}) == DyInterval();
    EXPECT_EQ(za, zb) << x;
  }
}

TEST(Volterra, LateStageWeightIsTiny) {
  VolterraFunction F(Pi01Class(std::make_shared<generators::Delayed>(RationalInterval{q(1, 4), q(1, 2)}, 100)),
                     Schedule::ByStage);
  DyInterval coarse = F.f_eval(dy(3, -3), Precision{30});
  EXPECT_TRUE(coarse.mag() <= Dyadic::pow2(-30));
  DyInterval fine = F.f_eval(dy(3, -3), Precision{140});
  EXPECT_TRUE(fine.mag() <= Dyadic::pow2(-100));
  EXPECT_TRUE(fine.is_negative());
}

TEST(Volterra, IntervalQueriesEnclosePointValues) {
  VolterraFunction F = three();
  DyInterval wide = F.f_eval(DyInterval(dy(5, -5), dy(15, -5)), Precision{30});
  for (int i = 5; i <= 15; ++i) EXPECT_TRUE(F.f_eval(Dyadic(mpz_class(i), -5), Precision{30}).subset_of(wide.widen(Dyadic::pow2(-28))));
  EXPECT_TRUE(wide.contains(Dyadic()));
}

TEST(Volterra, InfiniteClassTailIsCertified) {
  VolterraFunction F(Pi01Class(std::make_shared<generators::CantorComplement>()), Schedule::ByIndex);
  DyInterval lo = F.f_eval(dy(1, -1), Precision{12});
  DyInterval hi = F.f_eval(dy(1, -1), Precision{40});
  EXPECT_TRUE(lo.intersects(hi));
  EXPECT_TRUE(hi.width_at_most(38));
  // 1/4 lies in the Cantor set: only tails contribute
  EXPECT_TRUE(F.f_eval(dy(1, -2), Precision{20}).contains(Dyadic()));
}

TEST(Volterra, DerivativeInsideAndOutside) {
  VolterraFunction F = single();
  const Dyadic y = detail::rational_floor(oracle::decimal(oracle::kY3), 80);
  DerivativeValue d = F.f_prime_eval(y, Precision{40}, 4);
  ASSERT_TRUE(std::holds_alternative<DyInterval>(d));
  EXPECT_TRUE(oracle::max_error(std::get<DyInterval>(d), oracle::kGPrimeZ[2]) < oracle::pow2q(-30));
  EXPECT_TRUE(std::holds_alternative<ConsistentZero>(F.f_prime_eval(dy(1, -2), Precision{40}, 4)));
  EXPECT_TRUE(std::holds_alternative<ConsistentZero>(F.f_prime_eval(dy(1, -4), Precision{40}, 4)));
  DerivativeValue plateau = F.f_prime_eval(dy(1, -1), Precision{40}, 4);
  EXPECT_EQ(std::get<DyInterval>(plateau), DyInterval());
}

TEST(Volterra, QuotientBoundAtBoundary) {
  VolterraFunction F = three();
  for (const Rational& x : {q(1, 8), q(1, 4), q(1, 2), q(7, 8)}) {
    for (unsigned m = 0; m <= 3; ++m) {
      QuotientReport rep = F.quotient_bound_check(x, m, 200, 3);
      EXPECT_EQ(rep.violations, 0u) << x << " m=" << m;
      EXPECT_GE(rep.samples, 200u);
      EXPECT_EQ(rep.tail_pieces, m < 2 ? 2u - m : 0u);
    }
  }
  Rational bound = F.quotient_bound_check(q(1, 4), 0, 10, 3).bound_lo;
  EXPECT_LT(abs(bound - oracle::decimal(oracle::kInvOneMinusX0)), oracle::pow2q(-50));
  EXPECT_THROW(F.quotient_bound_check(q(3, 16), 0, 10, 3), InvalidInput);
}

TEST(Volterra, WitnessNearLeftEnd) {
  VolterraFunction F = single();
  WitnessResult w = F.oscillation_witness({q(1, 5), q(3, 10)}, 4, q(1, 1));
  ASSERT_TRUE(std::holds_alternative<Witness>(w));
  const Witness& wit = std::get<Witness>(w);
  EXPECT_EQ(wit.k, 3u);
  EXPECT_FALSE(wit.mirrored);
  EXPECT_TRUE(oracle::max_error(DyInterval::point(wit.y), oracle::kY3) < oracle::pow2q(-30));
  EXPECT_TRUE(compare(wit.fprime.hi(), Rational(-1)) <= 0);
}

TEST(Volterra, WitnessNearRightEnd) {
  VolterraFunction F = single();
  WitnessResult w = F.oscillation_witness({q(11, 16), q(13, 16)}, 4, q(1, 1));
  ASSERT_TRUE(std::holds_alternative<Witness>(w));
  EXPECT_TRUE(std::get<Witness>(w).mirrored);
  EXPECT_TRUE(compare(std::get<Witness>(w).fprime.hi(), Rational(-1)) <= 0);
}

TEST(Volterra, WitnessForHugeTarget) {
  VolterraFunction F = single();
  WitnessResult w = F.oscillation_witness({q(1, 5), q(3, 10)}, 4, Rational(1000000000));
  ASSERT_TRUE(std::holds_alternative<Witness>(w));
  EXPECT_GE(std::get<Witness>(w).k, 29u);
  EXPECT_TRUE(compare(std::get<Witness>(w).fprime.hi(), Rational(-1000000000)) <= 0);
}

TEST(Volterra, NoWitnessAwayFromU) {
  VolterraFunction F = single();
  WitnessResult w = F.oscillation_witness({q(0, 1), q(1, 8)}, 4, q(1, 1));
  ASSERT_TRUE(std::holds_alternative<NotFoundAtStage>(w));
  EXPECT_EQ(std::get<NotFoundAtStage>(w).stage, 4u);
  EXPECT_THROW(F.oscillation_witness({q(1, 2), q(1, 4)}, 4, q(1, 1)), InvalidInput);
  EXPECT_THROW(F.oscillation_witness({q(1, 5), q(1, 4)}, 4, q(0, 1)), InvalidInput);
}

TEST(Volterra, StallingIndexScheduleExhaustsBudget) {
  Pi01Class c(std::make_shared<generators::Stalling>(std::vector<RationalInterval>{{q(1, 4), q(3, 4)}}));
  VolterraFunction byIndex(c, Schedule::ByIndex, 500);
  EXPECT_THROW(byIndex.f_eval(dy(1, -1), Precision{16}), BudgetExhausted);
  VolterraFunction byStage(c.fresh(), Schedule::ByStage, 500);
  EXPECT_TRUE(byStage.f_eval(dy(1, -1), Precision{16}).width_at_most(16));
}

TEST(Volterra, ConcurrentQueriesAgree) {
  VolterraFunction F(Pi01Class(std::make_shared<generators::CantorComplement>()), Schedule::ByStage);
  std::vector<DyInterval> out(4);
  std::vector<std::thread> ts;
  for (int t = 0; t < 4; ++t)
    ts.emplace_back([&, t] { out[t] = F.f_eval(dy(1, -1), Precision{24 + 4 * t}); });
  for (auto& t : ts) t.join();
  for (int t = 1; t < 4; ++t) EXPECT_TRUE(out[0].intersects(out[t]));
}
