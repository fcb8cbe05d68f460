#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace vexact;

namespace {

Dyadic dy(long m, std::int64_t e) { return Dyadic(mpz_class(m), e); }

}  // namespace

TEST(Dyadic, CanonicalFormHasOddMantissa) {
  Dyadic d(mpz_class(12), -3);
  EXPECT_EQ(d.mantissa(), 3);
  EXPECT_EQ(d.exponent(), -1);
  EXPECT_EQ(Dyadic(mpz_class(0), 17).exponent(), 0);
  EXPECT_EQ(d, Dyadic(mpz_class(3), -1));
}

TEST(Dyadic, ExactRingOperations) {
  Dyadic a = dy(3, -2), b = dy(5, -3);
  EXPECT_EQ((a + b).to_rational(), Rational(11, 8));
  EXPECT_EQ((a - b).to_rational(), Rational(1, 8));
  EXPECT_EQ((a * b).to_rational(), Rational(15, 32));
  EXPECT_EQ(a.mul_pow2(3), Dyadic(6));
  EXPECT_LT(b, a);
  EXPECT_EQ((-a).abs(), a);
}

TEST(Dyadic, RationalConversion) {
  EXPECT_EQ(Dyadic::from_rational(Rational(-3, 16)), dy(-3, -4));
  EXPECT_FALSE(Dyadic::try_from_rational(Rational(1, 3)).has_value());
  EXPECT_THROW(Dyadic::from_rational(Rational(1, 3)), InvalidInput);
  EXPECT_EQ(dy(7, -3).to_fraction_string(), "7/8");
}

TEST(Dyadic, Rounding) {
  Dyadic x = dy(13, -4);  // 0.8125
  EXPECT_EQ(x.round_down(2), dy(3, -2));
  EXPECT_EQ(x.round_up(2), Dyadic(1));
  EXPECT_EQ((-x).round_down(2), Dyadic(-1));
  EXPECT_EQ(x.round_down(8), x);
}

TEST(Rational, ParsesAllLiteralForms) {
  EXPECT_EQ(parse_rational("3/12"), Rational(1, 4));
  EXPECT_EQ(parse_rational(" -0.125 "), Rational(-1, 8));
  EXPECT_EQ(parse_rational("5*2^-3"), Rational(5, 8));
  EXPECT_EQ(parse_rational("7"), Rational(7));
  EXPECT_THROW(parse_rational("1/0"), InvalidInput);
  EXPECT_THROW(parse_rational("abc"), InvalidInput);
  EXPECT_THROW(parse_rational(""), InvalidInput);
  EXPECT_EQ(to_fraction_string(Rational(-6, 4)), "-3/2");
}

TEST(Interval, BasicOperations) {
  DyInterval a(dy(-1, -1), Dyadic(1)), b(Dyadic(2), Dyadic(3));
  EXPECT_EQ(a + b, DyInterval(dy(3, -1), Dyadic(4)));
  EXPECT_EQ(a * b, DyInterval(dy(-3, -1), Dyadic(3)));
  EXPECT_EQ(a.square(), DyInterval(Dyadic(0), Dyadic(1)));
  EXPECT_TRUE(a.contains(Rational(1, 3)));
  EXPECT_FALSE(a.intersects(b));
  EXPECT_THROW(DyInterval(Dyadic(1), Dyadic(0)), InvalidInput);
  EXPECT_EQ(a.mig(), Dyadic());
  EXPECT_EQ(b.mig(), Dyadic(2));
}

TEST(Enclosures, DivisionIsExactOrNarrow) {
  EXPECT_TRUE(div_enclosure(Dyadic(3), Dyadic(4), Precision{10}).is_point());
  DyInterval third = div_enclosure(Dyadic(1), Dyadic(3), Precision{64});
  EXPECT_TRUE(third.contains(Rational(1, 3)));
  EXPECT_TRUE(third.width_at_most(64));
  EXPECT_THROW(div_enclosure(Dyadic(1), Dyadic(0), Precision{8}), InvalidInput);
  EXPECT_THROW(div_interval(DyInterval::point(Dyadic(1)), DyInterval(Dyadic(-1), Dyadic(1)), 8), DomainError);
}

TEST(Enclosures, PiAgainstFrozenDigitsAndMpfr) {
  for (std::int64_t p : {8, 64, 256, 1000, 1600}) {
    DyInterval v = pi_enclosure(Precision{p});
    EXPECT_TRUE(v.width_at_most(p)) << p;
    EXPECT_TRUE(oracle::consistent(v, oracle::kPi)) << p;
    EXPECT_TRUE(oracle::meets(v, oracle::pi_bracket(p + 40))) << p;
  }
}

TEST(Enclosures, PiCacheResetIsTransparent) {
  DyInterval before = pi_enclosure(Precision{200});
  reset_constant_caches();
  DyInterval after = pi_enclosure(Precision{200});
  EXPECT_TRUE(before.intersects(after));
}

TEST(Enclosures, ElementaryConstants) {
  EXPECT_TRUE(oracle::consistent(sin_enclosure(DyInterval::point(Dyadic(1)), Precision{180}), oracle::kSin1));
  EXPECT_TRUE(oracle::consistent(sqrt_enclosure(DyInterval::point(Dyadic(2)), Precision{180}), oracle::kSqrt2));
  EXPECT_TRUE(oracle::consistent(sqrt_pi_enclosure(Precision{180}), oracle::kSqrtPi));
  EXPECT_EQ(sqrt_enclosure(DyInterval::point(dy(9, -4)), Precision{30}), DyInterval::point(dy(3, -2)));
  EXPECT_THROW(sqrt_enclosure(DyInterval::point(Dyadic(-1)), Precision{8}), InvalidInput);
}

TEST(Enclosures, SinCosAgreeWithMpfrAtRandomPoints) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    Dyadic x(mpz_class(static_cast<long>(rng() % (1ULL << 40))) - (mpz_class(1) << 39), -static_cast<long>(rng() % 30));
    const std::int64_t p = 20 + static_cast<std::int64_t>(rng() % 200);
    DyInterval s = sin_enclosure(DyInterval::point(x), Precision{p});
    DyInterval c = cos_enclosure(DyInterval::point(x), Precision{p});
    ASSERT_TRUE(s.width_at_most(p));
    ASSERT_TRUE(c.width_at_most(p));
    ASSERT_TRUE(oracle::meets(s, oracle::bracket(mpfr_sin, x, p + 30))) << x;
    ASSERT_TRUE(oracle::meets(c, oracle::bracket(mpfr_cos, x, p + 30))) << x;
  }
}

TEST(Enclosures, SinOfPiIsTiny) {
  // argument reduction near a root of sin
  DyInterval pi = pi_enclosure(Precision{300});
  DyInterval s = sin_enclosure(DyInterval::point(pi.mid()), Precision{100});
  EXPECT_TRUE(s.width_at_most(100));
  EXPECT_TRUE(s.mag() <= Dyadic::pow2(-99));
}

TEST(Enclosures, IntervalSinCapturesExtrema) {
  // [1, 2] contains pi/2
  DyInterval s = sin_enclosure(DyInterval(Dyadic(1), Dyadic(2)), Precision{40});
  EXPECT_EQ(s.hi(), Dyadic(1));
  EXPECT_TRUE(s.contains(Rational(21037, 25000)));
  EXPECT_FALSE(s.contains(Rational(84147, 100000)));
  // wide arguments give the full range
  DyInterval w = cos_enclosure(DyInterval(Dyadic(0), Dyadic(100)), Precision{20});
  EXPECT_EQ(w, DyInterval(Dyadic(-1), Dyadic(1)));
}

TEST(Enclosures, HugeArgumentReduction) {
  Dyadic x(mpz_class(1), 200);
  DyInterval s = sin_enclosure(DyInterval::point(x), Precision{64});
  EXPECT_TRUE(s.width_at_most(64));
  EXPECT_TRUE(oracle::meets(s, oracle::bracket(mpfr_sin, x, 120)));
}

TEST(Precision, CapIsEnforcedAndRestored) {
  const auto saved = precision_cap();
  {
    ScopedPrecisionCap cap(100);
    EXPECT_THROW(pi_enclosure(Precision{200}), PrecisionCapExceeded);
  }
  EXPECT_EQ(precision_cap(), saved);
}

TEST(Precision, OpCountIsDeterministic) {
  auto measure = [] {
    reset_constant_caches();
    ops::Scope scope;
    sin_enclosure(DyInterval::point(Dyadic(3)), Precision{128});
    return scope.elapsed();
  };
  const auto a = measure();
  EXPECT_GT(a, 0u);
  EXPECT_EQ(a, measure());
}
