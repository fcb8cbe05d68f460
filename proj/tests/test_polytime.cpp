#include <gtest/gtest.h>

#include "vexact/vexact.hpp"

using namespace vexact;

namespace {

Rational q(long a, long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}
Dyadic dy(long m, std::int64_t e) { return Dyadic(mpz_class(m), e); }

Pi01Class stalling() {
  return Pi01Class(std::make_shared<generators::Stalling>(std::vector<RationalInterval>{{q(1, 4), q(3, 4)}}));
}

}  // namespace

TEST(Slowed, WeightsFollowStages) {
  VolterraFunction F = build_slowed(finite_class({{q(1, 8), q(1, 4)}, {q(3, 8), q(1, 2)}, {q(5, 8), q(7, 8)}}));
  EXPECT_EQ(F.schedule(), Schedule::ByStage);
  Pi01Class c = F.snapshot();
  c.advance_to(3);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(F.weight_exponent(i, c.pieces()[i]), static_cast<std::int64_t>(i + 1));
}

TEST(Slowed, StageTailIsBounded) {
  VolterraFunction F = build_slowed(Pi01Class(std::make_shared<generators::CantorComplement>()));
  // pieces after stage p+1 are covered by the widening
  DyInterval lo = F.f_eval(dy(1, -1), Precision{8});
  DyInterval hi = F.f_eval(dy(1, -1), Precision{32});
  EXPECT_TRUE(lo.intersects(hi));
  EXPECT_TRUE(lo.width_at_most(6));
}

TEST(Scaling, SinglePieceFitsAPolynomial) {
  ScalingReport rep = scaling_probe(finite_class({{q(1, 4), q(3, 4)}}), Schedule::ByStage, dy(3, -3),
                                    {16, 32, 64, 128});
  ASSERT_EQ(rep.samples.size(), 4u);
  EXPECT_EQ(rep.fitted, 4u);
  EXPECT_TRUE(std::isfinite(rep.exponent));
  EXPECT_GT(rep.exponent, 0);
  EXPECT_GE(rep.r_squared, 0.9);
  for (std::size_t i = 1; i < rep.samples.size(); ++i) EXPECT_GE(rep.samples[i].ops, rep.samples[i - 1].ops);
  auto j = scaling_summary(rep);
  EXPECT_TRUE(j["budget_exhausted_at"].empty());
  EXPECT_EQ(timing_csv(rep).substr(0, 13), "p,ops,wall_ms");
}

TEST(Scaling, OpCountsAreDeterministic) {
  auto a = scaling_probe(finite_class({{q(1, 4), q(3, 4)}}), Schedule::ByStage, dy(3, -3), {24, 48});
  auto b = scaling_probe(finite_class({{q(1, 4), q(3, 4)}}), Schedule::ByStage, dy(3, -3), {24, 48});
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(a.samples[i].ops, b.samples[i].ops);
}

TEST(Scaling, EmptyClassIsCheap) {
  ScalingReport rep = scaling_probe(finite_class({}), Schedule::ByStage, dy(1, -1), {16, 64, 256});
  // only the fixed ingredient setup is paid
  for (const auto& t : rep.samples) {
    EXPECT_FALSE(t.budget_exhausted);
    EXPECT_EQ(*t.value, DyInterval());
    EXPECT_EQ(t.ops, rep.samples[0].ops);
  }
}

TEST(Scaling, StallingIndexScheduleVersusStageSchedule) {
  ScalingReport idx = scaling_probe(stalling(), Schedule::ByIndex, dy(1, -1), {16, 64}, 2000);
  for (const auto& t : idx.samples) {
    EXPECT_TRUE(t.budget_exhausted);
    EXPECT_EQ(t.generator_steps, 2000u);
  }
  EXPECT_EQ(idx.fitted, 0u);
  EXPECT_EQ(scaling_summary(idx)["budget_exhausted_at"].size(), 2u);
  EXPECT_NE(timing_csv(idx).find("budget-exhausted"), std::string::npos);

  ScalingReport st = scaling_probe(stalling(), Schedule::ByStage, dy(1, -1), {16, 64}, 2000);
  for (const auto& t : st.samples) {
    EXPECT_FALSE(t.budget_exhausted);
    EXPECT_TRUE(t.value->width_at_most(t.p));
  }
}
