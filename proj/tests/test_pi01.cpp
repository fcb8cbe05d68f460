#include <gtest/gtest.h>

#include "vexact/vexact.hpp"

using namespace vexact;

namespace {

Rational q(long a, long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

Pi01Class staged(std::vector<std::vector<RationalInterval>> groups) {
  return Pi01Class(std::make_shared<generators::Finite>(std::move(groups)));
}

}  // namespace

TEST(Pi01, SinglePieceFiniteClass) {
  Pi01Class c = finite_class({{q(1, 4), q(3, 4)}});
  c.advance_to(5);
  ASSERT_EQ(c.pieces().size(), 1u);
  EXPECT_EQ(c.pieces()[0].q, q(1, 4));
  EXPECT_EQ(c.pieces()[0].r, q(3, 4));
  EXPECT_EQ(c.pieces()[0].stage, 1u);
  EXPECT_TRUE(c.exhausted());
  EXPECT_EQ(c.stage(), 5u);
}

TEST(Pi01, OverlappingRawIntervalsGiveDisjointPieces) {
  Pi01Class c = staged({{{q(1, 4), q(1, 2)}}, {{q(3, 8), q(3, 4)}}});
  c.advance_to(2);
  ASSERT_EQ(c.pieces().size(), 2u);
  EXPECT_EQ(c.pieces()[1].q, q(1, 2));
  EXPECT_EQ(c.pieces()[1].r, q(3, 4));
  EXPECT_EQ(c.pieces()[1].stage, 2u);
  ASSERT_EQ(c.raw_union().size(), 1u);
  EXPECT_EQ(c.raw_union()[0], (RationalInterval{q(1, 4), q(3, 4)}));
}

TEST(Pi01, SubsumedIntervalsEmitNothing) {
  Pi01Class c = staged({{{q(0, 1), q(1, 2)}}, {{q(1, 8), q(1, 4)}}});
  c.advance_to(1);
  EXPECT_TRUE(c.normalize_step().empty());
  EXPECT_EQ(c.pieces().size(), 1u);
}

TEST(Pi01, IntervalsAreClippedToUnit) {
  Pi01Class c = staged({{{q(-1, 2), q(1, 4)}, {q(2, 1), q(3, 1)}}});
  c.advance_to(1);
  ASSERT_EQ(c.pieces().size(), 1u);
  EXPECT_EQ(c.pieces()[0].q, 0);
  EXPECT_EQ(c.pieces()[0].r, q(1, 4));
}

TEST(Pi01, SharedEndpointMembership) {
  // touching raw intervals keep the common endpoint in V
  Pi01Class touching = staged({{{q(0, 1), q(1, 2)}, {q(1, 2), q(1, 1)}}});
  EXPECT_TRUE(std::holds_alternative<ConsistentWithV>(touching.membership(q(1, 2), 3)));
  // overlapping raw intervals put it in U
  Pi01Class overlapping = staged({{{q(1, 4), q(1, 2)}}, {{q(3, 8), q(3, 4)}}});
  EXPECT_TRUE(std::holds_alternative<ConsistentWithV>(overlapping.membership(q(1, 2), 1)));
  auto v = overlapping.membership(q(1, 2), 2);
  ASSERT_TRUE(std::holds_alternative<InU>(v));
  EXPECT_EQ(std::get<InU>(v).piece, 1u);
  EXPECT_EQ(std::get<InU>(v).offset, 0);
}

TEST(Pi01, MembershipOffsets) {
  Pi01Class c = finite_class({{q(1, 4), q(3, 4)}});
  auto v = c.membership(q(1, 2), 1);
  ASSERT_TRUE(std::holds_alternative<InU>(v));
  EXPECT_EQ(std::get<InU>(v).offset, q(1, 2));
  EXPECT_TRUE(std::holds_alternative<ConsistentWithV>(c.membership(q(1, 4), 10)));
  EXPECT_TRUE(std::holds_alternative<ConsistentWithV>(c.membership(q(9, 10), 10)));
}

TEST(Pi01, LocatePrefersRightPiece) {
  Pi01Class c = staged({{{q(1, 4), q(1, 2)}}, {{q(3, 8), q(3, 4)}}});
  c.advance_to(2);
  EXPECT_EQ(c.locate(q(1, 2), 2), std::optional<std::size_t>(1));
  EXPECT_EQ(c.locate(q(1, 2), 1), std::optional<std::size_t>(0));
  EXPECT_FALSE(c.locate(q(1, 8), 2).has_value());
}

TEST(Pi01, CantorComplementEnumeration) {
  Pi01Class c(std::make_shared<generators::CantorComplement>());
  c.advance_to(7);
  ASSERT_EQ(c.pieces().size(), 7u);
  EXPECT_EQ(c.pieces()[0].q, q(1, 3));
  EXPECT_EQ(c.pieces()[1].q, q(1, 9));
  EXPECT_EQ(c.pieces()[2].q, q(7, 9));
  EXPECT_EQ(c.pieces()[6].r, q(26, 27));
  // 1/4 is in the Cantor set
  for (const Piece& p : c.pieces()) EXPECT_FALSE(p.contains(q(1, 4)));
  EXPECT_FALSE(c.exhausted());
}

TEST(Pi01, AccumulationPointIsBoundary) {
  Pi01Class c(std::make_shared<generators::AccumulateAt>(q(1, 3)));
  c.advance_to(3);
  EXPECT_EQ(c.pieces()[0].q, q(5, 8));
  EXPECT_EQ(c.pieces()[0].r, q(7, 8));
  EXPECT_EQ(c.pieces()[1].q, q(1, 16));
  BoundaryReport rep = c.boundary_consistency(q(1, 3), 30);
  EXPECT_FALSE(rep.in_emitted_u);
  EXPECT_TRUE(rep.consistent());
  EXPECT_EQ(rep.meets.size(), 31u);
}

TEST(Pi01, IsolatedPointIsNotBoundaryConsistent) {
  Pi01Class c = finite_class({{q(1, 4), q(3, 4)}});
  BoundaryReport rep = c.boundary_consistency(q(0, 1), 8);
  EXPECT_TRUE(rep.meets[1]);  // radius 1/2 reaches past 1/4
  EXPECT_FALSE(rep.meets[2]);
  EXPECT_FALSE(rep.consistent());
  EXPECT_TRUE(c.boundary_consistency(q(1, 2), 8).in_emitted_u);
  EXPECT_TRUE(c.boundary_consistency(q(1, 4), 8).consistent());
}

TEST(Pi01, StallingGeneratorExhaustsBudget) {
  Pi01Class c(std::make_shared<generators::Stalling>(std::vector<RationalInterval>{{q(1, 4), q(3, 4)}}));
  c.ensure_pieces(1, 10);
  EXPECT_EQ(c.pieces().size(), 1u);
  try {
    c.ensure_pieces(2, 50);
    FAIL() << "expected BudgetExhausted";
  } catch (const BudgetExhausted& e) {
    EXPECT_EQ(e.steps(), 50u);
  }
}

TEST(Pi01, DelayedGeneratorRecordsStage) {
  Pi01Class c(std::make_shared<generators::Delayed>(RationalInterval{q(1, 4), q(1, 2)}, 100));
  c.advance_to(99);
  EXPECT_EQ(c.pieces().size(), 0u);
  c.advance_to(100);
  ASSERT_EQ(c.pieces().size(), 1u);
  EXPECT_EQ(c.pieces()[0].stage, 100u);
  EXPECT_EQ(c.pieces_by_stage(99), 0u);
  EXPECT_TRUE(c.exhausted());
  EXPECT_THROW(generators::Delayed({q(0, 1), q(1, 2)}, 0), InvalidInput);
}

TEST(Pi01, FreshRestartsTheEnumeration) {
  Pi01Class c(std::make_shared<generators::CantorComplement>());
  c.advance_to(5);
  Pi01Class f = c.fresh();
  EXPECT_EQ(f.stage(), 0u);
  EXPECT_TRUE(f.pieces().empty());
}

TEST(Pi01, EmptyClass) {
  Pi01Class c = finite_class({});
  c.advance_to(3);
  EXPECT_TRUE(c.pieces().empty());
  EXPECT_TRUE(std::holds_alternative<ConsistentWithV>(c.membership(q(1, 2), 3)));
}
