#include <gtest/gtest.h>

#include "mcdp/poset.hpp"

using namespace mcdp;

namespace {

Element R(double v) { return Element::real(v); }

Poset diamond() { return Poset::finite({"bot", "a", "b", "top"}, {{"bot", "a"}, {"bot", "b"}, {"a", "top"}, {"b", "top"}}); }

}  // namespace

TEST(Poset, RealChainOrder) {
  Poset p = Poset::real("g");
  EXPECT_TRUE(leq(p, R(1), R(2)));
  EXPECT_FALSE(leq(p, R(2), R(1)));
  EXPECT_TRUE(leq(p, R(5), R(kInfinity)));
  EXPECT_EQ(bottom(p), R(0));
}

TEST(Poset, RealRejectsNegativeAndNan) {
  EXPECT_THROW(Element::real(-1), DomainError);
  EXPECT_THROW(Element::real(std::nan("")), DomainError);
  EXPECT_EQ(Element::real(-0.0), R(0));
}

TEST(Poset, UnitsDistinguishChains) {
  EXPECT_EQ(Poset::real("g"), Poset::real("g", "mass"));
  EXPECT_FALSE(Poset::real("g") == Poset::real("kg"));
}

TEST(Poset, ProductComparesComponentwise) {
  Poset p = product(Poset::real("1"), Poset::real("1"));
  EXPECT_TRUE(leq(p, Element::pair(R(1), R(1)), Element::pair(R(1), R(2))));
  EXPECT_FALSE(leq(p, Element::pair(R(0), R(1)), Element::pair(R(1), R(0))));
  EXPECT_FALSE(leq(p, Element::pair(R(1), R(0)), Element::pair(R(0), R(1))));
  EXPECT_EQ(bottom(p), Element::pair(R(0), R(0)));
  EXPECT_EQ(meet(p, Element::pair(R(0), R(1)), Element::pair(R(1), R(0))), Element::pair(R(0), R(0)));
}

TEST(Poset, ArityMismatchThrows) {
  Poset p = product(Poset::real("1"), Poset::real("1"));
  EXPECT_THROW(leq(p, Element::tuple({R(1)}), Element::pair(R(1), R(2))), DomainError);
}

TEST(Poset, FiniteClosureAndMeet) {
  Poset p = diamond();
  auto e = [&](const char* s) { return Element::finite(*p.index_of(s)); };
  EXPECT_TRUE(leq(p, e("bot"), e("top")));  // transitive
  EXPECT_FALSE(leq(p, e("a"), e("b")));
  EXPECT_FALSE(leq(p, e("b"), e("a")));
  EXPECT_EQ(meet(p, e("a"), e("b")), e("bot"));
  EXPECT_EQ(meet(p, e("a"), e("top")), e("a"));
  EXPECT_EQ(bottom(p), e("bot"));
}

TEST(Poset, FiniteRejectsCyclesAndMissingBottom) {
  EXPECT_THROW(Poset::finite({"a", "b"}, {{"a", "b"}, {"b", "a"}}), DomainError);
  EXPECT_THROW(Poset::finite({"a", "b"}, {}), DomainError);
  EXPECT_THROW(Poset::finite({"a"}, {{"a", "zz"}}), DomainError);
}

TEST(Poset, MeetWithoutGlbThrows) {
  // a, b share two incomparable lower bounds c, d.
  Poset p = Poset::finite({"z", "c", "d", "a", "b"},
                          {{"z", "c"}, {"z", "d"}, {"c", "a"}, {"d", "a"}, {"c", "b"}, {"d", "b"}});
  EXPECT_THROW(meet(p, Element::finite(3), Element::finite(4)), DomainError);
}

TEST(Poset, ChainIsTotal) {
  Poset c = Poset::chain({"0", "1", "2"});
  EXPECT_TRUE(leq(c, Element::finite(0), Element::finite(2)));
  EXPECT_FALSE(leq(c, Element::finite(2), Element::finite(1)));
}

TEST(Poset, ElementsOfProductAreLexicographic) {
  Poset p = product(Poset::chain({"0", "1"}), Poset::chain({"x", "y", "z"}));
  auto es = elements(p);
  ASSERT_EQ(es.size(), 6u);
  EXPECT_EQ(es.front(), Element::pair(Element::finite(0), Element::finite(0)));
  EXPECT_EQ(es[1], Element::pair(Element::finite(0), Element::finite(1)));
  EXPECT_THROW(elements(Poset::real("1")), UnsupportedError);
}

TEST(Poset, FlattenRoundTrips) {
  Poset p = Poset::product({product(Poset::real("a"), Poset::real("b")), Poset::real("c")});
  Element e = Element::pair(Element::pair(R(1), R(2)), R(3));
  auto flat = flatten(e);
  ASSERT_EQ(flat.size(), 3u);
  EXPECT_EQ(unflatten(p, flat), e);
  EXPECT_EQ(leaves(p).size(), 3u);
  EXPECT_THROW(unflatten(p, std::span<const Element>(flat.data(), 2)), DomainError);
}

TEST(Poset, OrderAxiomsOnDiamond) {
  Poset p = diamond();
  auto es = elements(p);
  for (const auto& a : es) {
    EXPECT_TRUE(leq(p, a, a));
    for (const auto& b : es) {
      if (leq(p, a, b) && leq(p, b, a)) EXPECT_EQ(a, b);
      for (const auto& c : es) {
        if (leq(p, a, b) && leq(p, b, c)) EXPECT_TRUE(leq(p, a, c));
      }
    }
  }
}
