#include <gtest/gtest.h>

#include <random>

#include "mcdp/antichain.hpp"

using namespace mcdp;

namespace {

Poset R2() { return product(Poset::real("1"), Poset::real("1")); }
Element P(double a, double b) { return Element::pair(Element::real(a), Element::real(b)); }

Antichain ac(std::vector<Element> xs) { return min_elements(xs, R2()); }

}  // namespace

TEST(Antichain, MinElementsDropsDominated) {
  auto a = ac({P(1, 2), P(2, 1), P(2, 2), P(1, 2)});
  EXPECT_EQ(a, Antichain::from_elements(R2(), {P(1, 2), P(2, 1)}));
  EXPECT_EQ(a.size(), 2u);
}

TEST(Antichain, FromElementsValidates) {
  EXPECT_THROW(Antichain::from_elements(R2(), {P(1, 1), P(2, 2)}), DomainError);
  EXPECT_THROW(Antichain::from_elements(R2(), {Element::real(1)}), DomainError);
}

TEST(Antichain, OrderIsReverseUpClosureInclusion) {
  // {(1,1)} is better than {(2,2)}: everything above (2,2) is above (1,1).
  EXPECT_TRUE(ac_leq(ac({P(1, 1)}), ac({P(2, 2)})));
  EXPECT_FALSE(ac_leq(ac({P(2, 2)}), ac({P(1, 1)})));
  // The empty antichain is the top.
  EXPECT_TRUE(ac_leq(ac({P(5, 5)}), Antichain(R2())));
  EXPECT_FALSE(ac_leq(Antichain(R2()), ac({P(5, 5)})));
  EXPECT_TRUE(ac_leq(ac({P(0, 2), P(2, 0)}), ac({P(1, 2), P(3, 0)})));
}

TEST(Antichain, UnionProductFilter) {
  auto u = ac_union_min(ac({P(1, 3)}), ac({P(3, 1), P(2, 4)}));
  EXPECT_EQ(u, ac({P(1, 3), P(3, 1)}));

  Poset r = Poset::real("1");
  auto a = min_elements(std::vector<Element>{Element::real(1)}, r);
  auto b = min_elements(std::vector<Element>{Element::real(2)}, r);
  EXPECT_EQ(ac_product(a, b), ac({P(1, 2)}));
  EXPECT_TRUE(ac_product(a, Antichain(r)).empty());

  auto f = filter_above(ac({P(0, 3), P(2, 2), P(3, 0)}), P(1, 1));
  EXPECT_EQ(f, ac({P(2, 2)}));
  EXPECT_TRUE(up_membership(ac({P(1, 2)}), P(1, 5)));
  EXPECT_FALSE(up_membership(ac({P(1, 2)}), P(0, 5)));
}

TEST(Antichain, MismatchedPosetsThrow) {
  Antichain a = Antichain::singleton(Poset::real("g"), Element::real(1));
  Antichain b = Antichain::singleton(Poset::real("kg"), Element::real(1));
  EXPECT_THROW(ac_leq(a, b), DomainError);
}

TEST(Antichain, RandomMinElementsAreMinimalAndCover) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> d(0, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Element> pts;
    for (int i = 0; i < 12; ++i) pts.push_back(P(d(rng), d(rng)));
    auto a = ac(pts);
    for (const auto& x : a)
      for (const auto& y : a)
        if (!(x == y)) EXPECT_FALSE(leq(R2(), x, y));
    for (const auto& p : pts) EXPECT_TRUE(up_membership(a, p));
    // ac_leq is a preorder that is antisymmetric on antichains.
    auto b = ac({pts[0], pts[1]});
    EXPECT_TRUE(ac_leq(a, b));
    if (ac_leq(b, a)) EXPECT_EQ(a, b);
  }
}
