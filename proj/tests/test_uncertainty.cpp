#include <gtest/gtest.h>

#include <random>

#include "mcdp/oracle.hpp"
#include "mcdp/uncertainty.hpp"

using namespace mcdp;

namespace {

Element R(double v) { return Element::real(v); }

DesignProblem scaled(const Poset& p, double k) {
  return lift(p, p, [k](const Element& f) { return R(k * f.as_real()); });
}

}  // namespace

TEST(UncertainDP, CheckedRejectsInvertedBounds) {
  Poset p = Poset::real("1");
  EXPECT_NO_THROW(UncertainDP::checked(scaled(p, 1), scaled(p, 2)));
  EXPECT_THROW(UncertainDP::checked(scaled(p, 2), scaled(p, 1)), DomainError);
  EXPECT_THROW(UncertainDP::checked(identity(p), identity(Poset::real("g"))), DomainError);
}

TEST(UncertainDP, IntervalOrder) {
  Poset p = Poset::real("1");
  UncertainDP wide{scaled(p, 1), scaled(p, 4)};
  UncertainDP narrow{scaled(p, 2), scaled(p, 3)};
  // Narrower intervals sit below wider ones.
  EXPECT_TRUE(udp_leq_check(narrow, wide));
  EXPECT_FALSE(udp_leq_check(wide, narrow));
  EXPECT_TRUE(udp_leq_check(wide, wide));
}

TEST(Verdict, ThreeWay) {
  Poset p = Poset::real("1");
  auto limited = lift(p, p, [](const Element& f) { return R(f.as_real()); });
  auto cat = catalogue(p, p, {{R(2), R(1)}});
  auto cat_small = catalogue(p, p, {{R(1), R(1)}});
  UncertainDP u{cat, cat_small};
  EXPECT_EQ(solve_uncertain(u, R(0.5)).verdict, Verdict::feasible);
  EXPECT_EQ(solve_uncertain(u, R(1.5)).verdict, Verdict::indeterminate);
  EXPECT_EQ(solve_uncertain(u, R(3)).verdict, Verdict::infeasible);
  EXPECT_EQ(solve_uncertain(udp_from_dp(limited), R(3)).verdict, Verdict::feasible);
  EXPECT_STREQ(to_string(Verdict::indeterminate), "indeterminate");
}

TEST(ScaleCatalogue, CatalogueSides) {
  Poset p = Poset::real("1");
  auto u = scale_catalogue_uncertain(catalogue(p, p, {{R(10), R(10)}}), 0.1);
  auto lo = u.lower.eval(R(10.5));
  ASSERT_EQ(lo.size(), 1u);
  EXPECT_NEAR(lo.begin()->as_real(), 9.0, 1e-12);
  EXPECT_TRUE(u.upper.eval(R(10)).empty());
  auto hi = u.upper.eval(R(8));
  EXPECT_NEAR(hi.begin()->as_real(), 11.0, 1e-12);
  EXPECT_TRUE(udp_leq_check(udp_from_dp(u.lower), u));
}

TEST(ScaleCatalogue, SpecificAndAffineBracketNominal) {
  Poset e = Poset::real("Wh");
  Poset mc = product(Poset::real("kg"), Poset::real("$"));
  auto nominal = specific_catalogue(e, mc, SpecificParams{{}, {Technology{"LiPo", {{150}, {2.5}}}}});
  auto u = scale_catalogue_uncertain(nominal, 0.25);
  auto s = sample_points(e);
  EXPECT_TRUE(dp_leq_check(u.lower, nominal, s));
  EXPECT_TRUE(dp_leq_check(nominal, u.upper, s));

  Poset r = Poset::real("W");
  auto aff = affine(r, r, AffineParams{{{2.0}}, {1.0}, R(10)});
  auto ua = scale_catalogue_uncertain(aff, 0.1);
  auto sr = sample_points(r);
  EXPECT_TRUE(dp_leq_check(ua.lower, aff, sr));
  EXPECT_TRUE(dp_leq_check(aff, ua.upper, sr));
  EXPECT_FALSE(ua.lower.eval(R(10.5)).empty());
  EXPECT_TRUE(ua.upper.eval(R(9.5)).empty());
}

TEST(ScaleCatalogue, Rejections) {
  Poset p = Poset::real("1");
  EXPECT_THROW(scale_catalogue_uncertain(identity(p), 0.1), DomainError);
  EXPECT_THROW(scale_catalogue_uncertain(catalogue(p, p, {}), 1.0), DomainError);
  EXPECT_THROW(scale_catalogue_uncertain(catalogue(p, p, {}), -0.1), DomainError);
  auto zero = scale_catalogue_uncertain(catalogue(p, p, {{R(1), R(1)}}), 0.0);
  EXPECT_EQ(zero.lower.eval(R(1)), zero.upper.eval(R(1)));
}

TEST(ScaleCatalogue, LargerFractionIsLessPrecise) {
  Poset p = Poset::real("1");
  auto cat = catalogue(p, product(p, p), {{R(3), Element::pair(R(1), R(2))}, {R(5), Element::pair(R(4), R(1))}});
  auto samples = sample_points(p);
  double prev = 0.0;
  for (double frac : {0.05, 0.1, 0.25, 0.5}) {
    EXPECT_TRUE(udp_leq_check(scale_catalogue_uncertain(cat, prev), scale_catalogue_uncertain(cat, frac), samples)) << frac;
    prev = frac;
  }
}

TEST(ComposeUncertain, DegenerateMatchesExact) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = oracle::random_instance(rng);
    auto u = compose_uncertain(inst.term, degenerate(inst.valuation));
    auto exact = compose_term(inst.term, inst.valuation);
    for (const auto& f : inst.queries) {
      EXPECT_EQ(u.lower.eval(f), exact.eval(f));
      EXPECT_EQ(u.upper.eval(f), exact.eval(f));
    }
  }
}

TEST(ComposeUncertain, MonotoneInValuation) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 60; ++trial) {
    auto sk = oracle::random_skeleton(rng);
    auto [v1, v2] = oracle::random_nested_valuations(rng, sk);
    ASSERT_TRUE(valuation_leq_check(v1, v2));
    auto u1 = compose_uncertain(sk.term, v1);
    auto u2 = compose_uncertain(sk.term, v2);
    auto fs = elements(u1.funsp());
    EXPECT_TRUE(udp_leq_check(u1, u2, fs)) << sk.term.to_string();
    EXPECT_TRUE(dp_leq_check(u1.lower, u1.upper, fs)) << sk.term.to_string();
    EXPECT_TRUE(dp_leq_check(u2.lower, u2.upper, fs)) << sk.term.to_string();
  }
}

TEST(ComposeUncertain, VerdictConsistentWithExactSide) {
  // Whenever both bounds agree, any DP between them must agree too.
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    auto sk = oracle::random_skeleton(rng);
    auto [v1, v2] = oracle::random_nested_valuations(rng, sk);
    auto outer = compose_uncertain(sk.term, v2);
    auto inner = compose_term(sk.term, upper_valuation(v1));
    for (const auto& f : elements(outer.funsp())) {
      auto rep = solve_uncertain(outer, f);
      if (rep.verdict == Verdict::feasible) EXPECT_FALSE(inner.eval(f).empty());
      if (rep.verdict == Verdict::infeasible) EXPECT_TRUE(inner.eval(f).empty());
    }
  }
}

TEST(ValuationOrder, MissingAtomIsIncomparable) {
  Poset p = Poset::real("1");
  UncertainValuation a{{"x", udp_from_dp(identity(p))}};
  UncertainValuation b{{"y", udp_from_dp(identity(p))}};
  EXPECT_FALSE(valuation_leq_check(a, b));
  EXPECT_TRUE(valuation_leq_check(a, a));
}
