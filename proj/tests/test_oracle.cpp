#include <gtest/gtest.h>

#include <random>

#include "mcdp/oracle.hpp"

using namespace mcdp;

TEST(Oracle, UpSetsOfChain) {
  oracle::FiniteTable t(Poset::chain({"0", "1", "2"}));
  // Up-sets of a 3-chain: {}, {2}, {1,2}, {0,1,2}.
  EXPECT_EQ(t.all_up_sets().size(), 4u);
}

TEST(Oracle, UpSetsOfAntichainPoset) {
  oracle::FiniteTable t(Poset::finite({"b", "x", "y"}, {{"b", "x"}, {"b", "y"}}));
  // {}, {x}, {y}, {x,y}, {b,x,y}.
  EXPECT_EQ(t.all_up_sets().size(), 5u);
}

TEST(Oracle, RejectsRealPosets) {
  Poset p = Poset::real("1");
  EXPECT_THROW(oracle::brute_compose(Term::atom("a"), Valuation{{"a", identity(p)}}), UnsupportedError);
}

TEST(Oracle, BruteLfpOnChain) {
  Poset c = Poset::chain({"0", "1", "2"});
  auto body = lift(product(c, c), c, [](const Element& f) {
    return Element::finite(std::min<std::size_t>(f[0].as_finite() + f[1].as_finite(), 2));
  });
  EXPECT_EQ(oracle::brute_lfp(body, Element::finite(1)), Antichain::singleton(c, Element::finite(2)));
  EXPECT_EQ(oracle::brute_lfp(body, Element::finite(0)), Antichain::singleton(c, Element::finite(0)));
}

TEST(Oracle, PhiEvalMatchesBruteForce) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = oracle::random_instance(rng);
    auto dp = compose_term(inst.term, inst.valuation);
    auto brute = oracle::brute_compose(inst.term, inst.valuation);
    ASSERT_EQ(brute.size(), inst.queries.size());
    for (const auto& f : inst.queries) EXPECT_EQ(dp.eval(f), brute.at(f)) << inst.term.to_string();
  }
}

TEST(Oracle, KleeneAscendsToBruteLfp) {
  std::mt19937_64 rng(102);
  oracle::InstanceOptions opt;
  opt.max_depth = 2;
  int loops = 0;
  for (int trial = 0; trial < 400 && loops < 50; ++trial) {
    auto inst = oracle::random_instance(rng, opt);
    if (inst.term.kind() != TermKind::loop) continue;
    ++loops;
    auto body = compose_term(inst.term.body(), inst.valuation);
    for (const auto& f1 : elements(body.funsp().part(0))) {
      std::vector<Antichain> iterates;
      auto rep = kleene_solve(body, f1, kDefaultMaxIter, [&](const Antichain& a) { iterates.push_back(a); });
      ASSERT_TRUE(rep.converged);
      EXPECT_EQ(rep.result, oracle::brute_lfp(body, f1)) << inst.term.to_string();
      for (std::size_t k = 0; k + 1 < iterates.size(); ++k) EXPECT_TRUE(ac_leq(iterates[k], iterates[k + 1]));
    }
  }
  EXPECT_GT(loops, 10);
}

TEST(Oracle, GeneratorRespectsLimits) {
  std::mt19937_64 rng(103);
  oracle::InstanceOptions opt;
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = oracle::random_instance(rng, opt);
    EXPECT_LE(inst.term.depth(), opt.max_depth);
    EXPECT_LE(inst.queries.size(), opt.max_space);
    for (const auto& name : atoms(inst.term)) EXPECT_TRUE(inst.valuation.count(name)) << name;
  }
}

TEST(Oracle, Deterministic) {
  std::mt19937_64 a(7), b(7);
  for (int trial = 0; trial < 10; ++trial) {
    auto x = oracle::random_instance(a), y = oracle::random_instance(b);
    EXPECT_EQ(x.term.to_string(), y.term.to_string());
  }
}
