#include <gtest/gtest.h>

#include <cmath>

#include "mcdp/relaxations.hpp"

using namespace mcdp;

namespace {

Element R(double v) { return Element::real(v); }

std::vector<Element> f_grid(std::size_t count, double hi) {
  std::vector<Element> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(R(hi * static_cast<double>(i) / static_cast<double>(count - 1)));
  return out;
}

// Every point of the antichain satisfies (or violates) the exact constraint.
bool all_points(const Antichain& a, const std::function<bool(double, double)>& pred) {
  for (const auto& e : a)
    if (!pred(e[0].as_real(), e[1].as_real())) return false;
  return true;
}

}  // namespace

TEST(Rounding, FloorCeilGrid) {
  EXPECT_EQ(floor_step(0.7, 0.25), 0.5);
  EXPECT_EQ(ceil_step(0.7, 0.25), 0.75);
  EXPECT_EQ(floor_step(0.75, 0.25), 0.75);
  EXPECT_EQ(ceil_step(0.75, 0.25), 0.75);
  EXPECT_EQ(ceil_step(0.0, 0.25), 0.0);
  EXPECT_TRUE(std::isinf(ceil_step(kInfinity, 0.25)));
  // 0.1 is not exact; the grid value still brackets x.
  for (double x : {0.3, 0.7, 1.1, 2.9}) {
    EXPECT_LE(floor_step(x, 0.1), x);
    EXPECT_GE(ceil_step(x, 0.1), x);
  }
}

TEST(UncertainIdentity, BracketsIdentity) {
  auto u = uncertain_identity(0.5, "m");
  auto samples = sample_points(u.funsp());
  auto id = identity(Poset::real("m"));
  EXPECT_TRUE(dp_leq_check(u.lower, id, samples));
  EXPECT_TRUE(dp_leq_check(id, u.upper, samples));
  EXPECT_EQ(u.lower.eval(R(1.3)).begin()->as_real(), 1.0);
  EXPECT_EQ(u.upper.eval(R(1.3)).begin()->as_real(), 1.5);
  EXPECT_THROW(uncertain_identity(0.0, "m"), DomainError);
  EXPECT_THROW(uncertain_identity(-1.0, "m"), DomainError);
}

TEST(UncertainIdentity, DyadicChainAndGap) {
  std::vector<Element> grid;
  for (int i = 0; i < 64; ++i) grid.push_back(R(0.0371 * i));
  for (int a = -10; a < 0; ++a) {
    const double alpha = std::ldexp(1.0, a), beta = 2 * alpha;
    EXPECT_TRUE(udp_leq_check(uncertain_identity(alpha, "1"), uncertain_identity(beta, "1"), grid)) << alpha;
  }
  auto u = uncertain_identity(0.125, "1");
  for (const auto& x : grid) {
    double gap = u.upper.eval(x).begin()->as_real() - u.lower.eval(x).begin()->as_real();
    bool multiple = std::fmod(x.as_real(), 0.125) == 0.0;
    EXPECT_EQ(gap, multiple ? 0.0 : 0.125) << x.as_real();
  }
}

TEST(InjectTolerance, SeriesWithRounding) {
  Poset p = Poset::real("m");
  Valuation val{{"a", catalogue(p, p, {{R(1), R(2)}, {R(2), R(5)}})}};
  auto uval = inject_tolerance(val, "a", 0.5);
  EXPECT_EQ(uval.at("a").lower.eval(R(1.2)).begin()->as_real(), 2.0);
  EXPECT_EQ(uval.at("a").upper.eval(R(1.2)).begin()->as_real(), 5.0);
  EXPECT_THROW(inject_tolerance(val, "zz", 0.5), DomainError);
  EXPECT_THROW(inject_tolerance(val, "a", 0.5, 3), DomainError);

  Poset pp = product(Poset::chain({"lo", "hi"}), p);
  Valuation two{{"b", identity(pp)}};
  EXPECT_THROW(inject_tolerance(two, "b", 0.5), DomainError);
  EXPECT_THROW(inject_tolerance(two, "b", 0.5, 0), DomainError);
  auto ok = inject_tolerance(two, "b", 0.5, 1);
  auto up = ok.at("b").upper.eval(Element::pair(Element::finite(1), R(0.2)));
  EXPECT_EQ((*up.begin())[1].as_real(), 0.5);
}

TEST(VanDerCorput, Prefix) {
  EXPECT_EQ(van_der_corput(5), (std::vector<double>{0, 0.5, 0.25, 0.75, 0.125}));
  auto long_seq = van_der_corput(33);
  auto short_seq = van_der_corput(17);
  EXPECT_TRUE(std::equal(short_seq.begin(), short_seq.end(), long_seq.begin()));
  EXPECT_THROW(van_der_corput(0), DomainError);
}

TEST(LowerFromPoints, MeetsOfNeighbours) {
  Poset p = product(Poset::real("1"), Poset::real("1"));
  auto lo = lower_from_points({Element::pair(R(2), R(0)), Element::pair(R(0), R(2)), Element::pair(R(1), R(1))}, p);
  EXPECT_EQ(lo, Antichain::from_elements(p, {Element::pair(R(0), R(1)), Element::pair(R(1), R(0))}));
  EXPECT_THROW(lower_from_points({Element::pair(R(1), R(1))}, p), DomainError);
}

TEST(DualPlus, SandwichAndNesting) {
  auto grid = f_grid(32, 10.0);
  auto exact_sat = [](double f) { return [f](double a, double b) { return a + b >= f * (1 - 1e-15); }; };
  for (std::size_t n = 1; n <= 16; ++n) {
    auto v = relax_sum_vdc(n);
    for (const auto& f : grid) {
      const double x = f.as_real();
      EXPECT_TRUE(all_points(v.upper.eval(f), exact_sat(x))) << n << " " << x;
      EXPECT_TRUE(all_points(v.lower.eval(f), [x](double a, double b) { return a + b <= x; })) << n << " " << x;
    }
    EXPECT_TRUE(udp_leq_check(relax_sum_vdc(n + 1), v, grid)) << n;
  }
}

TEST(DualPlus, UniformIsNotAChain) {
  // Pinned witness: the 3-point uniform relaxation is not inside the 2-point one at f = 1.
  auto grid = std::vector<Element>{R(1)};
  EXPECT_FALSE(udp_leq_check(relax_sum_uniform(3), relax_sum_uniform(2), grid));
  EXPECT_FALSE(dp_leq_check(relax_sum_uniform(2).lower, relax_sum_uniform(3).lower, grid));
}

TEST(DualPlus, UniformStillSandwiches) {
  for (std::size_t n = 1; n <= 8; ++n) {
    auto v = relax_sum_uniform(n);
    for (const auto& f : f_grid(9, 4.0)) {
      const double x = f.as_real();
      EXPECT_TRUE(all_points(v.upper.eval(f), [x](double a, double b) { return a + b >= x * (1 - 1e-15); }));
      EXPECT_TRUE(all_points(v.lower.eval(f), [x](double a, double b) { return a + b <= x; }));
    }
  }
}

TEST(DualTimes, SingleSampleAtBracketEdge) {
  auto v = relax_product_vdc(1, {1, 4}, {1, 4});
  auto up = v.upper.eval(R(4));
  EXPECT_EQ(up, Antichain::singleton(v.ressp(), Element::pair(R(1), R(4))));
  EXPECT_TRUE(v.upper.eval(R(17)).empty());
  EXPECT_TRUE(v.lower.eval(R(17)).empty());
  EXPECT_EQ(v.upper.eval(R(0.5)), Antichain::singleton(v.ressp(), Element::pair(R(1), R(1))));
  EXPECT_THROW(relax_product_vdc(2, {0, 1}), DomainError);
  EXPECT_THROW(relax_product_vdc(2, {2, 1}), DomainError);
}

TEST(DualTimes, SandwichAndNesting) {
  Bracket b1{0.1, 100}, b2{0.01, 10};
  auto grid = f_grid(32, 500.0);
  for (std::size_t n = 1; n <= 16; ++n) {
    auto v = relax_product_vdc(n, b1, b2);
    for (const auto& f : grid) {
      const double x = f.as_real();
      EXPECT_TRUE(all_points(v.upper.eval(f), [x](double a, double b) { return a * b >= x; })) << n << " " << x;
      EXPECT_TRUE(all_points(v.lower.eval(f), [x](double a, double b) { return a * b <= x || (a == 0.1 && b == 0.01); }))
          << n << " " << x;
    }
    EXPECT_TRUE(udp_leq_check(relax_product_vdc(n + 1, b1, b2), v, grid)) << n;
    EXPECT_FALSE(check_monotone(v.lower, grid).has_value());
    EXPECT_FALSE(check_monotone(v.upper, grid).has_value());
  }
}

TEST(DualTimes, RejectsNonDualSpaces) {
  DualSpaces bad{Poset::real("1"), Poset::real("1")};
  EXPECT_THROW(relax_product_vdc(2, {}, {}, bad), DomainError);
  EXPECT_THROW(relax_sum_vdc(2, bad), DomainError);
  EXPECT_THROW(relax_sum_uniform(0), DomainError);
}
