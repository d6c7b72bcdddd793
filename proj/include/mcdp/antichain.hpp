#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcdp/element.hpp"
#include "mcdp/errors.hpp"
#include "mcdp/poset.hpp"

namespace mcdp {

// A finite set of mutually incomparable elements of a poset: a Pareto front.
// The empty antichain means "infeasible". Elements are kept sorted and
// deduplicated, so equality is set equality.
class Antichain {
 public:
  explicit Antichain(Poset poset) : poset_(std::move(poset)) {}

  // Validates membership and pairwise incomparability.
  static Antichain from_elements(Poset poset, std::vector<Element> elems) {
    for (const auto& e : elems) require_member(poset, e);
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    for (std::size_t i = 0; i < elems.size(); ++i) {
      for (std::size_t j = 0; j < elems.size(); ++j) {
        if (i != j && leq(poset, elems[i], elems[j])) {
          throw DomainError("not an antichain: " + format_element(poset, elems[i]) + " precedes " +
                            format_element(poset, elems[j]));
        }
      }
    }
    return Antichain(std::move(poset), std::move(elems), Trusted{});
  }

  static Antichain singleton(Poset poset, Element e) {
    require_member(poset, e);
    std::vector<Element> v;
    v.push_back(std::move(e));
    return Antichain(std::move(poset), std::move(v), Trusted{});
  }

  const Poset& poset() const { return poset_; }
  std::span<const Element> elements() const { return elems_; }
  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }
  bool contains(const Element& e) const { return std::binary_search(elems_.begin(), elems_.end(), e); }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < elems_.size(); ++i) {
      s += (i ? ", " : "") + format_element(poset_, elems_[i]);
    }
    return s + "}";
  }

  friend bool operator==(const Antichain& a, const Antichain& b) {
    return a.elems_ == b.elems_ && a.poset_ == b.poset_;
  }

 private:
  struct Trusted {};
  Antichain(Poset poset, std::vector<Element> sorted_minimal, Trusted)
      : poset_(std::move(poset)), elems_(std::move(sorted_minimal)) {}

  friend Antichain min_elements_unchecked(const Poset&, std::vector<Element>);
  friend Antichain ac_product(const Antichain&, const Antichain&);
  friend Antichain filter_above(const Antichain&, const Element&);

  Poset poset_;
  std::vector<Element> elems_;
};

// Min without membership validation; callers guarantee points lie in p.
inline Antichain min_elements_unchecked(const Poset& p, std::vector<Element> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<Element> mins;
  mins.reserve(points.size());
  for (auto& x : points) {
    bool dominated = false;
    for (const auto& m : mins) {
      if (leq(p, m, x)) {
        dominated = true;
        break;
      }
    }
    if (dominated) continue;
    std::erase_if(mins, [&](const Element& m) { return leq(p, x, m); });
    mins.push_back(std::move(x));
  }
  std::sort(mins.begin(), mins.end());
  return Antichain(p, std::move(mins), Antichain::Trusted{});
}

// The ⪯-minimal points of a finite set, deduplicated.
inline Antichain min_elements(std::span<const Element> points, const Poset& p) {
  for (const auto& x : points) require_member(p, x);
  return min_elements_unchecked(p, std::vector<Element>(points.begin(), points.end()));
}

namespace detail {
inline void require_same_poset(const Antichain& a, const Antichain& b, const char* op) {
  if (!(a.poset() == b.poset())) {
    throw DomainError(std::string(op) + ": antichains over different posets " + a.poset().to_string() +
                      " and " + b.poset().to_string());
  }
}
}  // namespace detail

// S1 ⪯ S2 iff ↑S1 ⊇ ↑S2: every element of S2 dominates some element of S1.
inline bool ac_leq(const Antichain& s1, const Antichain& s2) {
  detail::require_same_poset(s1, s2, "ac_leq");
  const auto& p = s1.poset();
  for (const auto& b : s2) {
    bool covered = false;
    for (const auto& a : s1) {
      if (leq(p, a, b)) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

inline Antichain ac_union_min(const Antichain& s1, const Antichain& s2) {
  detail::require_same_poset(s1, s2, "ac_union_min");
  std::vector<Element> pts(s1.begin(), s1.end());
  pts.insert(pts.end(), s2.begin(), s2.end());
  return min_elements_unchecked(s1.poset(), std::move(pts));
}

// All pairs (s1, s2). Lives in product(S1.poset, S2.poset) and is an antichain
// by construction.
inline Antichain ac_product(const Antichain& s1, const Antichain& s2) {
  Poset p = product(s1.poset(), s2.poset());
  std::vector<Element> pairs;
  pairs.reserve(s1.size() * s2.size());
  for (const auto& a : s1) {
    for (const auto& b : s2) pairs.push_back(Element::pair(a, b));
  }
  // lexicographic order of pairs follows from the sorted inputs
  return Antichain(std::move(p), std::move(pairs), Antichain::Trusted{});
}

// {s ∈ S : r ⪯ s}
inline Antichain filter_above(const Antichain& s, const Element& r) {
  const auto& p = s.poset();
  require_member(p, r);
  std::vector<Element> kept;
  for (const auto& x : s) {
    if (leq(p, r, x)) kept.push_back(x);
  }
  return Antichain(p, std::move(kept), Antichain::Trusted{});
}

// r ∈ ↑S: is r sufficient?
inline bool up_membership(const Antichain& s, const Element& r) {
  const auto& p = s.poset();
  require_member(p, r);
  return std::any_of(s.begin(), s.end(), [&](const Element& x) { return leq(p, x, r); });
}

}  // namespace mcdp
