#pragma once

// Brute-force reference semantics on finite posets.
//
// Everything here works on explicit up-sets (bit vectors over an enumerated
// poset) and never calls the series/par/loop operators, the antichain
// algebra or the fixed-point iteration it is meant to check. Only the atoms'
// own evaluation and the poset order are shared with the solver.

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mcdp/dp.hpp"
#include "mcdp/term.hpp"
#include "mcdp/uncertainty.hpp"

namespace mcdp::oracle {

inline constexpr std::size_t kMaxElements = 64;
inline constexpr std::size_t kMaxUpSets = 200'000;

using UpSet = std::vector<char>;

// An enumerated finite poset with its order matrix.
class FiniteTable {
 public:
  explicit FiniteTable(Poset p) : poset_(std::move(p)) {
    if (!poset_.is_enumerable()) throw UnsupportedError("oracle needs a finite poset, got " + poset_.to_string());
    elems_ = elements(poset_);
    for (std::size_t i = 0; i < elems_.size(); ++i) index_.emplace(elems_[i], i);
    const std::size_t n = elems_.size();
    order_.assign(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) order_[i][j] = leq(poset_, elems_[i], elems_[j]) ? 1 : 0;
  }

  const Poset& poset() const { return poset_; }
  std::size_t size() const { return elems_.size(); }
  const Element& at(std::size_t i) const { return elems_[i]; }
  std::size_t index(const Element& e) const {
    auto it = index_.find(e);
    if (it == index_.end()) throw DomainError("oracle: element not in " + poset_.to_string());
    return it->second;
  }
  bool below(std::size_t a, std::size_t b) const { return order_[a][b] != 0; }

  template <class Range>
  UpSet up(const Range& points) const {
    UpSet u(size(), 0);
    for (const auto& p : points) {
      std::size_t i = index(p);
      for (std::size_t j = 0; j < size(); ++j)
        if (order_[i][j]) u[j] = 1;
    }
    return u;
  }

  UpSet up_of_index(std::size_t i) const {
    UpSet u(size(), 0);
    for (std::size_t j = 0; j < size(); ++j) u[j] = order_[i][j];
    return u;
  }

  std::vector<std::size_t> minimal(const UpSet& u) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i) {
      if (!u[i]) continue;
      bool is_min = true;
      for (std::size_t j = 0; j < size() && is_min; ++j) {
        if (j != i && u[j] && order_[j][i]) is_min = false;
      }
      if (is_min) out.push_back(i);
    }
    return out;
  }

  Antichain to_antichain(const UpSet& u) const {
    std::vector<Element> pts;
    for (std::size_t i : minimal(u)) pts.push_back(elems_[i]);
    return Antichain::from_elements(poset_, std::move(pts));
  }

  // Every up-set, each exactly once (in bijection with the antichains).
  std::vector<UpSet> all_up_sets() const {
    if (size() > kMaxElements) {
      throw UnsupportedError("oracle: poset with " + std::to_string(size()) + " elements is too large");
    }
    // maximal elements first: sort by size of the down-set, descending
    std::vector<std::size_t> order(size());
    std::vector<std::size_t> down(size(), 0);
    for (std::size_t i = 0; i < size(); ++i) {
      order[i] = i;
      for (std::size_t j = 0; j < size(); ++j) down[i] += order_[j][i];
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return down[a] > down[b]; });
    std::vector<UpSet> out;
    UpSet cur(size(), 0);
    enumerate(order, 0, cur, out);
    return out;
  }

 private:
  void enumerate(const std::vector<std::size_t>& order, std::size_t k, UpSet& cur, std::vector<UpSet>& out) const {
    if (out.size() > kMaxUpSets) throw UnsupportedError("oracle: too many antichains to enumerate");
    if (k == order.size()) {
      out.push_back(cur);
      return;
    }
    const std::size_t x = order[k];
    enumerate(order, k + 1, cur, out);
    for (std::size_t y = 0; y < size(); ++y) {
      if (y != x && order_[x][y] && !cur[y]) return;  // x in the set forces everything above it
    }
    cur[x] = 1;
    enumerate(order, k + 1, cur, out);
    cur[x] = 0;
  }

  Poset poset_;
  std::vector<Element> elems_;
  std::map<Element, std::size_t> index_;
  std::vector<std::vector<char>> order_;
};

// A DP tabulated as f-index -> up-set of resources.
struct Tabulated {
  std::shared_ptr<FiniteTable> fun;
  std::shared_ptr<FiniteTable> res;
  std::vector<UpSet> rows;
};

namespace detail {

inline UpSet unite(UpSet a, const UpSet& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] | b[i];
  return a;
}

inline bool includes(const UpSet& big, const UpSet& small) {
  for (std::size_t i = 0; i < big.size(); ++i)
    if (small[i] && !big[i]) return false;
  return true;
}

inline Tabulated tabulate_atom(const DesignProblem& dp) {
  Tabulated t{std::make_shared<FiniteTable>(dp.funsp()), std::make_shared<FiniteTable>(dp.ressp()), {}};
  for (std::size_t i = 0; i < t.fun->size(); ++i) t.rows.push_back(t.res->up(dp.eval(t.fun->at(i))));
  return t;
}

// Least fixed point of U ↦ ∪_{r ∈ min U} (body(f1, r) ∩ ↑r) over all up-sets,
// least in the antichain order meaning largest up-set.
inline UpSet least_fixed_point(const Tabulated& body, const FiniteTable& f1_table, std::size_t f1,
                               const std::vector<UpSet>& candidates) {
  const FiniteTable& rt = *body.res;
  std::vector<const UpSet*> fixed;
  for (const auto& u : candidates) {
    UpSet image(rt.size(), 0);
    for (std::size_t r : rt.minimal(u)) {
      const std::size_t fi = body.fun->index(Element::pair(f1_table.at(f1), rt.at(r)));
      const UpSet& h = body.rows[fi];
      for (std::size_t j = 0; j < rt.size(); ++j)
        if (h[j] && rt.below(r, j)) image[j] = 1;
    }
    if (image == u) fixed.push_back(&u);
  }
  for (const UpSet* cand : fixed) {
    if (std::all_of(fixed.begin(), fixed.end(), [&](const UpSet* o) { return includes(*cand, *o); })) return *cand;
  }
  throw Error("oracle: no least fixed point (is the body monotone?)");
}

inline Tabulated tabulate(const Term& t, const Valuation& val) {
  switch (t.kind()) {
    case TermKind::atom: {
      auto it = val.find(t.name());
      if (it == val.end()) throw CompositionError("oracle: unknown atom '" + t.name() + "'");
      return tabulate_atom(it->second);
    }
    case TermKind::series: {
      Tabulated a = tabulate(t.left(), val);
      Tabulated b = tabulate(t.right(), val);
      if (!(a.res->poset() == b.fun->poset())) throw CompositionError("oracle: series interface mismatch");
      Tabulated out{a.fun, b.res, {}};
      for (std::size_t i = 0; i < a.fun->size(); ++i) {
        UpSet u(b.res->size(), 0);
        for (std::size_t m : a.res->minimal(a.rows[i])) u = unite(std::move(u), b.rows[b.fun->index(a.res->at(m))]);
        out.rows.push_back(std::move(u));
      }
      return out;
    }
    case TermKind::par: {
      Tabulated a = tabulate(t.left(), val);
      Tabulated b = tabulate(t.right(), val);
      Tabulated out{std::make_shared<FiniteTable>(product(a.fun->poset(), b.fun->poset())),
                    std::make_shared<FiniteTable>(product(a.res->poset(), b.res->poset())), {}};
      for (std::size_t i = 0; i < out.fun->size(); ++i) {
        const Element& f = out.fun->at(i);
        const UpSet& ua = a.rows[a.fun->index(f[0])];
        const UpSet& ub = b.rows[b.fun->index(f[1])];
        UpSet u(out.res->size(), 0);
        for (std::size_t j = 0; j < out.res->size(); ++j) {
          const Element& r = out.res->at(j);
          u[j] = ua[a.res->index(r[0])] && ub[b.res->index(r[1])];
        }
        out.rows.push_back(std::move(u));
      }
      return out;
    }
    case TermKind::loop: {
      Tabulated body = tabulate(t.body(), val);
      const Poset& f = body.fun->poset();
      if (f.kind() != PosetKind::product || f.arity() != 2 || !(f.part(1) == body.res->poset())) {
        throw CompositionError("oracle: loop body has the wrong signature");
      }
      Tabulated out{std::make_shared<FiniteTable>(f.part(0)), body.res, {}};
      const auto candidates = body.res->all_up_sets();
      for (std::size_t i = 0; i < out.fun->size(); ++i) {
        out.rows.push_back(least_fixed_point(body, *out.fun, i, candidates));
      }
      return out;
    }
  }
  throw Error("oracle: bad term");
}

}  // namespace detail

// Least fixed point of the loop map of `body` at f1 by exhaustive search over
// all antichains of the resource space.
inline Antichain brute_lfp(const DesignProblem& body, const Element& f1) {
  const Poset& f = body.funsp();
  if (f.kind() != PosetKind::product || f.arity() != 2 || !(f.part(1) == body.ressp())) {
    throw CompositionError("oracle: loop body has the wrong signature");
  }
  Tabulated tab = detail::tabulate_atom(body);
  FiniteTable f1_table(f.part(0));
  auto candidates = tab.res->all_up_sets();
  UpSet u = detail::least_fixed_point(tab, f1_table, f1_table.index(f1), candidates);
  return tab.res->to_antichain(u);
}

// Semantics of the term at every functionality of its (finite) domain.
inline std::map<Element, Antichain> brute_compose(const Term& t, const Valuation& val) {
  Tabulated tab = detail::tabulate(t, val);
  std::map<Element, Antichain> out;
  for (std::size_t i = 0; i < tab.fun->size(); ++i) out.emplace(tab.fun->at(i), tab.res->to_antichain(tab.rows[i]));
  return out;
}

// ---------------------------------------------------------------------------
// Random finite instances

struct InstanceOptions {
  std::size_t max_depth = 4;
  std::size_t max_poset_size = 5;
  std::size_t max_space = 40;     // elements in any functionality space
  std::size_t max_loop_space = 16;  // elements in a loop's resource space
  std::size_t max_entries = 4;
};

struct AtomType {
  Poset fun;
  Poset res;
};

struct TermSkeleton {
  Term term;
  std::map<std::string, AtomType> atoms;
};

struct FiniteInstance {
  Term term;
  Valuation valuation;
  std::vector<Element> queries;
};

namespace detail {

inline std::size_t count_elements(const Poset& p) {
  switch (p.kind()) {
    case PosetKind::finite: return p.size();
    case PosetKind::product: {
      std::size_t n = 1;
      for (const auto& q : p.parts()) n *= count_elements(q);
      return n;
    }
    default: return 0;
  }
}

class SkeletonBuilder {
 public:
  SkeletonBuilder(std::mt19937_64& rng, const InstanceOptions& opt) : rng_(rng), opt_(opt) {}

  Poset random_base() {
    const std::size_t n = 1 + pick(opt_.max_poset_size);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));
    std::vector<std::pair<std::string, std::string>> order;
    for (std::size_t j = 1; j < n; ++j) order.emplace_back(labels[0], labels[j]);
    std::bernoulli_distribution edge(0.4);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (edge(rng_)) order.emplace_back(labels[i], labels[j]);
    return Poset::finite(std::move(labels), order);
  }

  Poset random_space(double product_bias) {
    std::bernoulli_distribution prod(product_bias);
    if (prod(rng_)) {
      Poset a = random_base();
      Poset b = random_base();
      if (count_elements(a) * count_elements(b) <= opt_.max_loop_space) return product(a, b);
    }
    return random_base();
  }

  Term build(std::size_t depth, const Poset& f, const Poset& r) {
    std::vector<int> options{0};  // atom
    if (depth > 0) {
      options.push_back(1);  // series
      options.push_back(1);
      const bool par_ok = f.kind() == PosetKind::product && f.arity() == 2 && r.kind() == PosetKind::product && r.arity() == 2;
      if (par_ok) {
        options.push_back(2);
        options.push_back(2);
      }
      const std::size_t loop_f = count_elements(f) * count_elements(r);
      if (count_elements(r) <= opt_.max_loop_space && loop_f <= opt_.max_space) {
        options.push_back(3);
        options.push_back(3);
      }
    }
    switch (options[pick(options.size())]) {
      case 1: {
        Poset mid = random_space(0.35);
        Term a = build(depth - 1, f, mid);
        Term b = build(depth - 1, mid, r);
        return Term::series(a, b);
      }
      case 2: return Term::par(build(depth - 1, f.part(0), r.part(0)), build(depth - 1, f.part(1), r.part(1)));
      case 3: return Term::loop(build(depth - 1, product(f, r), r));
      default: {
        std::string name = "a" + std::to_string(atoms_.size());
        atoms_.emplace(name, AtomType{f, r});
        return Term::atom(name);
      }
    }
  }

  std::map<std::string, AtomType> take_atoms() { return std::move(atoms_); }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  std::mt19937_64& rng_;
  const InstanceOptions& opt_;
  std::map<std::string, AtomType> atoms_;
};

inline std::vector<CatalogueEntry> random_entries(std::mt19937_64& rng, const AtomType& type, std::size_t count) {
  auto fs = elements(type.fun);
  auto rs = elements(type.res);
  std::vector<CatalogueEntry> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back({fs[std::uniform_int_distribution<std::size_t>(0, fs.size() - 1)(rng)],
                   rs[std::uniform_int_distribution<std::size_t>(0, rs.size() - 1)(rng)]});
  }
  return out;
}

}  // namespace detail

// Random well-typed term of depth <= max_depth over finite posets. The top
// level is a loop-friendly shape half of the time.
inline TermSkeleton random_skeleton(std::mt19937_64& rng, const InstanceOptions& opt = {}) {
  detail::SkeletonBuilder b(rng, opt);
  Poset f = b.random_space(0.4);
  Poset r = b.random_space(0.4);
  Term t = b.build(opt.max_depth, f, r);
  return TermSkeleton{t, b.take_atoms()};
}

inline Valuation random_valuation(std::mt19937_64& rng, const TermSkeleton& sk, const InstanceOptions& opt = {}) {
  Valuation val;
  for (const auto& [name, type] : sk.atoms) {
    std::uniform_int_distribution<std::size_t> kinds(0, 9);
    const std::size_t k = kinds(rng);
    if (k == 0 && type.fun == type.res) {
      val.emplace(name, identity(type.fun));
    } else {
      // at least one entry most of the time, empty catalogues are always infeasible
      std::size_t n = std::uniform_int_distribution<std::size_t>(k == 1 ? 0 : 1, opt.max_entries)(rng);
      val.emplace(name, catalogue(type.fun, type.res, detail::random_entries(rng, type, n)));
    }
  }
  return val;
}

inline FiniteInstance random_instance(std::mt19937_64& rng, const InstanceOptions& opt = {}) {
  TermSkeleton sk = random_skeleton(rng, opt);
  Valuation val = random_valuation(rng, sk, opt);
  Poset f = compose_term(sk.term, val).funsp();
  return FiniteInstance{sk.term, std::move(val), elements(f)};
}

// Two uncertain valuations v1 ⪯ v2 built from nested entry pools: more
// catalogue entries means fewer resources, so pools
// upper2 ⊆ upper1 ⊆ lower1 ⊆ lower2 give lower2 ⪯ lower1 ⪯ upper1 ⪯ upper2.
inline std::pair<UncertainValuation, UncertainValuation> random_nested_valuations(std::mt19937_64& rng, const TermSkeleton& sk,
                                                                                  std::size_t pool_size = 6) {
  UncertainValuation v1, v2;
  for (const auto& [name, type] : sk.atoms) {
    auto pool = detail::random_entries(rng, type, pool_size);
    std::vector<std::size_t> cuts(4);
    for (auto& c : cuts) c = std::uniform_int_distribution<std::size_t>(0, pool_size)(rng);
    std::sort(cuts.begin(), cuts.end());
    auto prefix = [&](std::size_t k) {
      return catalogue(type.fun, type.res, std::vector<CatalogueEntry>(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k)));
    };
    v2.emplace(name, UncertainDP{prefix(cuts[3]), prefix(cuts[0])});
    v1.emplace(name, UncertainDP{prefix(cuts[2]), prefix(cuts[1])});
  }
  return {std::move(v1), std::move(v2)};
}

}  // namespace mcdp::oracle
