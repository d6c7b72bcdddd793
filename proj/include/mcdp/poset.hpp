#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mcdp/element.hpp"
#include "mcdp/errors.hpp"

namespace mcdp {

enum class PosetKind { real, finite, product };

namespace detail {
struct PosetNode;
}

// An ordered space: the nonnegative reals with a unit tag (plus +inf as top),
// a finite poset given by an explicit order, or a product of posets.
//
// Posets are immutable and cheap to copy. Equality is structural and ignores
// the axis name, which only serves to address query axes by name.
class Poset {
 public:
  static Poset real(std::string unit, std::string name = {});
  static Poset finite(std::vector<std::string> labels,
                      const std::vector<std::pair<std::string, std::string>>& order,
                      std::string name = {});
  static Poset chain(std::vector<std::string> labels, std::string name = {});
  static Poset product(std::vector<Poset> parts, std::string name = {});

  PosetKind kind() const;
  const std::string& name() const { return name_; }
  Poset named(std::string name) const {
    Poset p = *this;
    p.name_ = std::move(name);
    return p;
  }

  // real kind
  const std::string& unit() const;
  // finite kind
  std::size_t size() const;
  const std::vector<std::string>& labels() const;
  std::optional<std::size_t> index_of(std::string_view label) const;
  bool finite_leq(std::size_t a, std::size_t b) const;
  std::size_t finite_bottom() const;
  // product kind
  std::span<const Poset> parts() const;
  std::size_t arity() const { return parts().size(); }
  const Poset& part(std::size_t i) const { return parts()[i]; }

  // True for finite posets and products built only from finite posets.
  bool is_enumerable() const;

  std::string to_string() const;

  friend bool operator==(const Poset& a, const Poset& b);

 private:
  explicit Poset(std::shared_ptr<const detail::PosetNode> node, std::string name)
      : node_(std::move(node)), name_(std::move(name)) {}

  std::shared_ptr<const detail::PosetNode> node_;
  std::string name_;
};

namespace detail {

struct RealChainData {
  std::string unit;
};

struct FinitePosetData {
  std::vector<std::string> labels;
  std::vector<std::vector<char>> leq;  // reflexive-transitive closure
  std::size_t bottom = 0;
};

struct ProductData {
  std::vector<Poset> parts;
};

struct PosetNode {
  std::variant<RealChainData, FinitePosetData, ProductData> data;
};

}  // namespace detail

inline Poset Poset::real(std::string unit, std::string name) {
  if (unit.empty()) throw DomainError("real poset needs a unit tag");
  auto node = std::make_shared<detail::PosetNode>();
  node->data = detail::RealChainData{std::move(unit)};
  return Poset(std::move(node), std::move(name));
}

inline Poset Poset::finite(std::vector<std::string> labels,
                           const std::vector<std::pair<std::string, std::string>>& order,
                           std::string name) {
  const std::size_t n = labels.size();
  if (n == 0) throw DomainError("finite poset must have at least one element");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (labels[i] == labels[j]) throw DomainError("duplicate poset label '" + labels[i] + "'");
    }
  }
  auto find = [&](const std::string& l) {
    auto it = std::find(labels.begin(), labels.end(), l);
    if (it == labels.end()) throw DomainError("order refers to unknown label '" + l + "'");
    return static_cast<std::size_t>(it - labels.begin());
  };
  std::vector<std::vector<char>> leq(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) leq[i][i] = 1;
  for (const auto& [a, b] : order) leq[find(a)][find(b)] = 1;
  // Warshall closure
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (leq[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (leq[k][j]) leq[i][j] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (leq[i][j] && leq[j][i]) {
        throw DomainError("order is not antisymmetric: '" + labels[i] + "' and '" + labels[j] +
                          "' precede each other");
      }
    }
  }
  std::optional<std::size_t> bottom;
  for (std::size_t i = 0; i < n && !bottom; ++i) {
    if (std::all_of(leq[i].begin(), leq[i].end(), [](char c) { return c != 0; })) bottom = i;
  }
  if (!bottom) throw DomainError("finite poset has no least element");
  auto node = std::make_shared<detail::PosetNode>();
  node->data = detail::FinitePosetData{std::move(labels), std::move(leq), *bottom};
  return Poset(std::move(node), std::move(name));
}

inline Poset Poset::chain(std::vector<std::string> labels, std::string name) {
  std::vector<std::pair<std::string, std::string>> order;
  for (std::size_t i = 1; i < labels.size(); ++i) order.emplace_back(labels[i - 1], labels[i]);
  return finite(std::move(labels), order, std::move(name));
}

inline Poset Poset::product(std::vector<Poset> parts, std::string name) {
  if (parts.empty()) throw DomainError("product of zero posets");
  auto node = std::make_shared<detail::PosetNode>();
  node->data = detail::ProductData{std::move(parts)};
  return Poset(std::move(node), std::move(name));
}

inline PosetKind Poset::kind() const { return static_cast<PosetKind>(node_->data.index()); }

inline const std::string& Poset::unit() const {
  if (auto* d = std::get_if<detail::RealChainData>(&node_->data)) return d->unit;
  throw DomainError("poset " + to_string() + " has no unit");
}

inline std::size_t Poset::size() const { return labels().size(); }

inline const std::vector<std::string>& Poset::labels() const {
  if (auto* d = std::get_if<detail::FinitePosetData>(&node_->data)) return d->labels;
  throw DomainError("poset " + to_string() + " is not finite");
}

inline std::optional<std::size_t> Poset::index_of(std::string_view label) const {
  const auto& ls = labels();
  auto it = std::find(ls.begin(), ls.end(), label);
  if (it == ls.end()) return std::nullopt;
  return static_cast<std::size_t>(it - ls.begin());
}

inline bool Poset::finite_leq(std::size_t a, std::size_t b) const {
  const auto& d = std::get<detail::FinitePosetData>(node_->data);
  if (a >= d.labels.size() || b >= d.labels.size()) {
    throw DomainError("finite element index out of range for " + to_string());
  }
  return d.leq[a][b] != 0;
}

inline std::size_t Poset::finite_bottom() const {
  return std::get<detail::FinitePosetData>(node_->data).bottom;
}

inline std::span<const Poset> Poset::parts() const {
  if (auto* d = std::get_if<detail::ProductData>(&node_->data)) return d->parts;
  return {};
}

inline bool Poset::is_enumerable() const {
  switch (kind()) {
    case PosetKind::real: return false;
    case PosetKind::finite: return true;
    case PosetKind::product:
      return std::all_of(parts().begin(), parts().end(),
                         [](const Poset& p) { return p.is_enumerable(); });
  }
  return false;
}

inline std::string Poset::to_string() const {
  switch (kind()) {
    case PosetKind::real: return "R+[" + unit() + "]";
    case PosetKind::finite: {
      std::string s = "finite{";
      const auto& ls = labels();
      for (std::size_t i = 0; i < ls.size(); ++i) s += (i ? "," : "") + ls[i];
      return s + "}";
    }
    case PosetKind::product: {
      std::string s = "(";
      for (std::size_t i = 0; i < arity(); ++i) s += (i ? " x " : "") + part(i).to_string();
      return s + ")";
    }
  }
  return {};
}

inline bool operator==(const Poset& a, const Poset& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case PosetKind::real: return a.unit() == b.unit();
    case PosetKind::finite: {
      const auto& da = std::get<detail::FinitePosetData>(a.node_->data);
      const auto& db = std::get<detail::FinitePosetData>(b.node_->data);
      return da.labels == db.labels && da.leq == db.leq;
    }
    case PosetKind::product: return std::ranges::equal(a.parts(), b.parts());
  }
  return false;
}

// Membership test: shape, index range and real-value domain.
inline bool contains(const Poset& p, const Element& e) {
  switch (p.kind()) {
    case PosetKind::real: return e.is_real();
    case PosetKind::finite: return e.is_finite() && e.as_finite() < p.size();
    case PosetKind::product: {
      if (!e.is_tuple() || e.as_tuple().size() != p.arity()) return false;
      for (std::size_t i = 0; i < p.arity(); ++i) {
        if (!contains(p.part(i), e[i])) return false;
      }
      return true;
    }
  }
  return false;
}

std::string format_element(const Poset& p, const Element& e);

inline void require_member(const Poset& p, const Element& e) {
  if (!contains(p, e)) throw DomainError("element is not in poset " + p.to_string());
}

// a ⪯ b in p. Product posets compare componentwise.
inline bool leq(const Poset& p, const Element& a, const Element& b) {
  switch (p.kind()) {
    case PosetKind::real: return a.as_real() <= b.as_real();
    case PosetKind::finite: return p.finite_leq(a.as_finite(), b.as_finite());
    case PosetKind::product: {
      const auto& ta = a.as_tuple();
      const auto& tb = b.as_tuple();
      if (ta.size() != p.arity() || tb.size() != p.arity()) {
        throw DomainError("tuple arity does not match " + p.to_string());
      }
      for (std::size_t i = 0; i < ta.size(); ++i) {
        if (!leq(p.part(i), ta[i], tb[i])) return false;
      }
      return true;
    }
  }
  return false;
}

inline Element bottom(const Poset& p) {
  switch (p.kind()) {
    case PosetKind::real: return Element::real(0.0);
    case PosetKind::finite: return Element::finite(p.finite_bottom());
    case PosetKind::product: {
      Element::Tuple t;
      for (const auto& q : p.parts()) t.push_back(bottom(q));
      return Element::tuple(std::move(t));
    }
  }
  return {};
}

// Greatest lower bound of {a, b}.
inline Element meet(const Poset& p, const Element& a, const Element& b) {
  switch (p.kind()) {
    case PosetKind::real: return Element::real(std::min(a.as_real(), b.as_real()));
    case PosetKind::finite: {
      const std::size_t x = a.as_finite(), y = b.as_finite(), n = p.size();
      std::vector<std::size_t> lower;
      for (std::size_t c = 0; c < n; ++c) {
        if (p.finite_leq(c, x) && p.finite_leq(c, y)) lower.push_back(c);
      }
      for (std::size_t c : lower) {
        if (std::all_of(lower.begin(), lower.end(), [&](std::size_t d) { return p.finite_leq(d, c); })) {
          return Element::finite(c);
        }
      }
      throw DomainError("no greatest lower bound of '" + p.labels()[x] + "' and '" +
                        p.labels()[y] + "'");
    }
    case PosetKind::product: {
      const auto& ta = a.as_tuple();
      const auto& tb = b.as_tuple();
      if (ta.size() != p.arity() || tb.size() != p.arity()) {
        throw DomainError("tuple arity does not match " + p.to_string());
      }
      Element::Tuple t;
      for (std::size_t i = 0; i < p.arity(); ++i) t.push_back(meet(p.part(i), ta[i], tb[i]));
      return Element::tuple(std::move(t));
    }
  }
  return {};
}

inline Poset product(const Poset& a, const Poset& b) { return Poset::product({a, b}); }

// All elements of an enumerable poset, each exactly once. Products are
// enumerated in lexicographic order of component indices.
inline std::vector<Element> elements(const Poset& p) {
  switch (p.kind()) {
    case PosetKind::real:
      throw UnsupportedError("cannot enumerate the elements of " + p.to_string());
    case PosetKind::finite: {
      std::vector<Element> out;
      for (std::size_t i = 0; i < p.size(); ++i) out.push_back(Element::finite(i));
      return out;
    }
    case PosetKind::product: {
      std::vector<Element::Tuple> acc{{}};
      for (const auto& q : p.parts()) {
        auto items = elements(q);
        std::vector<Element::Tuple> next;
        next.reserve(acc.size() * items.size());
        for (const auto& prefix : acc) {
          for (const auto& it : items) {
            auto t = prefix;
            t.push_back(it);
            next.push_back(std::move(t));
          }
        }
        acc = std::move(next);
      }
      std::vector<Element> out;
      out.reserve(acc.size());
      for (auto& t : acc) out.push_back(Element::tuple(std::move(t)));
      return out;
    }
  }
  return {};
}

inline std::string format_element(const Poset& p, const Element& e) {
  switch (p.kind()) {
    case PosetKind::real: return Element::format_double(e.as_real()) + " " + p.unit();
    case PosetKind::finite: return p.labels().at(e.as_finite());
    case PosetKind::product: {
      std::string s = "(";
      for (std::size_t i = 0; i < p.arity(); ++i) {
        s += (i ? ", " : "") + format_element(p.part(i), e[i]);
      }
      return s + ")";
    }
  }
  return {};
}

// Leaves of a poset tree in depth-first order (a real or finite poset is its
// own single leaf).
inline void collect_leaves(const Poset& p, std::vector<Poset>& out) {
  if (p.kind() == PosetKind::product) {
    for (const auto& q : p.parts()) collect_leaves(q, out);
  } else {
    out.push_back(p);
  }
}

inline std::vector<Poset> leaves(const Poset& p) {
  std::vector<Poset> out;
  collect_leaves(p, out);
  return out;
}

inline void flatten_into(const Element& e, std::vector<Element>& out) {
  if (e.is_tuple()) {
    for (const auto& x : e.as_tuple()) flatten_into(x, out);
  } else {
    out.push_back(e);
  }
}

inline std::vector<Element> flatten(const Element& e) {
  std::vector<Element> out;
  flatten_into(e, out);
  return out;
}

// Inverse of flatten: rebuilds the nested shape of p from a leaf sequence.
inline Element unflatten(const Poset& p, std::span<const Element> leaf_values, std::size_t& cursor) {
  if (p.kind() != PosetKind::product) {
    if (cursor >= leaf_values.size()) throw DomainError("too few leaf values for " + p.to_string());
    return leaf_values[cursor++];
  }
  Element::Tuple t;
  for (const auto& q : p.parts()) t.push_back(unflatten(q, leaf_values, cursor));
  return Element::tuple(std::move(t));
}

inline Element unflatten(const Poset& p, std::span<const Element> leaf_values) {
  std::size_t cursor = 0;
  Element e = unflatten(p, leaf_values, cursor);
  if (cursor != leaf_values.size()) throw DomainError("too many leaf values for " + p.to_string());
  return e;
}

}  // namespace mcdp
