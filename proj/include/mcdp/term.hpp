#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>

#include "mcdp/dp.hpp"
#include "mcdp/errors.hpp"

namespace mcdp {

enum class TermKind { atom, series, par, loop };

// Expression over atoms built from series, par and loop.
class Term {
 public:
  static Term atom(std::string name) { return Term(std::make_shared<Node>(Node{TermKind::atom, std::move(name), {}, {}})); }
  static Term series(Term a, Term b) { return Term(std::make_shared<Node>(Node{TermKind::series, {}, a.node_, b.node_})); }
  static Term par(Term a, Term b) { return Term(std::make_shared<Node>(Node{TermKind::par, {}, a.node_, b.node_})); }
  static Term loop(Term body) { return Term(std::make_shared<Node>(Node{TermKind::loop, {}, body.node_, {}})); }

  TermKind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  Term left() const { return Term(node_->left); }
  Term right() const { return Term(node_->right); }
  Term body() const { return Term(node_->left); }

  std::size_t depth() const {
    switch (kind()) {
      case TermKind::atom: return 0;
      case TermKind::loop: return 1 + body().depth();
      default: return 1 + std::max(left().depth(), right().depth());
    }
  }

  std::string to_string() const {
    switch (kind()) {
      case TermKind::atom: return name();
      case TermKind::series: return "series(" + left().to_string() + ", " + right().to_string() + ")";
      case TermKind::par: return "par(" + left().to_string() + ", " + right().to_string() + ")";
      case TermKind::loop: return "loop(" + body().to_string() + ")";
    }
    return {};
  }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case TermKind::atom: return a.name() == b.name();
      case TermKind::loop: return a.body() == b.body();
      default: return a.left() == b.left() && a.right() == b.right();
    }
  }

 private:
  struct Node {
    TermKind kind;
    std::string name;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
  };
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

inline void collect_atoms(const Term& t, std::set<std::string>& out) {
  switch (t.kind()) {
    case TermKind::atom: out.insert(t.name()); return;
    case TermKind::loop: collect_atoms(t.body(), out); return;
    default:
      collect_atoms(t.left(), out);
      collect_atoms(t.right(), out);
  }
}

inline std::set<std::string> atoms(const Term& t) {
  std::set<std::string> out;
  collect_atoms(t, out);
  return out;
}

using Valuation = std::map<std::string, DesignProblem, std::less<>>;

namespace detail {

inline DesignProblem compose_at(const Term& t, const Valuation& val, std::size_t max_iter, const std::string& path) {
  auto where = [&] { return path.empty() ? std::string("term root") : path; };
  switch (t.kind()) {
    case TermKind::atom: {
      auto it = val.find(t.name());
      if (it == val.end()) throw CompositionError(where() + ": unknown atom '" + t.name() + "'");
      return it->second;
    }
    case TermKind::series: {
      auto a = compose_at(t.left(), val, max_iter, path + "/series.left");
      auto b = compose_at(t.right(), val, max_iter, path + "/series.right");
      if (!(a.ressp() == b.funsp())) {
        throw CompositionError(where() + ": series(" + t.left().to_string() + ", " + t.right().to_string() +
                               "): resources " + a.ressp().to_string() + " do not match functionality " +
                               b.funsp().to_string());
      }
      return dp_series(a, b);
    }
    case TermKind::par:
      return dp_par(compose_at(t.left(), val, max_iter, path + "/par.left"),
                    compose_at(t.right(), val, max_iter, path + "/par.right"));
    case TermKind::loop: {
      auto b = compose_at(t.body(), val, max_iter, path + "/loop.body");
      try {
        return dp_loop(b, max_iter);
      } catch (const CompositionError& e) {
        throw CompositionError(where() + ": " + e.what());
      }
    }
  }
  throw CompositionError("bad term");
}

}  // namespace detail

// Structural recursion: atoms map through the valuation, series/par/loop to
// the corresponding DP operators. All interfaces are checked here, before
// anything is evaluated.
inline DesignProblem compose_term(const Term& t, const Valuation& val, std::size_t max_iter = kDefaultMaxIter) {
  return detail::compose_at(t, val, max_iter, "");
}

}  // namespace mcdp
