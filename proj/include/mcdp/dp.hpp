#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcdp/antichain.hpp"
#include "mcdp/element.hpp"
#include "mcdp/errors.hpp"
#include "mcdp/poset.hpp"

namespace mcdp {

inline constexpr std::size_t kDefaultMaxIter = 1'000'000;

enum class DpKind {
  map_lift,
  catalogue,
  constant,
  bottom,
  top,
  identity,
  affine,
  specific,
  multiply,
  relaxation,
  series,
  par,
  loop,
};

// Accumulated over one evaluation: total fixed-point steps across every loop
// that was solved, and whether all of them reached their fixed point.
struct EvalStats {
  std::size_t iterations = 0;
  bool converged = true;
};

namespace detail {

class DpNode {
 public:
  DpNode(Poset fun, Poset res, DpKind kind)
      : funsp(std::move(fun)), ressp(std::move(res)), kind(kind) {}
  virtual ~DpNode() = default;

  // f is known to belong to funsp.
  virtual Antichain evaluate(const Element& f, EvalStats& stats) const = 0;
  virtual std::string describe() const = 0;

  Poset funsp;
  Poset ressp;
  DpKind kind;
};

}  // namespace detail

// A monotone map from functionality to the antichain of minimal resources.
class DesignProblem {
 public:
  explicit DesignProblem(std::shared_ptr<const detail::DpNode> node) : node_(std::move(node)) {}

  const Poset& funsp() const { return node_->funsp; }
  const Poset& ressp() const { return node_->ressp; }
  DpKind kind() const { return node_->kind; }
  std::string describe() const { return node_->describe(); }

  Antichain eval(const Element& f) const {
    EvalStats stats;
    return eval(f, stats);
  }
  Antichain eval(const Element& f, EvalStats& stats) const {
    if (!contains(funsp(), f)) {
      throw DomainError("functionality is not in " + funsp().to_string() + " for " + describe());
    }
    return node_->evaluate(f, stats);
  }

  const detail::DpNode& node() const { return *node_; }
  template <class T>
  const T* as() const {
    return dynamic_cast<const T*>(node_.get());
  }

 private:
  std::shared_ptr<const detail::DpNode> node_;
};

inline Antichain dp_eval(const DesignProblem& dp, const Element& f) { return dp.eval(f); }

// ---------------------------------------------------------------------------
// Primitive design problems

struct CatalogueEntry {
  Element functionality;
  Element resource;
};

// Dense nonnegative gain matrix over the real leaves of F and R:
// r = gain * f + offset, infeasible when f exceeds `limit`.
struct AffineParams {
  std::vector<std::vector<double>> gain;  // rows: resource leaves
  std::vector<double> offset;
  std::optional<Element> limit;
};

// A technology described by per-unit figures: resource axis j needs
// scale[j] * q / (product of divisors[j]) for a quantity q.
struct Technology {
  std::string name;
  std::vector<std::vector<double>> divisors;
};

struct SpecificParams {
  std::vector<double> scale;
  std::vector<Technology> technologies;
};

namespace detail {

// 0 * inf is taken to be 0 throughout: no quantity needs nothing.
inline double mul0(double a, double b) { return (a == 0.0 || b == 0.0) ? 0.0 : a * b; }

inline std::vector<double> real_leaves(const Element& e) {
  std::vector<double> out;
  for (const auto& x : flatten(e)) out.push_back(x.as_real());
  return out;
}

inline Element from_reals(const Poset& p, const std::vector<double>& values) {
  std::vector<Element> leaves_;
  leaves_.reserve(values.size());
  for (double v : values) leaves_.push_back(Element::real(v));
  return unflatten(p, leaves_);
}

inline void require_real_leaves(const Poset& p, const char* what) {
  for (const auto& l : leaves(p)) {
    if (l.kind() != PosetKind::real) {
      throw DomainError(std::string(what) + " requires real axes, got " + p.to_string());
    }
  }
}

class MapLiftNode final : public DpNode {
 public:
  MapLiftNode(Poset f, Poset r, std::function<Element(const Element&)> map, std::string label)
      : DpNode(std::move(f), std::move(r), DpKind::map_lift), map_(std::move(map)), label_(std::move(label)) {}
  Antichain evaluate(const Element& f, EvalStats&) const override {
    Element r = map_(f);
    return Antichain::singleton(ressp, std::move(r));
  }
  std::string describe() const override { return "lift(" + label_ + ")"; }

 private:
  std::function<Element(const Element&)> map_;
  std::string label_;
};

class CatalogueNode final : public DpNode {
 public:
  CatalogueNode(Poset f, Poset r, std::vector<CatalogueEntry> entries)
      : DpNode(std::move(f), std::move(r), DpKind::catalogue), entries(std::move(entries)) {
    for (const auto& e : this->entries) {
      require_member(funsp, e.functionality);
      require_member(ressp, e.resource);
    }
  }
  // Min{ r_i : f ⪯ f_i }
  Antichain evaluate(const Element& f, EvalStats&) const override {
    std::vector<Element> pts;
    for (const auto& e : entries) {
      if (leq(funsp, f, e.functionality)) pts.push_back(e.resource);
    }
    return min_elements_unchecked(ressp, std::move(pts));
  }
  std::string describe() const override { return "catalogue[" + std::to_string(entries.size()) + "]"; }

  std::vector<CatalogueEntry> entries;
};

class ConstantNode final : public DpNode {
 public:
  ConstantNode(Poset f, Antichain value)
      : DpNode(std::move(f), value.poset(), DpKind::constant), value(std::move(value)) {}
  Antichain evaluate(const Element&, EvalStats&) const override { return value; }
  std::string describe() const override { return "constant" + value.to_string(); }

  Antichain value;
};

class BottomNode final : public DpNode {
 public:
  BottomNode(Poset f, Poset r) : DpNode(std::move(f), std::move(r), DpKind::bottom) {}
  Antichain evaluate(const Element&, EvalStats&) const override {
    return Antichain::singleton(ressp, bottom(ressp));
  }
  std::string describe() const override { return "bottom"; }
};

class TopNode final : public DpNode {
 public:
  TopNode(Poset f, Poset r) : DpNode(std::move(f), std::move(r), DpKind::top) {}
  Antichain evaluate(const Element&, EvalStats&) const override { return Antichain(ressp); }
  std::string describe() const override { return "top"; }
};

class IdentityNode final : public DpNode {
 public:
  explicit IdentityNode(Poset p) : DpNode(p, p, DpKind::identity) {}
  Antichain evaluate(const Element& f, EvalStats&) const override { return Antichain::singleton(ressp, f); }
  std::string describe() const override { return "identity"; }
};

class AffineNode final : public DpNode {
 public:
  AffineNode(Poset f, Poset r, AffineParams params)
      : DpNode(std::move(f), std::move(r), DpKind::affine), params(std::move(params)) {
    require_real_leaves(funsp, "affine");
    require_real_leaves(ressp, "affine");
    const std::size_t nf = leaves(funsp).size(), nr = leaves(ressp).size();
    if (this->params.gain.size() != nr) {
      throw DomainError("affine gain needs " + std::to_string(nr) + " rows");
    }
    for (const auto& row : this->params.gain) {
      if (row.size() != nf) throw DomainError("affine gain rows need " + std::to_string(nf) + " columns");
      for (double g : row) {
        if (!(g >= 0.0) || std::isinf(g)) throw DomainError("affine gains must be finite and >= 0");
      }
    }
    if (this->params.offset.empty()) this->params.offset.assign(nr, 0.0);
    if (this->params.offset.size() != nr) throw DomainError("affine offset needs " + std::to_string(nr) + " values");
    for (double o : this->params.offset) {
      if (!(o >= 0.0)) throw DomainError("affine offsets must be >= 0");
    }
    if (this->params.limit) require_member(funsp, *this->params.limit);
  }
  Antichain evaluate(const Element& f, EvalStats&) const override {
    if (params.limit && !leq(funsp, f, *params.limit)) return Antichain(ressp);
    const auto x = real_leaves(f);
    std::vector<double> r(params.gain.size());
    for (std::size_t j = 0; j < r.size(); ++j) {
      double acc = params.offset[j];
      for (std::size_t i = 0; i < x.size(); ++i) acc += mul0(params.gain[j][i], x[i]);
      r[j] = acc;
    }
    return Antichain::singleton(ressp, from_reals(ressp, r));
  }
  std::string describe() const override { return "affine"; }

  AffineParams params;
};

class SpecificNode final : public DpNode {
 public:
  SpecificNode(Poset f, Poset r, SpecificParams params)
      : DpNode(std::move(f), std::move(r), DpKind::specific), params(std::move(params)) {
    if (funsp.kind() != PosetKind::real) throw DomainError("specific catalogue needs one real functionality axis");
    require_real_leaves(ressp, "specific catalogue");
    const std::size_t nr = leaves(ressp).size();
    if (this->params.scale.empty()) this->params.scale.assign(nr, 1.0);
    if (this->params.scale.size() != nr) throw DomainError("specific scale needs " + std::to_string(nr) + " values");
    for (double s : this->params.scale) {
      if (!(s >= 0.0) || std::isinf(s)) throw DomainError("specific scale factors must be finite and >= 0");
    }
    for (const auto& t : this->params.technologies) {
      if (t.divisors.size() != nr) {
        throw DomainError("technology '" + t.name + "' needs " + std::to_string(nr) + " figures");
      }
      for (const auto& d : t.divisors) {
        if (d.empty()) throw DomainError("technology '" + t.name + "' has an empty figure");
        for (double v : d) {
          if (!(v > 0.0) || std::isinf(v)) throw DomainError("technology figures must be finite and > 0");
        }
      }
    }
  }
  static double divisor(const std::vector<double>& figures) {
    double d = 1.0;
    for (double v : figures) d *= v;
    return d;
  }
  Antichain evaluate(const Element& f, EvalStats&) const override {
    const double q = f.as_real();
    std::vector<Element> pts;
    for (const auto& t : params.technologies) {
      std::vector<double> r;
      for (std::size_t j = 0; j < t.divisors.size(); ++j) r.push_back(mul0(params.scale[j], q) / divisor(t.divisors[j]));
      pts.push_back(from_reals(ressp, r));
    }
    return min_elements_unchecked(ressp, std::move(pts));
  }
  std::string describe() const override { return "specific[" + std::to_string(params.technologies.size()) + "]"; }

  SpecificParams params;
};

class MultiplyNode final : public DpNode {
 public:
  MultiplyNode(Poset f, Poset r) : DpNode(std::move(f), std::move(r), DpKind::multiply) {
    if (funsp.kind() != PosetKind::product || funsp.arity() != 2 || funsp.part(0).kind() != PosetKind::real ||
        funsp.part(1).kind() != PosetKind::real || ressp.kind() != PosetKind::real) {
      throw DomainError("mult needs F(a, b) over reals and one real resource");
    }
  }
  Antichain evaluate(const Element& f, EvalStats&) const override {
    return Antichain::singleton(ressp, Element::real(mul0(f[0].as_real(), f[1].as_real())));
  }
  std::string describe() const override { return "mult"; }
};

class RelaxationNode final : public DpNode {
 public:
  RelaxationNode(Poset f, Poset r, std::function<Antichain(const Element&)> fn, std::string label)
      : DpNode(std::move(f), std::move(r), DpKind::relaxation), fn_(std::move(fn)), label_(std::move(label)) {}
  Antichain evaluate(const Element& f, EvalStats&) const override { return fn_(f); }
  std::string describe() const override { return label_; }

 private:
  std::function<Antichain(const Element&)> fn_;
  std::string label_;
};

}  // namespace detail

inline DesignProblem lift(Poset f, Poset r, std::function<Element(const Element&)> map, std::string label = "map") {
  return DesignProblem(std::make_shared<detail::MapLiftNode>(std::move(f), std::move(r), std::move(map), std::move(label)));
}
inline DesignProblem catalogue(Poset f, Poset r, std::vector<CatalogueEntry> entries) {
  return DesignProblem(std::make_shared<detail::CatalogueNode>(std::move(f), std::move(r), std::move(entries)));
}
inline DesignProblem constant(Poset f, Antichain value) {
  return DesignProblem(std::make_shared<detail::ConstantNode>(std::move(f), std::move(value)));
}
inline DesignProblem bottom_dp(Poset f, Poset r) {
  return DesignProblem(std::make_shared<detail::BottomNode>(std::move(f), std::move(r)));
}
inline DesignProblem top_dp(Poset f, Poset r) {
  return DesignProblem(std::make_shared<detail::TopNode>(std::move(f), std::move(r)));
}
inline DesignProblem identity(Poset p) { return DesignProblem(std::make_shared<detail::IdentityNode>(std::move(p))); }
inline DesignProblem affine(Poset f, Poset r, AffineParams params) {
  return DesignProblem(std::make_shared<detail::AffineNode>(std::move(f), std::move(r), std::move(params)));
}
inline DesignProblem specific_catalogue(Poset f, Poset r, SpecificParams params) {
  return DesignProblem(std::make_shared<detail::SpecificNode>(std::move(f), std::move(r), std::move(params)));
}
inline DesignProblem multiply(Poset f, Poset r) {
  return DesignProblem(std::make_shared<detail::MultiplyNode>(std::move(f), std::move(r)));
}
inline DesignProblem relaxation_dp(Poset f, Poset r, std::function<Antichain(const Element&)> fn, std::string label) {
  return DesignProblem(std::make_shared<detail::RelaxationNode>(std::move(f), std::move(r), std::move(fn), std::move(label)));
}

// ---------------------------------------------------------------------------
// Composition

namespace detail {

class SeriesNode final : public DpNode {
 public:
  SeriesNode(DesignProblem a, DesignProblem b)
      : DpNode(a.funsp(), b.ressp(), DpKind::series), first(std::move(a)), second(std::move(b)) {}
  // Min ∪_{r1 ∈ first(f)} second(r1)
  Antichain evaluate(const Element& f, EvalStats& stats) const override {
    Antichain mid = first.node().evaluate(f, stats);
    if (mid.size() == 1) return second.node().evaluate(*mid.begin(), stats);
    std::vector<Element> pts;
    for (const auto& r1 : mid) {
      Antichain part = second.node().evaluate(r1, stats);
      pts.insert(pts.end(), part.begin(), part.end());
    }
    return min_elements_unchecked(ressp, std::move(pts));
  }
  std::string describe() const override { return "series(" + first.describe() + ", " + second.describe() + ")"; }

  DesignProblem first;
  DesignProblem second;
};

class ParNode final : public DpNode {
 public:
  ParNode(DesignProblem a, DesignProblem b)
      : DpNode(product(a.funsp(), b.funsp()), product(a.ressp(), b.ressp()), DpKind::par),
        left(std::move(a)), right(std::move(b)) {}
  Antichain evaluate(const Element& f, EvalStats& stats) const override {
    Antichain a = left.node().evaluate(f[0], stats);
    if (a.empty()) return Antichain(ressp);
    Antichain b = right.node().evaluate(f[1], stats);
    return ac_product(a, b);
  }
  std::string describe() const override { return "par(" + left.describe() + ", " + right.describe() + ")"; }

  DesignProblem left;
  DesignProblem right;
};

}  // namespace detail

inline DesignProblem dp_series(const DesignProblem& a, const DesignProblem& b) {
  if (!(a.ressp() == b.funsp())) {
    throw CompositionError("series: resources " + a.ressp().to_string() + " of " + a.describe() +
                           " do not match functionality " + b.funsp().to_string() + " of " + b.describe());
  }
  return DesignProblem(std::make_shared<detail::SeriesNode>(a, b));
}

inline DesignProblem dp_par(const DesignProblem& a, const DesignProblem& b) {
  return DesignProblem(std::make_shared<detail::ParNode>(a, b));
}

// ---------------------------------------------------------------------------
// Loop and fixed-point iteration

struct SolveReport {
  Antichain result;
  std::size_t iterations = 0;
  bool converged = true;
  std::size_t max_iter = kDefaultMaxIter;

  bool feasible() const { return !result.empty(); }
};

namespace detail {

inline void check_loop_signature(const DesignProblem& body) {
  const Poset& f = body.funsp();
  if (f.kind() != PosetKind::product || f.arity() != 2) {
    throw CompositionError("loop: functionality of " + body.describe() + " must be a pair F1 x R, got " +
                           f.to_string());
  }
  if (!(f.part(1) == body.ressp())) {
    throw CompositionError("loop: fed-back functionality " + f.part(1).to_string() +
                           " does not match resources " + body.ressp().to_string());
  }
}

// Min ∪_{r ∈ R} (body(f1, r) ∩ ↑r)
inline Antichain loop_step(const DesignProblem& body, const Element& f1, const Antichain& current,
                           EvalStats& stats) {
  const Poset& rp = body.ressp();
  std::vector<Element> pts;
  for (const auto& r : current) {
    Antichain out = body.node().evaluate(Element::pair(f1, r), stats);
    for (const auto& x : out) {
      if (leq(rp, r, x)) pts.push_back(x);
    }
  }
  return min_elements_unchecked(rp, std::move(pts));
}

inline SolveReport solve_loop(const DesignProblem& body, const Element& f1, std::size_t max_iter,
                              EvalStats& inner, const std::function<void(const Antichain&)>& observer) {
  const Poset& rp = body.ressp();
  Antichain current = Antichain::singleton(rp, bottom(rp));
  if (observer) observer(current);
  SolveReport report{Antichain(rp), 0, false, max_iter};
  while (report.iterations < max_iter) {
    Antichain next = loop_step(body, f1, current, inner);
    ++report.iterations;
    if (observer) observer(next);
    // Ψ(∅) = ∅, so an empty iterate is already the fixed point.
    if (next == current || next.empty()) {
      report.converged = true;
      report.result = std::move(next);
      return report;
    }
    current = std::move(next);
  }
  report.result = std::move(current);
  return report;
}

class LoopNode final : public DpNode {
 public:
  LoopNode(DesignProblem b, std::size_t max_iter)
      : DpNode(b.funsp().part(0), b.ressp(), DpKind::loop), body(std::move(b)), max_iter(max_iter) {}
  Antichain evaluate(const Element& f, EvalStats& stats) const override {
    SolveReport rep = solve_loop(body, f, max_iter, stats, {});
    stats.iterations += rep.iterations;
    stats.converged = stats.converged && rep.converged;
    return std::move(rep.result);
  }
  std::string describe() const override { return "loop(" + body.describe() + ")"; }

  DesignProblem body;
  std::size_t max_iter;
};

}  // namespace detail

// One application of the loop map for fixed outer functionality f1.
inline Antichain psi_step(const DesignProblem& body, const Element& f1, const Antichain& current) {
  detail::check_loop_signature(body);
  require_member(body.funsp().part(0), f1);
  if (!(current.poset() == body.ressp())) {
    throw DomainError("loop iterate lives in " + current.poset().to_string() + ", expected " +
                      body.ressp().to_string());
  }
  EvalStats stats;
  return detail::loop_step(body, f1, current, stats);
}

// Kleene ascent from {⊥}. On hitting the cap the last iterate is returned with
// converged = false; it is a lower bound of the least fixed point.
inline SolveReport kleene_solve(const DesignProblem& body, const Element& f1, std::size_t max_iter = kDefaultMaxIter,
                                const std::function<void(const Antichain&)>& observer = {}) {
  detail::check_loop_signature(body);
  if (max_iter < 1) throw DomainError("max_iter must be >= 1");
  require_member(body.funsp().part(0), f1);
  EvalStats inner;
  SolveReport rep = detail::solve_loop(body, f1, max_iter, inner, observer);
  rep.converged = rep.converged && inner.converged;
  return rep;
}

inline DesignProblem dp_loop(const DesignProblem& body, std::size_t max_iter = kDefaultMaxIter) {
  detail::check_loop_signature(body);
  if (max_iter < 1) throw DomainError("max_iter must be >= 1");
  return DesignProblem(std::make_shared<detail::LoopNode>(body, max_iter));
}

// Evaluates any DP and reports the fixed-point work done by the loops inside.
inline SolveReport solve(const DesignProblem& dp, const Element& f, std::size_t max_iter = kDefaultMaxIter) {
  EvalStats stats;
  Antichain result = dp.eval(f, stats);
  return SolveReport{std::move(result), stats.iterations, stats.converged, max_iter};
}

// ---------------------------------------------------------------------------
// Sampling and order checks

// Deterministic sample of a poset: every element of a finite poset, a
// log-spaced grid (with 0) on real axes, and the grid product on products,
// thinned to at most max_total points.
inline std::vector<Element> sample_points(const Poset& p, std::size_t per_axis = 32, std::size_t max_total = 4096) {
  switch (p.kind()) {
    case PosetKind::finite: return elements(p);
    case PosetKind::real: {
      std::vector<Element> out{Element::real(0.0)};
      const std::size_t k = per_axis < 2 ? 1 : per_axis - 1;
      for (std::size_t i = 0; i < k; ++i) {
        double t = k == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(k - 1);
        out.push_back(Element::real(std::pow(10.0, -3.0 + 6.0 * t)));
      }
      return out;
    }
    case PosetKind::product: {
      std::vector<std::vector<Element>> axes;
      std::size_t total = 1;
      for (const auto& q : p.parts()) {
        axes.push_back(sample_points(q, per_axis, max_total));
        total = total > max_total ? total : total * axes.back().size();
      }
      std::vector<Element> out;
      if (total <= max_total) {
        std::vector<std::size_t> idx(axes.size(), 0);
        while (true) {
          Element::Tuple t;
          for (std::size_t a = 0; a < axes.size(); ++a) t.push_back(axes[a][idx[a]]);
          out.push_back(Element::tuple(std::move(t)));
          std::size_t a = axes.size();
          while (a > 0) {
            --a;
            if (++idx[a] < axes[a].size()) break;
            idx[a] = 0;
            if (a == 0) return out;
          }
        }
      }
      std::mt19937_64 rng(0x5eedULL);
      for (std::size_t n = 0; n < max_total; ++n) {
        Element::Tuple t;
        for (const auto& axis : axes) t.push_back(axis[rng() % axis.size()]);
        out.push_back(Element::tuple(std::move(t)));
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
  }
  return {};
}

// dp1 ⪯ dp2 on the given functionality samples (exhaustive when funsp is
// finite and no samples are given).
inline bool dp_leq_check(const DesignProblem& dp1, const DesignProblem& dp2, std::span<const Element> samples) {
  if (!(dp1.funsp() == dp2.funsp()) || !(dp1.ressp() == dp2.ressp())) {
    throw DomainError("dp order: " + dp1.funsp().to_string() + " -> " + dp1.ressp().to_string() + " vs " +
                      dp2.funsp().to_string() + " -> " + dp2.ressp().to_string());
  }
  for (const auto& f : samples) {
    if (!ac_leq(dp1.eval(f), dp2.eval(f))) return false;
  }
  return true;
}

inline bool dp_leq_check(const DesignProblem& dp1, const DesignProblem& dp2) {
  auto samples = sample_points(dp1.funsp());
  return dp_leq_check(dp1, dp2, samples);
}

struct MonotonicityViolation {
  Element lower;
  Element upper;
};

// Checks f ⪯ f' ⇒ eval(f) ⪯ eval(f') over all comparable sample pairs.
inline std::optional<MonotonicityViolation> check_monotone(const DesignProblem& dp, std::span<const Element> samples) {
  std::vector<Antichain> values;
  values.reserve(samples.size());
  for (const auto& f : samples) values.push_back(dp.eval(f));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = 0; j < samples.size(); ++j) {
      if (i != j && leq(dp.funsp(), samples[i], samples[j]) && !ac_leq(values[i], values[j])) {
        return MonotonicityViolation{samples[i], samples[j]};
      }
    }
  }
  return std::nullopt;
}

// lift() with the monotonicity obligation spot-checked on a sample grid.
inline DesignProblem checked_lift(Poset f, Poset r, std::function<Element(const Element&)> map, std::string label = "map",
                                  std::size_t per_axis = 32) {
  DesignProblem dp = lift(f, r, std::move(map), label);
  auto samples = sample_points(f, per_axis, 1024);
  if (auto v = check_monotone(dp, samples)) {
    throw DomainError("lift(" + label + ") is not monotone: " + format_element(f, v->lower) + " <= " +
                      format_element(f, v->upper) + " but the images are not ordered");
  }
  return dp;
}

}  // namespace mcdp
