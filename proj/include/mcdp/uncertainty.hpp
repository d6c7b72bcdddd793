#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>

#include "mcdp/dp.hpp"
#include "mcdp/term.hpp"

namespace mcdp {

// Interval ⟨lower, upper⟩ of design problems, lower ⪯ upper.
struct UncertainDP {
  DesignProblem lower;
  DesignProblem upper;

  const Poset& funsp() const { return lower.funsp(); }
  const Poset& ressp() const { return lower.ressp(); }

  // Verifies matching spaces and lower ⪯ upper on the samples.
  static UncertainDP checked(DesignProblem lower, DesignProblem upper, std::span<const Element> samples) {
    if (!(lower.funsp() == upper.funsp()) || !(lower.ressp() == upper.ressp())) {
      throw DomainError("uncertain DP bounds have different spaces: " + lower.funsp().to_string() + " -> " +
                        lower.ressp().to_string() + " vs " + upper.funsp().to_string() + " -> " +
                        upper.ressp().to_string());
    }
    if (!dp_leq_check(lower, upper, samples)) {
      throw DomainError("uncertain DP lower bound does not precede its upper bound");
    }
    return UncertainDP{std::move(lower), std::move(upper)};
  }
  static UncertainDP checked(DesignProblem lower, DesignProblem upper) {
    auto samples = sample_points(lower.funsp(), 64);
    return checked(std::move(lower), std::move(upper), samples);
  }
};

inline UncertainDP udp_from_dp(const DesignProblem& dp) { return UncertainDP{dp, dp}; }

// u1 ⪯ u2 iff [u1.lower, u1.upper] ⊆ [u2.lower, u2.upper].
inline bool udp_leq_check(const UncertainDP& u1, const UncertainDP& u2, std::span<const Element> samples) {
  return dp_leq_check(u2.lower, u1.lower, samples) && dp_leq_check(u1.upper, u2.upper, samples);
}

inline bool udp_leq_check(const UncertainDP& u1, const UncertainDP& u2) {
  auto samples = sample_points(u1.funsp());
  return udp_leq_check(u1, u2, samples);
}

using UncertainValuation = std::map<std::string, UncertainDP, std::less<>>;

inline UncertainValuation degenerate(const Valuation& val) {
  UncertainValuation out;
  for (const auto& [k, v] : val) out.emplace(k, udp_from_dp(v));
  return out;
}

inline Valuation lower_valuation(const UncertainValuation& uval) {
  Valuation out;
  for (const auto& [k, v] : uval) out.emplace(k, v.lower);
  return out;
}

inline Valuation upper_valuation(const UncertainValuation& uval) {
  Valuation out;
  for (const auto& [k, v] : uval) out.emplace(k, v.upper);
  return out;
}

// Composes the lower and upper sides separately; the result is again an
// interval (lower ⪯ upper) because every operator is monotone.
inline UncertainDP compose_uncertain(const Term& t, const UncertainValuation& uval, std::size_t max_iter = kDefaultMaxIter) {
  return UncertainDP{compose_term(t, lower_valuation(uval), max_iter), compose_term(t, upper_valuation(uval), max_iter)};
}

enum class Verdict { feasible, infeasible, indeterminate };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::feasible: return "feasible";
    case Verdict::infeasible: return "infeasible";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "?";
}

struct UncertainReport {
  Element query;
  SolveReport lower;
  SolveReport upper;
  Verdict verdict = Verdict::indeterminate;

  bool converged() const { return lower.converged && upper.converged; }
};

inline Verdict classify(const SolveReport& lower, const SolveReport& upper) {
  if (lower.feasible() && upper.feasible()) return Verdict::feasible;
  if (!lower.feasible() && !upper.feasible()) return Verdict::infeasible;
  return Verdict::indeterminate;
}

inline UncertainReport solve_uncertain(const UncertainDP& udp, const Element& f, std::size_t max_iter = kDefaultMaxIter) {
  UncertainReport rep{f, solve(udp.lower, f, max_iter), solve(udp.upper, f, max_iter)};
  rep.verdict = classify(rep.lower, rep.upper);
  return rep;
}

inline UncertainReport solve_uncertain(const Term& t, const UncertainValuation& uval, const Element& f,
                                       std::size_t max_iter = kDefaultMaxIter) {
  return solve_uncertain(compose_uncertain(t, uval, max_iter), f, max_iter);
}

// v1 ⪯ v2 atom by atom.
inline bool valuation_leq_check(const UncertainValuation& v1, const UncertainValuation& v2) {
  for (const auto& [name, u1] : v1) {
    auto it = v2.find(name);
    if (it == v2.end()) return false;
    if (!udp_leq_check(u1, it->second)) return false;
  }
  return v1.size() == v2.size();
}

namespace detail {

inline Element scale_reals(const Element& e, double factor) {
  if (e.is_real()) return Element::real(mul0(e.as_real(), factor));
  if (e.is_tuple()) {
    Element::Tuple t;
    for (const auto& x : e.as_tuple()) t.push_back(scale_reals(x, factor));
    return Element::tuple(std::move(t));
  }
  throw DomainError("cannot scale a finite-poset element");
}

}  // namespace detail

// Parametric ±p uncertainty on the figures of a catalogue-like DP. The lower
// (optimistic) side always needs fewer resources:
//  - catalogue entries: functionality × (1+p), resources × (1-p);
//  - specific catalogues: every figure divides resources, so × (1+p);
//  - affine maps: gains and offsets × (1-p), the functionality limit × (1+p).
// The upper side applies the opposite factors.
inline UncertainDP scale_catalogue_uncertain(const DesignProblem& dp, double p) {
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("uncertainty fraction must lie in [0, 1), got " + Element::format_double(p));
  if (p == 0.0) return udp_from_dp(dp);
  const double more = 1.0 + p, less = 1.0 - p;
  if (auto* cat = dp.as<detail::CatalogueNode>()) {
    detail::require_real_leaves(dp.funsp(), "parametric uncertainty");
    detail::require_real_leaves(dp.ressp(), "parametric uncertainty");
    auto scaled = [&](double ff, double rf) {
      std::vector<CatalogueEntry> out;
      for (const auto& e : cat->entries) {
        out.push_back({detail::scale_reals(e.functionality, ff), detail::scale_reals(e.resource, rf)});
      }
      return catalogue(dp.funsp(), dp.ressp(), std::move(out));
    };
    return UncertainDP{scaled(more, less), scaled(less, more)};
  }
  if (auto* sp = dp.as<detail::SpecificNode>()) {
    auto scaled = [&](double factor) {
      SpecificParams params = sp->params;
      for (auto& t : params.technologies)
        for (auto& d : t.divisors)
          for (auto& v : d) v *= factor;
      return specific_catalogue(dp.funsp(), dp.ressp(), std::move(params));
    };
    return UncertainDP{scaled(more), scaled(less)};
  }
  if (auto* af = dp.as<detail::AffineNode>()) {
    auto scaled = [&](double coeff, double cap) {
      AffineParams params = af->params;
      for (auto& row : params.gain)
        for (auto& g : row) g *= coeff;
      for (auto& o : params.offset) o *= coeff;
      if (params.limit) params.limit = detail::scale_reals(*params.limit, cap);
      return affine(dp.funsp(), dp.ressp(), std::move(params));
    };
    return UncertainDP{scaled(less, more), scaled(more, less)};
  }
  throw DomainError("parametric uncertainty needs a catalogue, specific or affine DP, got " + dp.describe());
}

}  // namespace mcdp
