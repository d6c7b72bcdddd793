#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcdp/dp.hpp"
#include "mcdp/uncertainty.hpp"

namespace mcdp {

// Directed rounding built on exact residuals (fma / two-sum), so that bounds
// stay on the safe side without touching the FP environment.
namespace rounding {

inline double mul_up(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  double p = a * b;
  if (std::isinf(p)) return p;
  return std::fma(a, b, -p) > 0.0 ? std::nextafter(p, kInfinity) : p;
}

inline double mul_down(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  double p = a * b;
  if (std::isinf(p)) return std::isinf(a) || std::isinf(b) ? p : std::numeric_limits<double>::max();
  return std::fma(a, b, -p) < 0.0 ? std::nextafter(p, 0.0) : p;
}

inline double div_up(double a, double b) {
  if (a == 0.0) return 0.0;
  double q = a / b;
  if (std::isinf(q) || std::isinf(b)) return q;
  return std::fma(-q, b, a) > 0.0 ? std::nextafter(q, kInfinity) : q;
}

inline double div_down(double a, double b) {
  if (a == 0.0) return 0.0;
  double q = a / b;
  if (std::isinf(q) || std::isinf(b)) return q;
  double r = std::fma(-q, b, a);
  return r < 0.0 ? std::nextafter(q, 0.0) : q;
}

// 1 - t for t in [0, 1], rounded up / down.
inline double one_minus_up(double t) {
  double s = 1.0 - t;
  double bb = s - 1.0;
  double err = (1.0 - (s - bb)) + (-t - bb);
  return err > 0.0 ? std::nextafter(s, kInfinity) : s;
}

inline double one_minus_down(double t) {
  double s = 1.0 - t;
  double bb = s - 1.0;
  double err = (1.0 - (s - bb)) + (-t - bb);
  return err < 0.0 ? std::max(0.0, std::nextafter(s, 0.0)) : s;
}

}  // namespace rounding

// ---------------------------------------------------------------------------
// Uncertain identity

// Largest grid value q*alpha that is <= x (grid products as computed).
inline double floor_step(double x, double alpha) {
  if (std::isinf(x)) return x;
  double q = std::floor(x / alpha);
  while (q > 0.0 && q * alpha > x) q -= 1.0;
  while ((q + 1.0) * alpha <= x) q += 1.0;
  return std::max(0.0, q * alpha);
}

// Smallest grid value q*alpha that is >= x.
inline double ceil_step(double x, double alpha) {
  if (std::isinf(x)) return x;
  double q = std::ceil(x / alpha);
  while (q * alpha < x) q += 1.0;
  while (q > 0.0 && (q - 1.0) * alpha >= x) q -= 1.0;
  return q * alpha;
}

namespace detail {

inline void require_step(double alpha) {
  if (!(alpha > 0.0) || std::isinf(alpha)) {
    throw DomainError("step size must be positive and finite, got " + Element::format_double(alpha));
  }
}

// Rounds leaf `axis` of an element of p with `round`, leaving the rest alone.
inline DesignProblem round_axis(const Poset& p, std::size_t axis, double alpha, bool up) {
  auto round = [alpha, up](double x) { return up ? ceil_step(x, alpha) : floor_step(x, alpha); };
  const std::string label = std::string(up ? "ceil" : "floor") + "(" + Element::format_double(alpha) + ")";
  return lift(p, p,
              [p, axis, round](const Element& f) {
                auto flat = flatten(f);
                flat[axis] = Element::real(round(flat[axis].as_real()));
                return unflatten(p, flat);
              },
              label);
}

}  // namespace detail

// ⟨floor_alpha, ceil_alpha⟩ on R+[unit]; floor_alpha ⪯ Id ⪯ ceil_alpha.
inline UncertainDP uncertain_identity(double alpha, const std::string& unit, std::string name = {}) {
  detail::require_step(alpha);
  Poset p = Poset::real(unit, std::move(name));
  return UncertainDP{detail::round_axis(p, 0, alpha, false), detail::round_axis(p, 0, alpha, true)};
}

// Replaces the atom's interval with series(UId_alpha, interval) on one real
// functionality axis. `axis` indexes the leaves of the atom's functionality
// and may be omitted when that space is a single real chain.
inline UncertainValuation inject_tolerance(UncertainValuation uval, const std::string& atom, double alpha,
                                           std::optional<std::size_t> axis = std::nullopt) {
  detail::require_step(alpha);
  auto it = uval.find(atom);
  if (it == uval.end()) throw DomainError("tolerance: unknown atom '" + atom + "'");
  const Poset f = it->second.funsp();
  auto fl = leaves(f);
  std::size_t k = 0;
  if (axis) {
    k = *axis;
    if (k >= fl.size()) throw DomainError("tolerance: atom '" + atom + "' has no functionality axis " + std::to_string(k));
  } else if (f.kind() != PosetKind::real) {
    throw DomainError("tolerance: atom '" + atom + "' has functionality " + f.to_string() + "; name an axis");
  }
  if (fl[k].kind() != PosetKind::real) {
    throw DomainError("tolerance: axis " + std::to_string(k) + " of atom '" + atom + "' is not a real axis");
  }
  UncertainDP relaxed{dp_series(detail::round_axis(f, k, alpha, false), it->second.lower),
                      dp_series(detail::round_axis(f, k, alpha, true), it->second.upper)};
  it->second = std::move(relaxed);
  return uval;
}

inline UncertainValuation inject_tolerance(const Valuation& val, const std::string& atom, double alpha,
                                           std::optional<std::size_t> axis = std::nullopt) {
  return inject_tolerance(degenerate(val), atom, alpha, axis);
}

// ---------------------------------------------------------------------------
// Sampling relaxations of f <= r1 + r2 and f <= r1 * r2

// First n terms of the base-2 Van der Corput sequence; all dyadic, so exact.
inline std::vector<double> van_der_corput(std::size_t n) {
  if (n < 1) throw DomainError("van der Corput length must be >= 1");
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0, denom = 0.5;
    for (std::uint64_t k = i; k != 0; k >>= 1, denom *= 0.5) {
      if (k & 1u) v += denom;
    }
    out.push_back(v);
  }
  return out;
}

// Meets of consecutive points after sorting by the first coordinate, then Min.
inline Antichain lower_from_points(std::vector<Element> points, const Poset& p) {
  if (points.size() < 2) throw DomainError("lower_from_points needs at least 2 points");
  if (p.kind() != PosetKind::product || p.arity() != 2) throw DomainError("lower_from_points needs a 2-axis poset");
  for (const auto& x : points) require_member(p, x);
  std::sort(points.begin(), points.end());
  std::vector<Element> meets;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) meets.push_back(meet(p, points[i], points[i + 1]));
  return min_elements_unchecked(p, std::move(meets));
}

struct DualSpaces {
  Poset fun;
  Poset res;
};

inline DualSpaces dual_spaces(const std::string& unit) {
  return {Poset::real(unit), product(Poset::real(unit), Poset::real(unit))};
}

namespace detail {

inline void check_dual_spaces(const DualSpaces& s) {
  if (s.fun.kind() != PosetKind::real || s.res.kind() != PosetKind::product || s.res.arity() != 2 ||
      s.res.part(0).kind() != PosetKind::real || s.res.part(1).kind() != PosetKind::real) {
    throw DomainError("dual relaxations need F(R+) and R(R+, R+)");
  }
}

// Point of the segment <f t, f (1 - t)>, rounded outward (upper) or inward.
inline Element segment_point(double f, double t, bool upper) {
  using namespace rounding;
  double x = upper ? mul_up(f, t) : mul_down(f, t);
  double y = upper ? mul_up(f, one_minus_up(t)) : mul_down(f, one_minus_down(t));
  return Element::pair(Element::real(x), Element::real(y));
}

inline UncertainDP sum_relaxation(const DualSpaces& s, std::vector<double> upper_params, std::vector<double> lower_params,
                                  const std::string& label) {
  check_dual_spaces(s);
  Poset res = s.res;
  auto upper = [res, upper_params](const Element& f) {
    std::vector<Element> pts;
    for (double t : upper_params) pts.push_back(segment_point(f.as_real(), t, true));
    return min_elements_unchecked(res, std::move(pts));
  };
  auto lower = [res, lower_params](const Element& f) {
    std::vector<Element> pts;
    for (double t : lower_params) pts.push_back(segment_point(f.as_real(), t, false));
    return lower_from_points(std::move(pts), res);
  };
  return UncertainDP{relaxation_dp(s.fun, s.res, lower, "lower " + label), relaxation_dp(s.fun, s.res, upper, "upper " + label)};
}

inline std::vector<double> uniform_params(std::size_t count) {
  if (count == 1) return {0.5};
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(static_cast<double>(i) / static_cast<double>(count - 1));
  return out;
}

}  // namespace detail

// Uniform sampling: n points on the segment (endpoints included, midpoint
// when n = 1) for the upper side; meets of n+1 points for the lower side.
inline UncertainDP relax_sum_uniform(std::size_t n, const DualSpaces& s = dual_spaces("1")) {
  if (n < 1) throw DomainError("relaxation needs n >= 1");
  return detail::sum_relaxation(s, detail::uniform_params(n), detail::uniform_params(n + 1),
                                "invplus_uniform(" + std::to_string(n) + ")");
}

// Van der Corput sampling. The lower side also includes both segment extrema
// before taking meets of successive points.
inline UncertainDP relax_sum_vdc(std::size_t n, const DualSpaces& s = dual_spaces("1")) {
  if (n < 1) throw DomainError("relaxation needs n >= 1");
  auto params = van_der_corput(n);
  auto lower_params = params;
  lower_params.push_back(0.0);
  lower_params.push_back(1.0);
  std::sort(lower_params.begin(), lower_params.end());
  lower_params.erase(std::unique(lower_params.begin(), lower_params.end()), lower_params.end());
  return detail::sum_relaxation(s, std::move(params), std::move(lower_params), "invplus_vdc(" + std::to_string(n) + ")");
}

struct Bracket {
  double min = 1e-6;
  double max = 1e6;
};

namespace detail {

inline void check_bracket(const Bracket& b) {
  if (!(b.min > 0.0) || !(b.max >= b.min) || std::isinf(b.max)) {
    throw DomainError("bracket must satisfy 0 < min <= max < inf");
  }
}

// Points (c, f / c) for c log-spaced between the admissible extremes of r1.
// Returns nullopt when f exceeds what the brackets can provide.
inline std::optional<std::vector<Element>> product_points(double f, const std::vector<double>& params, const Bracket& b1,
                                                          const Bracket& b2, bool upper) {
  using namespace rounding;
  if (f <= mul_down(b1.min, b2.min)) {
    return std::vector<Element>{Element::pair(Element::real(b1.min), Element::real(b2.min))};
  }
  // The upper side gives up on the last rounding gap below max1 * max2.
  if (std::isinf(f) || f > (upper ? mul_down(b1.max, b2.max) : mul_up(b1.max, b2.max))) return std::nullopt;
  // Upper: endpoints rounded inward so f / c stays inside [min2, max2].
  // Lower: rounded outward so the sampled range covers the whole exact front.
  const double lo = std::min(b1.max, std::max(b1.min, upper ? div_up(f, b2.max) : div_down(f, b2.max)));
  const double hi = std::max(lo, std::min(b1.max, upper ? div_down(f, b2.min) : div_up(f, b2.min)));
  std::vector<Element> pts;
  for (double x : params) {
    double c;
    if (!(hi > lo) || x == 0.0) {
      c = lo;
    } else if (x == 1.0) {
      c = hi;
    } else {
      c = std::clamp(std::exp(std::log(lo) + x * (std::log(hi) - std::log(lo))), lo, hi);
    }
    // Rounding must not leave the bracket: the exact front has min2 <= r2 <= max2.
    double r2 = std::clamp(upper ? div_up(f, c) : div_down(f, c), b2.min, b2.max);
    pts.push_back(Element::pair(Element::real(c), Element::real(r2)));
  }
  return pts;
}

}  // namespace detail

// Van der Corput relaxation of f <= r1 * r2, sampled in log space inside the
// per-axis brackets. Queries above max1 * max2 are infeasible on both sides;
// queries below min1 * min2 get the single point (min1, min2).
inline UncertainDP relax_product_vdc(std::size_t n, Bracket b1 = {}, Bracket b2 = {},
                                     const DualSpaces& s = dual_spaces("1")) {
  if (n < 1) throw DomainError("relaxation needs n >= 1");
  detail::check_bracket(b1);
  detail::check_bracket(b2);
  detail::check_dual_spaces(s);
  auto params = van_der_corput(n);
  auto lower_params = params;
  lower_params.push_back(0.0);
  lower_params.push_back(1.0);
  std::sort(lower_params.begin(), lower_params.end());
  lower_params.erase(std::unique(lower_params.begin(), lower_params.end()), lower_params.end());
  Poset res = s.res;
  auto upper = [=](const Element& f) {
    auto pts = detail::product_points(f.as_real(), params, b1, b2, true);
    if (!pts) return Antichain(res);
    return min_elements_unchecked(res, std::move(*pts));
  };
  auto lower = [=](const Element& f) {
    auto pts = detail::product_points(f.as_real(), lower_params, b1, b2, false);
    if (!pts) return Antichain(res);
    if (pts->size() == 1) return min_elements_unchecked(res, std::move(*pts));
    return lower_from_points(std::move(*pts), res);
  };
  const std::string label = "invtimes_vdc(" + std::to_string(n) + ")";
  return UncertainDP{relaxation_dp(s.fun, s.res, lower, "lower " + label), relaxation_dp(s.fun, s.res, upper, "upper " + label)};
}

}  // namespace mcdp
