#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mcdp/errors.hpp"

namespace mcdp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct FiniteIndex {
  std::size_t value;
  friend auto operator<=>(const FiniteIndex&, const FiniteIndex&) = default;
};

// A point of some poset: a nonnegative real (possibly +inf), the index of an
// element of a finite poset, or a tuple for product posets. Units and labels
// live on the owning Poset, not on the element.
class Element {
 public:
  using Tuple = std::vector<Element>;

  Element() : data_(0.0) {}

  static Element real(double v) {
    if (std::isnan(v) || v < 0.0) {
      throw DomainError("real element must be >= 0 or +inf, got " + format_double(v));
    }
    Element e;
    e.data_ = v == 0.0 ? 0.0 : v;  // folds -0.0
    return e;
  }
  static Element finite(std::size_t index) {
    Element e;
    e.data_ = FiniteIndex{index};
    return e;
  }
  static Element tuple(Tuple parts) {
    Element e;
    e.data_ = std::move(parts);
    return e;
  }
  static Element pair(Element a, Element b) {
    Tuple t;
    t.reserve(2);
    t.push_back(std::move(a));
    t.push_back(std::move(b));
    return tuple(std::move(t));
  }

  bool is_real() const { return std::holds_alternative<double>(data_); }
  bool is_finite() const { return std::holds_alternative<FiniteIndex>(data_); }
  bool is_tuple() const { return std::holds_alternative<Tuple>(data_); }

  double as_real() const {
    if (auto* v = std::get_if<double>(&data_)) return *v;
    throw DomainError("element is not a real value");
  }
  std::size_t as_finite() const {
    if (auto* v = std::get_if<FiniteIndex>(&data_)) return v->value;
    throw DomainError("element is not a finite-poset element");
  }
  const Tuple& as_tuple() const {
    if (auto* v = std::get_if<Tuple>(&data_)) return *v;
    throw DomainError("element is not a tuple");
  }
  const Element& operator[](std::size_t i) const { return as_tuple().at(i); }

  friend bool operator==(const Element&, const Element&) = default;

  // Total order used for canonical sorting. Lexicographic on tuples, which is
  // a linear extension of the componentwise order on real products.
  friend std::strong_ordering operator<=>(const Element& a, const Element& b) {
    if (a.data_.index() != b.data_.index()) return a.data_.index() <=> b.data_.index();
    if (a.is_real()) {
      double x = a.as_real(), y = b.as_real();
      if (x < y) return std::strong_ordering::less;
      if (y < x) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    }
    if (a.is_finite()) return a.as_finite() <=> b.as_finite();
    const auto& ta = a.as_tuple();
    const auto& tb = b.as_tuple();
    std::size_t n = std::min(ta.size(), tb.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (auto c = ta[i] <=> tb[i]; c != 0) return c;
    }
    return ta.size() <=> tb.size();
  }

  // Shortest round-trip decimal; "inf" for +inf.
  static std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  }

 private:
  std::variant<double, FiniteIndex, Tuple> data_;
};

}  // namespace mcdp
