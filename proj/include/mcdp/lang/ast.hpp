#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mcdp/lang/diagnostics.hpp"

namespace mcdp::lang {

// Syntax tree of a .mcd document. Equality is structural: spans and the
// spelling of numbers are ignored.

struct Number {
  double value = 0.0;
  std::string text;  // as written; used when a number names a poset element
  SourceSpan span;

  friend bool operator==(const Number& a, const Number& b) { return a.value == b.value; }
};

struct PointExpr {
  struct Label {
    std::string name;
    friend bool operator==(const Label&, const Label&) = default;
  };
  std::variant<Number, Label, std::vector<PointExpr>> value;
  SourceSpan span;

  friend bool operator==(const PointExpr&, const PointExpr&) = default;
};

struct AxisExpr {
  enum class Kind { real, poset_ref, group };
  Kind kind = Kind::real;
  std::string name;   // axis name, may be empty for a bare poset reference
  std::string unit;   // real
  std::string poset;  // poset_ref
  std::vector<AxisExpr> group;
  SourceSpan span;

  friend bool operator==(const AxisExpr&, const AxisExpr&) = default;
};

struct Signature {
  std::vector<AxisExpr> fun;  // empty when F(...) is omitted
  std::vector<AxisExpr> res;
  SourceSpan span;

  friend bool operator==(const Signature&, const Signature&) = default;
};

struct PosetDecl {
  enum class Kind { real, chain, finite, product };
  std::string name;
  Kind kind = Kind::real;
  std::string unit;
  std::vector<std::string> labels;
  std::vector<std::pair<std::string, std::string>> order;
  std::vector<std::string> parts;
  SourceSpan span;

  friend bool operator==(const PosetDecl&, const PosetDecl&) = default;
};

struct TechnologyExpr {
  std::string name;
  std::vector<std::vector<Number>> figures;  // one product of figures per resource axis
  SourceSpan span;

  friend bool operator==(const TechnologyExpr&, const TechnologyExpr&) = default;
};

struct CatalogueEntryExpr {
  PointExpr fun;
  PointExpr res;
  friend bool operator==(const CatalogueEntryExpr&, const CatalogueEntryExpr&) = default;
};

struct DpExpr {
  enum class Kind {
    constant,
    affine,
    catalogue,
    specific,
    identity,
    bottom,
    top,
    mult,
    uid,
    invplus_uniform,
    invplus_vdc,
    invtimes_vdc,
  };
  Kind kind = Kind::identity;
  std::optional<Signature> sig;

  std::vector<PointExpr> points;                 // constant
  std::vector<std::vector<Number>> gain;         // affine; a 1x1 matrix when written as a scalar
  bool gain_is_matrix = false;
  std::vector<Number> offset;                    // affine
  bool offset_is_vector = false;
  std::optional<PointExpr> limit;                // affine
  std::vector<CatalogueEntryExpr> entries;       // catalogue
  std::vector<Number> scale;                     // specific
  std::vector<TechnologyExpr> technologies;      // specific
  std::vector<Number> args;                      // builtins
  std::string unit;                              // uid
  SourceSpan span;

  friend bool operator==(const DpExpr&, const DpExpr&) = default;
};

struct DpDecl {
  std::string name;
  DpExpr expr;
  SourceSpan span;

  friend bool operator==(const DpDecl&, const DpDecl&) = default;
};

struct UncertainDecl {
  enum class Kind { pm, interval };
  std::string name;
  Kind kind = Kind::pm;
  std::string target;  // pm
  Number percent;      // pm
  std::string lower;   // interval
  std::string upper;   // interval
  SourceSpan span;
  SourceSpan target_span;

  friend bool operator==(const UncertainDecl&, const UncertainDecl&) = default;
};

struct TermExpr {
  enum class Kind { atom, series, par, loop };
  Kind kind = Kind::atom;
  std::string name;
  std::vector<TermExpr> children;
  SourceSpan span;

  friend bool operator==(const TermExpr&, const TermExpr&) = default;
};

using Statement = std::variant<PosetDecl, DpDecl, UncertainDecl>;

struct ModelDocument {
  std::optional<std::string> name;
  std::optional<std::string> description;
  std::vector<Statement> statements;
  std::optional<TermExpr> term;

  friend bool operator==(const ModelDocument&, const ModelDocument&) = default;
};

inline const std::string& statement_name(const Statement& s) {
  return std::visit([](const auto& d) -> const std::string& { return d.name; }, s);
}

inline const SourceSpan& statement_span(const Statement& s) {
  return std::visit([](const auto& d) -> const SourceSpan& { return d.span; }, s);
}

}  // namespace mcdp::lang
