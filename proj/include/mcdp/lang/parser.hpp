#pragma once

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mcdp/lang/ast.hpp"
#include "mcdp/lang/diagnostics.hpp"
#include "mcdp/lang/lexer.hpp"

namespace mcdp::lang {

struct ParseResult {
  ModelDocument document;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return !has_errors(diagnostics); }
};

namespace detail {

struct ParseFailure {};

inline bool is_statement_keyword(const std::string& s) {
  return s == "poset" || s == "dp" || s == "uncertain" || s == "term" || s == "name" || s == "description";
}

class Parser {
 public:
  Parser(std::string_view src, std::vector<Token> toks, std::vector<Diagnostic>& diags)
      : src_(src), toks_(std::move(toks)), diags_(diags) {}

  ModelDocument document() {
    ModelDocument doc;
    std::map<std::string, SourceSpan> defined;
    std::optional<SourceSpan> term_span;
    bool term_seen = false;
    while (!at_end()) {
      const Token& t = peek();
      stmt_start_ = pos_;
      try {
        if (t.kind != TokenKind::identifier || !is_statement_keyword(t.text)) {
          fail(t.span, "expected a statement (poset, dp, uncertain, term, name, description), found " + describe(t));
        }
        if (t.text == "name" || t.text == "description") {
          next();
          const Token& s = expect_kind(TokenKind::string, "a string after '" + t.text + "'");
          (t.text == "name" ? doc.name : doc.description) = s.text;
        } else if (t.text == "term") {
          term_seen = true;
          SourceSpan kw = next().span;
          TermExpr te = term_expr();
          if (term_span) {
            report(kw, "duplicate term: a model has exactly one 'term' (first one at line " +
                           std::to_string(term_span->line) + ")");
          } else {
            term_span = kw;
            doc.term = std::move(te);
          }
        } else {
          Statement st = t.text == "poset" ? Statement(poset_decl()) : t.text == "dp" ? Statement(dp_decl()) : Statement(uncertain_decl());
          const std::string& nm = statement_name(st);
          if (auto it = defined.find(nm); it != defined.end()) {
            report(statement_span(st), "duplicate definition of '" + nm + "' (first defined at line " +
                                            std::to_string(it->second.line) + ")");
          } else {
            defined.emplace(nm, statement_span(st));
            doc.statements.push_back(std::move(st));
          }
        }
      } catch (const ParseFailure&) {
        synchronize();
      }
    }
    if (!doc.term && !term_seen) report(peek().span, "missing term: a model needs exactly one 'term' statement");
    return doc;
  }

 private:
  // ---- token helpers
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == TokenKind::end; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_symbol(const char* s, std::size_t k = 0) const {
    return peek(k).kind == TokenKind::symbol && peek(k).text == s;
  }
  bool is_ident(const char* s, std::size_t k = 0) const {
    return peek(k).kind == TokenKind::identifier && peek(k).text == s;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::end: return "end of input";
      case TokenKind::string: return "string \"" + t.text + "\"";
      default: return "'" + t.text + "'";
    }
  }

  void report(const SourceSpan& sp, std::string msg) { diags_.push_back({Severity::error, sp, std::move(msg)}); }
  [[noreturn]] void fail(const SourceSpan& sp, std::string msg) {
    report(sp, std::move(msg));
    throw ParseFailure{};
  }

  // Where a missing token belongs: the next token, or just after the previous
  // one when the next token is on a later line (or is the end of input).
  SourceSpan missing_at() const {
    const SourceSpan& here = peek().span;
    if (pos_ == 0) return here;
    const SourceSpan& prev = toks_[pos_ - 1].span;
    if (here.line == prev.line && peek().kind != TokenKind::end) return here;
    return SourceSpan{prev.line, prev.column + (prev.end - prev.begin), prev.end, prev.end};
  }

  const Token& expect_symbol(const char* s, const std::string& context) {
    if (!is_symbol(s)) fail(missing_at(), std::string("expected '") + s + "' " + context + ", found " + describe(peek()));
    return next();
  }
  const Token& expect_kind(TokenKind k, const std::string& what) {
    if (peek().kind != k) fail(peek().span, "expected " + what + ", found " + describe(peek()));
    return next();
  }
  const Token& expect_ident(const std::string& what) {
    const Token& t = peek();
    if (t.kind != TokenKind::identifier) fail(t.span, "expected " + what + ", found " + describe(t));
    if (is_statement_keyword(t.text) && t.text != "name" && t.text != "description") {
      fail(t.span, "'" + t.text + "' is a keyword and cannot be used as " + what);
    }
    return next();
  }
  void expect_keyword(const char* kw, const std::string& context) {
    if (!is_ident(kw)) fail(peek().span, std::string("expected '") + kw + "' " + context + ", found " + describe(peek()));
    next();
  }

  bool starts_statement(std::size_t i) const {
    const Token& t = toks_[i];
    return t.kind == TokenKind::identifier && is_statement_keyword(t.text) && (i == 0 || toks_[i - 1].span.line < t.span.line);
  }

  // Skips to the next statement keyword that begins a line. The failing
  // statement's own keyword is never a resumption point.
  void synchronize() {
    if (pos_ == stmt_start_ && !at_end()) next();
    while (!at_end() && !starts_statement(pos_)) next();
  }

  SourceSpan from(const SourceSpan& start) const {
    SourceSpan s = start;
    s.end = toks_[pos_ > 0 ? pos_ - 1 : 0].span.end;
    if (s.end < start.end) s.end = start.end;
    return s;
  }

  // ---- leaves
  Number number() {
    SourceSpan start = peek().span;
    bool negative = false;
    if (is_symbol("-")) {
      next();
      negative = true;
    }
    Number n;
    const Token& t = peek();
    if (t.kind == TokenKind::identifier && t.text == "inf") {
      next();
      n.value = INFINITY;
      n.text = "inf";
    } else if (t.kind == TokenKind::number) {
      next();
      n.text = t.text;
      n.value = std::strtod(t.text.c_str(), nullptr);
    } else {
      fail(t.span, "expected a number, found " + describe(t));
    }
    if (negative) {
      n.value = -n.value;
      n.text = "-" + n.text;
    }
    n.span = from(start);
    return n;
  }

  std::size_t count_arg() {
    Number n = number();
    if (!(n.value >= 1.0) || n.value != std::floor(n.value) || std::isinf(n.value)) {
      fail(n.span, "expected a positive integer, found '" + n.text + "'");
    }
    return static_cast<std::size_t>(n.value);
  }

  std::string label() {
    const Token& t = peek();
    if (t.kind == TokenKind::identifier || t.kind == TokenKind::number) return next().text;
    fail(t.span, "expected an element label, found " + describe(t));
  }

  // After '[': the raw text up to the matching ']' on the same line.
  std::string unit_text(const SourceSpan& open) {
    std::size_t begin = open.end;
    while (!is_symbol("]")) {
      if (at_end() || peek().span.line != open.line || is_symbol("[")) {
        fail(peek().span, "expected ']' to close the unit opened at column " + std::to_string(open.column) +
                              ", found " + describe(peek()));
      }
      next();
    }
    std::size_t end = peek().span.begin;
    next();
    std::string u(src_.substr(begin, end - begin));
    auto first = u.find_first_not_of(" \t");
    auto last = u.find_last_not_of(" \t");
    if (first == std::string::npos) fail(open, "empty unit");
    return u.substr(first, last - first + 1);
  }

  PointExpr point() {
    SourceSpan start = peek().span;
    PointExpr p;
    if (is_symbol("(")) {
      next();
      std::vector<PointExpr> parts;
      parts.push_back(point());
      while (is_symbol(",")) {
        next();
        parts.push_back(point());
      }
      expect_symbol(")", "to close the tuple");
      p.value = std::move(parts);
    } else if (peek().kind == TokenKind::number || is_symbol("-") || is_ident("inf")) {
      p.value = number();
    } else if (peek().kind == TokenKind::identifier) {
      p.value = PointExpr::Label{next().text};
    } else {
      fail(peek().span, "expected a value, a label or a tuple, found " + describe(peek()));
    }
    p.span = from(start);
    return p;
  }

  // ---- signatures
  AxisExpr axis() {
    SourceSpan start = peek().span;
    AxisExpr a;
    if (is_symbol("(")) {
      next();
      a.kind = AxisExpr::Kind::group;
      a.group = axes();
      expect_symbol(")", "to close the axis group");
    } else {
      const Token& id = expect_kind(TokenKind::identifier, "an axis name or poset name");
      if (is_symbol("[")) {
        SourceSpan open = next().span;
        a.kind = AxisExpr::Kind::real;
        a.name = id.text;
        a.unit = unit_text(open);
      } else if (is_symbol(":")) {
        next();
        a.kind = AxisExpr::Kind::poset_ref;
        a.name = id.text;
        a.poset = expect_kind(TokenKind::identifier, "a poset name after ':'").text;
      } else {
        a.kind = AxisExpr::Kind::poset_ref;
        a.poset = id.text;
      }
    }
    a.span = from(start);
    return a;
  }

  std::vector<AxisExpr> axes() {
    std::vector<AxisExpr> out;
    out.push_back(axis());
    while (is_symbol(",")) {
      next();
      out.push_back(axis());
    }
    return out;
  }

  Signature signature() {
    SourceSpan start = peek().span;
    Signature s;
    // F(...) may be left out; the DP then has a one-point functionality space.
    if (!is_ident("R") || !is_symbol("(", 1)) {
      expect_keyword("F", "to start the signature F(...) R(...)");
      expect_symbol("(", "after 'F'");
      s.fun = axes();
      expect_symbol(")", "to close the functionality list");
    }
    expect_keyword("R", "to start the resource list");
    expect_symbol("(", "after 'R'");
    s.res = axes();
    expect_symbol(")", "to close the resource list");
    s.span = from(start);
    return s;
  }

  // ---- statements
  PosetDecl poset_decl() {
    SourceSpan start = next().span;  // 'poset'
    PosetDecl d;
    d.name = expect_ident("a poset name").text;
    expect_symbol("=", "after the poset name");
    if (is_ident("R") && is_symbol("+", 1)) {
      next();
      next();
      d.kind = PosetDecl::Kind::real;
      SourceSpan open = expect_symbol("[", "before the unit of R+").span;
      d.unit = unit_text(open);
    } else if (is_ident("chain")) {
      next();
      d.kind = PosetDecl::Kind::chain;
      d.labels = label_list();
    } else if (is_ident("finite")) {
      next();
      d.kind = PosetDecl::Kind::finite;
      d.labels = label_list();
      expect_keyword("order", "after the element list of a finite poset");
      expect_symbol("{", "to open the order relations");
      while (!is_symbol("}")) {
        std::string a = label();
        expect_symbol("<", "between related elements");
        std::string b = label();
        d.order.emplace_back(std::move(a), std::move(b));
        if (!is_symbol(",")) break;
        next();
      }
      expect_symbol("}", "to close the order relations");
    } else if (is_ident("product")) {
      next();
      d.kind = PosetDecl::Kind::product;
      expect_symbol("(", "after 'product'");
      d.parts.push_back(expect_kind(TokenKind::identifier, "a poset name").text);
      while (is_symbol(",")) {
        next();
        d.parts.push_back(expect_kind(TokenKind::identifier, "a poset name").text);
      }
      expect_symbol(")", "to close the product");
    } else {
      fail(peek().span, "expected 'R+[unit]', 'chain', 'finite' or 'product', found " + describe(peek()));
    }
    d.span = from(start);
    return d;
  }

  std::vector<std::string> label_list() {
    expect_symbol("{", "to open the element list");
    std::vector<std::string> out;
    out.push_back(label());
    while (is_symbol(",")) {
      next();
      out.push_back(label());
    }
    expect_symbol("}", "to close the element list");
    return out;
  }

  std::vector<Number> number_row() {
    std::vector<Number> out;
    out.push_back(number());
    while (is_symbol(",")) {
      next();
      out.push_back(number());
    }
    return out;
  }

  std::vector<Number> figure_product() {
    std::vector<Number> out;
    out.push_back(number());
    while (is_symbol("*")) {
      next();
      out.push_back(number());
    }
    return out;
  }

  DpExpr dp_expr() {
    SourceSpan start = peek().span;
    DpExpr e;
    const Token& kw = expect_kind(TokenKind::identifier, "a DP kind");
    const std::string& k = kw.text;
    if (k == "constant") {
      e.kind = DpExpr::Kind::constant;
      e.sig = signature();
      expect_symbol("{", "to open the constant's points");
      e.points.push_back(point());
      while (is_symbol(",")) {
        next();
        e.points.push_back(point());
      }
      expect_symbol("}", "to close the constant's points");
    } else if (k == "affine") {
      e.kind = DpExpr::Kind::affine;
      e.sig = signature();
      if (is_symbol("[")) {
        next();
        e.gain_is_matrix = true;
        do {
          if (is_symbol(",")) next();
          expect_symbol("[", "to open a gain row");
          e.gain.push_back(number_row());
          expect_symbol("]", "to close a gain row");
        } while (is_symbol(","));
        expect_symbol("]", "to close the gain matrix");
      } else {
        e.gain.push_back({number()});
      }
      if (is_symbol("[")) {
        next();
        e.offset_is_vector = true;
        e.offset = number_row();
        expect_symbol("]", "to close the offset vector");
      } else {
        e.offset.push_back(number());
      }
      if (is_ident("limit")) {
        next();
        e.limit = point();
      }
    } else if (k == "catalogue") {
      e.kind = DpExpr::Kind::catalogue;
      e.sig = signature();
      expect_symbol("{", "to open the catalogue");
      while (!is_symbol("}")) {
        CatalogueEntryExpr ce;
        ce.fun = point();
        if (peek().kind != TokenKind::arrow) fail(peek().span, "expected '->' in catalogue entry, found " + describe(peek()));
        next();
        ce.res = point();
        e.entries.push_back(std::move(ce));
        if (is_symbol(",")) next();
      }
      expect_symbol("}", "to close the catalogue");
    } else if (k == "specific") {
      e.kind = DpExpr::Kind::specific;
      e.sig = signature();
      if (is_ident("scale")) {
        next();
        expect_symbol("(", "after 'scale'");
        e.scale = number_row();
        expect_symbol(")", "to close the scale factors");
      }
      expect_symbol("{", "to open the technology list");
      while (!is_symbol("}")) {
        SourceSpan ts = peek().span;
        TechnologyExpr t;
        t.name = expect_kind(TokenKind::identifier, "a technology name").text;
        expect_symbol(":", "after the technology name");
        expect_symbol("(", "to open the technology figures");
        t.figures.push_back(figure_product());
        while (is_symbol(",")) {
          next();
          t.figures.push_back(figure_product());
        }
        expect_symbol(")", "to close the technology figures");
        t.span = from(ts);
        e.technologies.push_back(std::move(t));
        if (is_symbol(",")) next();
      }
      expect_symbol("}", "to close the technology list");
    } else if (k == "identity" || k == "bottom" || k == "top" || k == "mult") {
      e.kind = k == "identity" ? DpExpr::Kind::identity
               : k == "bottom" ? DpExpr::Kind::bottom
               : k == "top"    ? DpExpr::Kind::top
                               : DpExpr::Kind::mult;
      e.sig = signature();
    } else if (k == "uid") {
      e.kind = DpExpr::Kind::uid;
      expect_symbol("(", "after 'uid'");
      e.args.push_back(number());
      SourceSpan open = expect_symbol("[", "before the unit of the step").span;
      e.unit = unit_text(open);
      expect_symbol(")", "to close 'uid'");
    } else if (k == "invplus_uniform" || k == "invplus_vdc" || k == "invtimes_vdc") {
      e.kind = k == "invplus_uniform" ? DpExpr::Kind::invplus_uniform
               : k == "invplus_vdc"   ? DpExpr::Kind::invplus_vdc
                                      : DpExpr::Kind::invtimes_vdc;
      expect_symbol("(", "after '" + k + "'");
      Number n;
      n.span = peek().span;
      n.value = static_cast<double>(count_arg());
      n.text = std::to_string(static_cast<std::size_t>(n.value));
      e.args.push_back(n);
      while (is_symbol(",")) {
        next();
        e.args.push_back(number());
      }
      expect_symbol(")", "to close '" + k + "'");
      const std::size_t expected_args = e.kind == DpExpr::Kind::invtimes_vdc ? 0 : 1;
      if (expected_args == 1 && e.args.size() != 1) fail(kw.span, "'" + k + "' takes exactly one argument");
      if (e.kind == DpExpr::Kind::invtimes_vdc && e.args.size() != 3 && e.args.size() != 5) {
        fail(kw.span, "'invtimes_vdc' takes (n, rmin, rmax) or (n, rmin1, rmax1, rmin2, rmax2)");
      }
      if (is_ident("F") || is_ident("R")) e.sig = signature();
    } else {
      fail(kw.span, "unknown DP kind '" + k + "'");
    }
    e.span = from(start);
    return e;
  }

  DpDecl dp_decl() {
    SourceSpan start = next().span;  // 'dp'
    DpDecl d;
    d.name = expect_ident("a DP name").text;
    expect_symbol("=", "after the DP name");
    d.expr = dp_expr();
    d.span = from(start);
    return d;
  }

  UncertainDecl uncertain_decl() {
    SourceSpan start = next().span;  // 'uncertain'
    UncertainDecl d;
    d.name = expect_ident("a name").text;
    expect_symbol("=", "after the name");
    if (is_ident("pm")) {
      next();
      d.kind = UncertainDecl::Kind::pm;
      expect_symbol("(", "after 'pm'");
      d.target_span = peek().span;
      d.target = expect_kind(TokenKind::identifier, "the DP to perturb").text;
      expect_symbol(",", "after the DP name");
      d.percent = number();
      expect_symbol("%", "after the uncertainty percentage");
      expect_symbol(")", "to close 'pm'");
    } else if (is_ident("interval")) {
      next();
      d.kind = UncertainDecl::Kind::interval;
      expect_symbol("(", "after 'interval'");
      d.target_span = peek().span;
      d.lower = expect_kind(TokenKind::identifier, "the lower DP").text;
      expect_symbol(",", "between the bounds");
      d.upper = expect_kind(TokenKind::identifier, "the upper DP").text;
      expect_symbol(")", "to close 'interval'");
    } else {
      fail(peek().span, "expected 'pm(...)' or 'interval(...)', found " + describe(peek()));
    }
    d.span = from(start);
    return d;
  }

  TermExpr term_expr() {
    SourceSpan start = peek().span;
    TermExpr t;
    const Token& id = expect_kind(TokenKind::identifier, "a term");
    if ((id.text == "series" || id.text == "par") && is_symbol("(")) {
      next();
      t.kind = id.text == "series" ? TermExpr::Kind::series : TermExpr::Kind::par;
      t.children.push_back(term_expr());
      expect_symbol(",", "between the operands of '" + id.text + "'");
      t.children.push_back(term_expr());
      expect_symbol(")", "to close '" + id.text + "'");
    } else if (id.text == "loop" && is_symbol("(")) {
      next();
      t.kind = TermExpr::Kind::loop;
      t.children.push_back(term_expr());
      expect_symbol(")", "to close 'loop'");
    } else {
      if (is_statement_keyword(id.text) && id.text != "name" && id.text != "description") {
        fail(id.span, "'" + id.text + "' is a keyword, expected a term");
      }
      t.kind = TermExpr::Kind::atom;
      t.name = id.text;
    }
    t.span = from(start);
    return t;
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t stmt_start_ = 0;
  std::vector<Diagnostic>& diags_;
};

}  // namespace detail

// Parses a whole document. Errors do not stop the parse: the parser resumes
// at the next statement and reports every diagnostic it finds.
inline ParseResult parse(std::string_view text) {
  ParseResult r;
  Lexer lx(text);
  auto toks = lx.run(r.diagnostics);
  detail::Parser p(text, std::move(toks), r.diagnostics);
  r.document = p.document();
  return r;
}

}  // namespace mcdp::lang
