#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mcdp/dp.hpp"
#include "mcdp/lang/ast.hpp"
#include "mcdp/lang/diagnostics.hpp"
#include "mcdp/relaxations.hpp"
#include "mcdp/term.hpp"
#include "mcdp/uncertainty.hpp"

namespace mcdp::lang {

// A named leaf of a functionality or resource space.
struct AxisInfo {
  std::string name;
  Poset poset;
};

// One side of an interface: its poset, leaf names and where it was written.
struct Port {
  Poset poset;
  std::vector<AxisInfo> axes;
  SourceSpan span;
};

struct AtomInfo {
  Port fun;
  Port res;
  SourceSpan span;
};

struct Model {
  std::optional<std::string> name;
  std::optional<std::string> description;
  Term term;
  UncertainValuation valuation;
  std::map<std::string, AtomInfo, std::less<>> atoms;
  Port fun;
  Port res;

  const Poset& funsp() const { return fun.poset; }
  const Poset& ressp() const { return res.poset; }
};

struct ElaborateOptions {
  std::optional<std::size_t> relax_n;  // overrides n of every sampling relaxation
};

struct ElaborateResult {
  std::optional<Model> model;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return model.has_value() && !has_errors(diagnostics); }
};

namespace detail {

struct ElabFailure {};

class Elaborator {
 public:
  Elaborator(const ElaborateOptions& opts, std::vector<Diagnostic>& diags) : opts_(opts), diags_(diags) {}

  std::optional<Model> run(const ModelDocument& doc) {
    for (const auto& st : doc.statements) {
      try {
        if (auto* p = std::get_if<PosetDecl>(&st)) {
          posets_.emplace(p->name, poset_decl(*p));
        } else if (auto* d = std::get_if<DpDecl>(&st)) {
          dp_decl(*d);
        } else {
          uncertain_decl(std::get<UncertainDecl>(st));
        }
      } catch (const ElabFailure&) {
        failed_.insert(statement_name(st));
      } catch (const Error& e) {
        report(statement_span(st), e.what());
        failed_.insert(statement_name(st));
      }
    }
    if (!doc.term) return std::nullopt;
    std::optional<Typed> top;
    try {
      top = term(*doc.term);
    } catch (const ElabFailure&) {
    }
    if (!top || has_errors(diags_)) return std::nullopt;
    Model m{doc.name, doc.description, top->term, {}, {}, top->fun, top->res};
    for (const auto& name : atoms(top->term)) {
      m.valuation.emplace(name, valuation_.at(name));
      m.atoms.emplace(name, atoms_.at(name));
    }
    return m;
  }

 private:
  struct Typed {
    Term term;
    Port fun;
    Port res;
  };

  void report(const SourceSpan& sp, std::string msg, Severity sev = Severity::error) {
    diags_.push_back({sev, sp, std::move(msg)});
  }
  [[noreturn]] void fail(const SourceSpan& sp, std::string msg) {
    report(sp, std::move(msg));
    throw ElabFailure{};
  }

  // ---- posets and signatures
  Poset poset_decl(const PosetDecl& d) {
    switch (d.kind) {
      case PosetDecl::Kind::real: return Poset::real(d.unit, d.name);
      case PosetDecl::Kind::chain: return Poset::chain(d.labels, d.name);
      case PosetDecl::Kind::finite: return Poset::finite(d.labels, d.order, d.name);
      case PosetDecl::Kind::product: {
        std::vector<Poset> parts;
        for (const auto& p : d.parts) parts.push_back(lookup_poset(p, d.span));
        return Poset::product(std::move(parts), d.name);
      }
    }
    fail(d.span, "bad poset declaration");
  }

  Poset lookup_poset(const std::string& name, const SourceSpan& sp) {
    auto it = posets_.find(name);
    if (it != posets_.end()) return it->second;
    if (failed_.count(name)) throw ElabFailure{};
    fail(sp, "unknown poset '" + name + "' (posets must be declared before use)");
  }

  void leaf_names(const Poset& p, const std::string& base, std::vector<AxisInfo>& out) {
    if (p.kind() != PosetKind::product) {
      out.push_back({base, p});
      return;
    }
    for (std::size_t i = 0; i < p.arity(); ++i) {
      const std::string& sub = p.part(i).name();
      leaf_names(p.part(i), base + "." + (sub.empty() ? std::to_string(i) : sub), out);
    }
  }

  Poset axis(const AxisExpr& a, std::vector<AxisInfo>& names) {
    switch (a.kind) {
      case AxisExpr::Kind::real: {
        Poset p = Poset::real(a.unit, a.name);
        names.push_back({a.name, p});
        return p;
      }
      case AxisExpr::Kind::poset_ref: {
        Poset p = lookup_poset(a.poset, a.span);
        const std::string nm = a.name.empty() ? a.poset : a.name;
        leaf_names(p, nm, names);
        return p.named(nm);
      }
      case AxisExpr::Kind::group: return axes(a.group, names);
    }
    fail(a.span, "bad axis");
  }

  Poset axes(const std::vector<AxisExpr>& as, std::vector<AxisInfo>& names) {
    if (as.size() == 1) return axis(as[0], names);
    std::vector<Poset> parts;
    for (const auto& a : as) parts.push_back(axis(a, names));
    return Poset::product(std::move(parts));
  }

  std::pair<Port, Port> signature(const Signature& sig) {
    std::vector<AxisInfo> fa, ra;
    Poset fp = sig.fun.empty() ? Poset::chain({"*"}) : axes(sig.fun, fa);
    Poset rp = axes(sig.res, ra);
    return {Port{fp, fa, sig.span}, Port{rp, ra, sig.span}};
  }

  // ---- values
  Element point(const PointExpr& pe, const Poset& p) {
    switch (p.kind()) {
      case PosetKind::real: {
        auto* n = std::get_if<Number>(&pe.value);
        if (!n) fail(pe.span, "expected a number for " + p.to_string());
        if (!(n->value >= 0.0)) fail(pe.span, "values must be >= 0, got " + n->text);
        return Element::real(n->value);
      }
      case PosetKind::finite: {
        std::string label;
        if (auto* l = std::get_if<PointExpr::Label>(&pe.value)) {
          label = l->name;
        } else if (auto* n = std::get_if<Number>(&pe.value)) {
          label = n->text;
        } else {
          fail(pe.span, "expected an element of " + p.to_string());
        }
        auto idx = p.index_of(label);
        if (!idx) fail(pe.span, "'" + label + "' is not an element of " + p.to_string());
        return Element::finite(*idx);
      }
      case PosetKind::product: {
        auto* parts = std::get_if<std::vector<PointExpr>>(&pe.value);
        if (!parts || parts->size() != p.arity()) {
          fail(pe.span, "expected a tuple of " + std::to_string(p.arity()) + " values for " + p.to_string());
        }
        Element::Tuple t;
        for (std::size_t i = 0; i < p.arity(); ++i) t.push_back(point((*parts)[i], p.part(i)));
        return Element::tuple(std::move(t));
      }
    }
    fail(pe.span, "bad value");
  }

  static double value_of(const Number& n) { return n.value; }

  // ---- design problems
  void define(const std::string& name, UncertainDP u, const Port& f, const Port& r, const SourceSpan& sp, bool plain) {
    valuation_.emplace(name, std::move(u));
    atoms_.emplace(name, AtomInfo{f, r, sp});
    if (plain) plain_.insert(name);
  }

  void dp_decl(const DpDecl& d) {
    const DpExpr& e = d.expr;
    auto need_sig = [&]() -> std::pair<Port, Port> {
      if (!e.sig) fail(e.span, std::string("'") + detail_name(e.kind) + "' needs a signature F(...) R(...)");
      return signature(*e.sig);
    };
    auto wrap = [&](auto&& build) -> DesignProblem {
      try {
        return build();
      } catch (const Error& ex) {
        fail(e.span, "in '" + d.name + "': " + ex.what());
      }
    };
    switch (e.kind) {
      case DpExpr::Kind::constant: {
        auto [f, r] = need_sig();
        std::vector<Element> pts;
        for (const auto& p : e.points) pts.push_back(point(p, r.poset));
        auto dp = wrap([&] { return constant(f.poset, min_elements(pts, r.poset)); });
        return define(d.name, udp_from_dp(dp), f, r, d.span, true);
      }
      case DpExpr::Kind::affine: {
        auto [f, r] = need_sig();
        const std::size_t nf = f.axes.size(), nr = r.axes.size();
        AffineParams params;
        if (e.gain_is_matrix) {
          for (const auto& row : e.gain) {
            params.gain.emplace_back();
            for (const auto& g : row) params.gain.back().push_back(g.value);
          }
        } else {
          if (nf != nr && !(nf == 1 || nr == 1)) {
            fail(e.span, "a scalar gain needs matching axis counts; write a gain matrix [[..], ..] with " +
                             std::to_string(nr) + " rows of " + std::to_string(nf));
          }
          const double g = e.gain.at(0).at(0).value;
          params.gain.assign(nr, std::vector<double>(nf, 0.0));
          for (std::size_t j = 0; j < nr; ++j)
            for (std::size_t i = 0; i < nf; ++i)
              if (nf == nr ? i == j : true) params.gain[j][i] = g;
        }
        if (e.offset_is_vector) {
          for (const auto& o : e.offset) params.offset.push_back(o.value);
        } else {
          params.offset.assign(nr, e.offset.at(0).value);
        }
        if (e.limit) params.limit = point(*e.limit, f.poset);
        auto dp = wrap([&] { return affine(f.poset, r.poset, params); });
        return define(d.name, udp_from_dp(dp), f, r, d.span, true);
      }
      case DpExpr::Kind::catalogue: {
        auto [f, r] = need_sig();
        std::vector<CatalogueEntry> entries;
        for (const auto& en : e.entries) entries.push_back({point(en.fun, f.poset), point(en.res, r.poset)});
        auto dp = wrap([&] { return catalogue(f.poset, r.poset, entries); });
        return define(d.name, udp_from_dp(dp), f, r, d.span, true);
      }
      case DpExpr::Kind::specific: {
        auto [f, r] = need_sig();
        SpecificParams params;
        for (const auto& s : e.scale) params.scale.push_back(s.value);
        for (const auto& t : e.technologies) {
          Technology tech{t.name, {}};
          for (const auto& fig : t.figures) {
            tech.divisors.emplace_back();
            for (const auto& v : fig) tech.divisors.back().push_back(v.value);
          }
          params.technologies.push_back(std::move(tech));
        }
        auto dp = wrap([&] { return specific_catalogue(f.poset, r.poset, params); });
        return define(d.name, udp_from_dp(dp), f, r, d.span, true);
      }
      case DpExpr::Kind::identity: {
        auto [f, r] = need_sig();
        if (!(f.poset == r.poset)) {
          fail(e.span, "identity needs equal spaces, got " + f.poset.to_string() + " and " + r.poset.to_string());
        }
        return define(d.name, udp_from_dp(identity(f.poset)), f, r, d.span, true);
      }
      case DpExpr::Kind::bottom: {
        auto [f, r] = need_sig();
        return define(d.name, udp_from_dp(bottom_dp(f.poset, r.poset)), f, r, d.span, true);
      }
      case DpExpr::Kind::top: {
        auto [f, r] = need_sig();
        return define(d.name, udp_from_dp(top_dp(f.poset, r.poset)), f, r, d.span, true);
      }
      case DpExpr::Kind::mult: {
        auto [f, r] = need_sig();
        auto dp = wrap([&] { return multiply(f.poset, r.poset); });
        return define(d.name, udp_from_dp(dp), f, r, d.span, true);
      }
      case DpExpr::Kind::uid: {
        const double alpha = e.args.at(0).value;
        if (!(alpha > 0.0) || std::isinf(alpha)) fail(e.args[0].span, "uid step must be positive and finite, got " + e.args[0].text);
        UncertainDP u = uncertain_identity(alpha, e.unit);
        Port f{u.funsp(), {{"x", u.funsp()}}, e.span};
        Port r{u.ressp(), {{"x", u.ressp()}}, e.span};
        return define(d.name, std::move(u), f, r, d.span, false);
      }
      case DpExpr::Kind::invplus_uniform:
      case DpExpr::Kind::invplus_vdc:
      case DpExpr::Kind::invtimes_vdc: {
        auto ports = [&]() -> std::pair<Port, Port> {
          if (e.sig) return signature(*e.sig);
          DualSpaces s = dual_spaces("1");
          return {Port{s.fun, {{"f", s.fun}}, e.span}, Port{s.res, {{"r1", s.res.part(0)}, {"r2", s.res.part(1)}}, e.span}};
        }();
        const DualSpaces s{ports.first.poset, ports.second.poset};
        const std::size_t n = opts_.relax_n.value_or(static_cast<std::size_t>(e.args.at(0).value));
        UncertainDP u = [&] {
          try {
            if (e.kind == DpExpr::Kind::invplus_uniform) return relax_sum_uniform(n, s);
            if (e.kind == DpExpr::Kind::invplus_vdc) return relax_sum_vdc(n, s);
            Bracket b1{value_of(e.args.at(1)), value_of(e.args.at(2))};
            Bracket b2 = e.args.size() == 5 ? Bracket{value_of(e.args[3]), value_of(e.args[4])} : b1;
            return relax_product_vdc(n, b1, b2, s);
          } catch (const Error& ex) {
            fail(e.span, "in '" + d.name + "': " + ex.what());
          }
        }();
        return define(d.name, std::move(u), ports.first, ports.second, d.span, false);
      }
    }
  }

  static const char* detail_name(DpExpr::Kind k) {
    switch (k) {
      case DpExpr::Kind::constant: return "constant";
      case DpExpr::Kind::affine: return "affine";
      case DpExpr::Kind::catalogue: return "catalogue";
      case DpExpr::Kind::specific: return "specific";
      case DpExpr::Kind::identity: return "identity";
      case DpExpr::Kind::bottom: return "bottom";
      case DpExpr::Kind::top: return "top";
      case DpExpr::Kind::mult: return "mult";
      default: return "builtin";
    }
  }

  const UncertainDP& plain_dp(const std::string& name, const SourceSpan& sp, const char* what) {
    auto it = valuation_.find(name);
    if (it == valuation_.end()) {
      if (failed_.count(name)) throw ElabFailure{};
      fail(sp, std::string("unknown DP '") + name + "' in " + what + " (DPs must be defined before use)");
    }
    if (!plain_.count(name)) fail(sp, std::string(what) + " needs a plain DP, but '" + name + "' is already uncertain");
    return it->second;
  }

  void uncertain_decl(const UncertainDecl& d) {
    if (d.kind == UncertainDecl::Kind::pm) {
      const UncertainDP& base = plain_dp(d.target, d.target_span, "pm(...)");
      const double p = d.percent.value / 100.0;
      if (!(p >= 0.0 && p < 1.0)) fail(d.percent.span, "uncertainty must lie in [0%, 100%), got " + d.percent.text + "%");
      try {
        const AtomInfo info = atoms_.at(d.target);
        define(d.name, scale_catalogue_uncertain(base.lower, p), info.fun, info.res, d.span, false);
      } catch (const Error& ex) {
        fail(d.target_span, ex.what());
      }
      return;
    }
    const UncertainDP& lo = plain_dp(d.lower, d.target_span, "interval(...)");
    const UncertainDP& hi = plain_dp(d.upper, d.target_span, "interval(...)");
    try {
      const AtomInfo info = atoms_.at(d.lower);
      define(d.name, UncertainDP::checked(lo.lower, hi.lower), info.fun, info.res, d.span, false);
    } catch (const Error& ex) {
      fail(d.span, "interval(" + d.lower + ", " + d.upper + "): " + ex.what());
    }
  }

  // ---- terms
  void mismatch(const SourceSpan& at, const std::string& msg, const Port& a, const std::string& a_what, const Port& b,
                const std::string& b_what) {
    report(at, msg);
    report(a.span, a_what + " declared here: " + a.poset.to_string(), Severity::note);
    report(b.span, b_what + " declared here: " + b.poset.to_string(), Severity::note);
    throw ElabFailure{};
  }

  Typed term(const TermExpr& t) {
    switch (t.kind) {
      case TermExpr::Kind::atom: {
        auto it = atoms_.find(t.name);
        if (it == atoms_.end()) {
          if (failed_.count(t.name)) throw ElabFailure{};
          fail(t.span, posets_.count(t.name) ? "'" + t.name + "' is a poset, not a DP" : "unknown atom '" + t.name + "'");
        }
        return Typed{Term::atom(t.name), it->second.fun, it->second.res};
      }
      case TermExpr::Kind::series: {
        Typed a = term(t.children.at(0));
        Typed b = term(t.children.at(1));
        if (!(a.res.poset == b.fun.poset)) {
          mismatch(t.span,
                   "series interface mismatch: resources " + a.res.poset.to_string() + " of '" +
                       render_short(t.children[0]) + "' do not match functionality " + b.fun.poset.to_string() +
                       " of '" + render_short(t.children[1]) + "'",
                   a.res, "resource port", b.fun, "functionality port");
        }
        return Typed{Term::series(a.term, b.term), a.fun, b.res};
      }
      case TermExpr::Kind::par: {
        Typed a = term(t.children.at(0));
        Typed b = term(t.children.at(1));
        return Typed{Term::par(a.term, b.term), join(a.fun, b.fun, t.span), join(a.res, b.res, t.span)};
      }
      case TermExpr::Kind::loop: {
        Typed body = term(t.children.at(0));
        const Poset& f = body.fun.poset;
        if (f.kind() != PosetKind::product || f.arity() != 2) {
          fail(t.span, "loop body needs functionality (F1, R) with R its resource space, got " + f.to_string());
        }
        if (!(f.part(1) == body.res.poset)) {
          Port fb{f.part(1), {}, body.fun.span};
          mismatch(t.span,
                   "loop feedback mismatch: resources " + body.res.poset.to_string() +
                       " do not match the fed-back functionality " + f.part(1).to_string(),
                   body.res, "resource port", fb, "feedback port");
        }
        Port f1{f.part(0), {}, body.fun.span};
        const std::size_t n1 = leaves(f.part(0)).size();
        for (std::size_t i = 0; i < n1 && i < body.fun.axes.size(); ++i) f1.axes.push_back(body.fun.axes[i]);
        return Typed{Term::loop(body.term), f1, body.res};
      }
    }
    fail(t.span, "bad term");
  }

  static Port join(const Port& a, const Port& b, const SourceSpan& sp) {
    Port p{product(a.poset, b.poset), a.axes, sp};
    p.axes.insert(p.axes.end(), b.axes.begin(), b.axes.end());
    return p;
  }

  static std::string render_short(const TermExpr& t) {
    switch (t.kind) {
      case TermExpr::Kind::atom: return t.name;
      case TermExpr::Kind::series: return "series(...)";
      case TermExpr::Kind::par: return "par(...)";
      case TermExpr::Kind::loop: return "loop(...)";
    }
    return {};
  }

  const ElaborateOptions& opts_;
  std::vector<Diagnostic>& diags_;
  std::map<std::string, Poset> posets_;
  UncertainValuation valuation_;
  std::map<std::string, AtomInfo, std::less<>> atoms_;
  std::set<std::string> plain_;
  std::set<std::string> failed_;
};

}  // namespace detail

// Resolves names, builds every DP and uncertain DP, and type-checks the term.
// On success the model's term composes without further interface errors.
inline ElaborateResult elaborate(const ModelDocument& doc, const ElaborateOptions& opts = {}) {
  ElaborateResult r;
  detail::Elaborator el(opts, r.diagnostics);
  r.model = el.run(doc);
  return r;
}

// Spot-checks monotonicity of both bounds of every atom and lower ⪯ upper on
// a small sample grid of its functionality space.
inline std::vector<Diagnostic> check_model(const Model& m, std::size_t per_axis = 8) {
  std::vector<Diagnostic> out;
  for (const auto& [name, u] : m.valuation) {
    const SourceSpan sp = m.atoms.at(name).span;
    auto samples = sample_points(u.funsp(), per_axis, 512);
    try {
      for (const auto* side : {&u.lower, &u.upper}) {
        if (auto v = check_monotone(*side, samples)) {
          out.push_back({Severity::error, sp,
                         "'" + name + "' is not monotone: " + format_element(u.funsp(), v->lower) + " <= " +
                             format_element(u.funsp(), v->upper) + " but the resources do not follow"});
        }
      }
      if (!dp_leq_check(u.lower, u.upper, samples)) {
        out.push_back({Severity::error, sp, "'" + name + "': lower bound does not precede upper bound"});
      }
    } catch (const Error& e) {
      out.push_back({Severity::error, sp, "'" + name + "': " + e.what()});
    }
  }
  return out;
}

}  // namespace mcdp::lang
