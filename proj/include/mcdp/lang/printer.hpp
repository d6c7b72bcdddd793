#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mcdp/element.hpp"
#include "mcdp/lang/ast.hpp"

namespace mcdp::lang {

namespace detail {

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\t') {
      out += "\\t";
    } else {
      out += c;
    }
  }
  return out + "\"";
}

inline std::string render_number(const Number& n) {
  if (!n.text.empty()) return n.text;
  if (n.value < 0) return "-" + Element::format_double(-n.value);
  return Element::format_double(n.value);
}

inline std::string join_numbers(const std::vector<Number>& xs, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? sep : "") + render_number(xs[i]);
  return s;
}

inline std::string render_point(const PointExpr& p) {
  if (auto* n = std::get_if<Number>(&p.value)) return render_number(*n);
  if (auto* l = std::get_if<PointExpr::Label>(&p.value)) return l->name;
  const auto& parts = std::get<std::vector<PointExpr>>(p.value);
  std::string s = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? ", " : "") + render_point(parts[i]);
  return s + ")";
}

inline std::string render_axes(const std::vector<AxisExpr>& axes);

inline std::string render_axis(const AxisExpr& a) {
  switch (a.kind) {
    case AxisExpr::Kind::real: return a.name + "[" + a.unit + "]";
    case AxisExpr::Kind::poset_ref: return a.name.empty() ? a.poset : a.name + ": " + a.poset;
    case AxisExpr::Kind::group: return "(" + render_axes(a.group) + ")";
  }
  return {};
}

inline std::string render_axes(const std::vector<AxisExpr>& axes) {
  std::string s;
  for (std::size_t i = 0; i < axes.size(); ++i) s += (i ? ", " : "") + render_axis(axes[i]);
  return s;
}

inline std::string render_sig(const Signature& sig) {
  std::string s;
  if (!sig.fun.empty()) s += "F(" + render_axes(sig.fun) + ") ";
  return s + "R(" + render_axes(sig.res) + ")";
}

inline std::string render_poset(const PosetDecl& d) {
  std::string s = "poset " + d.name + " = ";
  auto list = [](const std::vector<std::string>& xs) {
    std::string t;
    for (std::size_t i = 0; i < xs.size(); ++i) t += (i ? ", " : "") + xs[i];
    return t;
  };
  switch (d.kind) {
    case PosetDecl::Kind::real: return s + "R+[" + d.unit + "]";
    case PosetDecl::Kind::chain: return s + "chain {" + list(d.labels) + "}";
    case PosetDecl::Kind::finite: {
      s += "finite {" + list(d.labels) + "} order {";
      for (std::size_t i = 0; i < d.order.size(); ++i) {
        s += (i ? ", " : "") + d.order[i].first + " < " + d.order[i].second;
      }
      return s + "}";
    }
    case PosetDecl::Kind::product: return s + "product(" + list(d.parts) + ")";
  }
  return s;
}

inline const char* builtin_name(DpExpr::Kind k) {
  switch (k) {
    case DpExpr::Kind::constant: return "constant";
    case DpExpr::Kind::affine: return "affine";
    case DpExpr::Kind::catalogue: return "catalogue";
    case DpExpr::Kind::specific: return "specific";
    case DpExpr::Kind::identity: return "identity";
    case DpExpr::Kind::bottom: return "bottom";
    case DpExpr::Kind::top: return "top";
    case DpExpr::Kind::mult: return "mult";
    case DpExpr::Kind::uid: return "uid";
    case DpExpr::Kind::invplus_uniform: return "invplus_uniform";
    case DpExpr::Kind::invplus_vdc: return "invplus_vdc";
    case DpExpr::Kind::invtimes_vdc: return "invtimes_vdc";
  }
  return "?";
}

inline std::string render_dp(const DpExpr& e) {
  std::string s = builtin_name(e.kind);
  switch (e.kind) {
    case DpExpr::Kind::constant: {
      s += " " + render_sig(*e.sig) + " {";
      for (std::size_t i = 0; i < e.points.size(); ++i) s += (i ? ", " : "") + render_point(e.points[i]);
      return s + "}";
    }
    case DpExpr::Kind::affine: {
      s += " " + render_sig(*e.sig) + "\n   ";
      if (e.gain_is_matrix) {
        s += " [";
        for (std::size_t i = 0; i < e.gain.size(); ++i) s += std::string(i ? ", " : "") + "[" + join_numbers(e.gain[i], ", ") + "]";
        s += "]";
      } else {
        s += " " + render_number(e.gain.at(0).at(0));
      }
      s += e.offset_is_vector ? " [" + join_numbers(e.offset, ", ") + "]" : " " + render_number(e.offset.at(0));
      if (e.limit) s += " limit " + render_point(*e.limit);
      return s;
    }
    case DpExpr::Kind::catalogue: {
      s += " " + render_sig(*e.sig) + " {\n";
      for (const auto& en : e.entries) s += "  " + render_point(en.fun) + " -> " + render_point(en.res) + ",\n";
      return s + "}";
    }
    case DpExpr::Kind::specific: {
      s += " " + render_sig(*e.sig);
      if (!e.scale.empty()) s += " scale (" + join_numbers(e.scale, ", ") + ")";
      s += " {\n";
      for (const auto& t : e.technologies) {
        s += "  " + t.name + ": (";
        for (std::size_t i = 0; i < t.figures.size(); ++i) s += (i ? ", " : "") + join_numbers(t.figures[i], "*");
        s += "),\n";
      }
      return s + "}";
    }
    case DpExpr::Kind::identity:
    case DpExpr::Kind::bottom:
    case DpExpr::Kind::top:
    case DpExpr::Kind::mult: return s + " " + render_sig(*e.sig);
    case DpExpr::Kind::uid: return s + "(" + render_number(e.args.at(0)) + " [" + e.unit + "])";
    case DpExpr::Kind::invplus_uniform:
    case DpExpr::Kind::invplus_vdc:
    case DpExpr::Kind::invtimes_vdc: {
      s += "(" + join_numbers(e.args, ", ") + ")";
      if (e.sig) s += " " + render_sig(*e.sig);
      return s;
    }
  }
  return s;
}

inline std::string render_uncertain(const UncertainDecl& d) {
  std::string s = "uncertain " + d.name + " = ";
  if (d.kind == UncertainDecl::Kind::pm) return s + "pm(" + d.target + ", " + render_number(d.percent) + "%)";
  return s + "interval(" + d.lower + ", " + d.upper + ")";
}

}  // namespace detail

inline std::string render_term(const TermExpr& t) {
  switch (t.kind) {
    case TermExpr::Kind::atom: return t.name;
    case TermExpr::Kind::series: return "series(" + render_term(t.children.at(0)) + ", " + render_term(t.children.at(1)) + ")";
    case TermExpr::Kind::par: return "par(" + render_term(t.children.at(0)) + ", " + render_term(t.children.at(1)) + ")";
    case TermExpr::Kind::loop: return "loop(" + render_term(t.children.at(0)) + ")";
  }
  return {};
}

// Canonical text of a document. parse(render(d)) == d for any parsed d.
inline std::string render(const ModelDocument& doc) {
  std::string out;
  if (doc.name) out += "name " + detail::quote(*doc.name) + "\n";
  if (doc.description) out += "description " + detail::quote(*doc.description) + "\n";
  if (!out.empty()) out += "\n";
  for (const auto& st : doc.statements) {
    if (auto* p = std::get_if<PosetDecl>(&st)) {
      out += detail::render_poset(*p) + "\n";
    } else if (auto* d = std::get_if<DpDecl>(&st)) {
      out += "dp " + d->name + " = " + detail::render_dp(d->expr) + "\n";
    } else {
      out += detail::render_uncertain(std::get<UncertainDecl>(st)) + "\n";
    }
  }
  if (doc.term) out += "\nterm " + render_term(*doc.term) + "\n";
  return out;
}

}  // namespace mcdp::lang
