#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "mcdp/antichain.hpp"
#include "mcdp/dp.hpp"
#include "mcdp/uncertainty.hpp"

namespace mcdp::render {

using Json = nlohmann::ordered_json;

inline Json real_value(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

// Reals become {"value", "unit"}, finite elements their label, tuples arrays.
inline Json element_json(const Poset& p, const Element& e) {
  switch (p.kind()) {
    case PosetKind::real: return Json{{"value", real_value(e.as_real())}, {"unit", p.unit()}};
    case PosetKind::finite: return p.labels().at(e.as_finite());
    case PosetKind::product: {
      Json arr = Json::array();
      for (std::size_t i = 0; i < p.arity(); ++i) arr.push_back(element_json(p.part(i), e[i]));
      return arr;
    }
  }
  return nullptr;
}

inline Json antichain_json(const Antichain& a) {
  Json arr = Json::array();
  for (const auto& e : a) arr.push_back(element_json(a.poset(), e));
  return arr;
}

inline Json report_json(const SolveReport& r) {
  Json j{{"feasible", r.feasible()},
         {"antichain", antichain_json(r.result)},
         {"iterations", r.iterations},
         {"converged", r.converged}};
  // A loop stopped at the cap leaves an iterate below the fixed point.
  if (!r.converged) j["partial"] = true;
  return j;
}

inline Json uncertain_json(const Poset& funsp, const UncertainReport& r) {
  return Json{{"query", element_json(funsp, r.query)},
              {"lower", report_json(r.lower)},
              {"upper", report_json(r.upper)},
              {"verdict", to_string(r.verdict)}};
}

// ---- CSV

inline std::string element_csv(const Poset& p, const Element& e) {
  switch (p.kind()) {
    case PosetKind::real: return Element::format_double(e.as_real());
    case PosetKind::finite: return p.labels().at(e.as_finite());
    case PosetKind::product: {
      std::string s = "(";
      for (std::size_t i = 0; i < p.arity(); ++i) s += (i ? "," : "") + element_csv(p.part(i), e[i]);
      return s + ")";
    }
  }
  return {};
}

// Antichain cell: elements separated by ';', empty for the empty antichain.
inline std::string antichain_csv(const Antichain& a) {
  std::string s;
  bool first = true;
  for (const auto& e : a) {
    s += (first ? "" : ";") + element_csv(a.poset(), e);
    first = false;
  }
  return s;
}

inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",;\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_row(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + csv_cell(cells[i]);
  return s + "\n";
}

}  // namespace mcdp::render
