#pragma once

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mcdp/lang/elaborate.hpp"
#include "mcdp/lang/parser.hpp"
#include "mcdp/lang/printer.hpp"
#include "mcdp/relaxations.hpp"
#include "mcdp/render.hpp"
#include "mcdp/uncertainty.hpp"

namespace mcdp::cli {

enum ExitCode : int {
  kExitFeasible = 0,
  kExitError = 1,
  kExitInfeasible = 2,
  kExitIndeterminate = 3,
  kExitNotConverged = 4,
};

struct CommandResult {
  int exit_code = kExitFeasible;
  std::string out;
  std::string err;
};

struct QuerySpec {
  std::string model_path;
  std::vector<std::string> assignments;  // axis=value[unit]
  std::optional<std::size_t> max_iter;
  std::string format = "json";
  std::optional<std::string> axis;  // sweep axis
  std::string from = "0";
  std::string to = "0";
  std::size_t steps = 1;
  std::vector<std::string> tolerances;  // atom[/axis]=a1,a2,...
  std::vector<std::size_t> relax_n;
};

namespace detail {

struct Failure {
  std::string message;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{"cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline double parse_double(const std::string& s, const std::string& what) {
  if (s == "inf") return kInfinity;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || std::isnan(v)) throw Failure{"bad " + what + " '" + s + "'"};
  return v;
}

inline std::size_t parse_count(const std::string& s, const std::string& what) {
  const double v = parse_double(s, what);
  if (!(v >= 1.0) || v != std::floor(v) || std::isinf(v)) throw Failure{what + " must be a positive integer, got '" + s + "'"};
  return static_cast<std::size_t>(v);
}

// Splits "value[unit]" into its parts.
inline std::pair<std::string, std::optional<std::string>> split_unit(const std::string& s) {
  auto open = s.find('[');
  if (open == std::string::npos) return {s, std::nullopt};
  if (s.back() != ']') throw Failure{"unterminated unit in '" + s + "'"};
  return {s.substr(0, open), s.substr(open + 1, s.size() - open - 2)};
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::size_t find_axis(const std::vector<lang::AxisInfo>& axes, const std::string& name, const std::string& where) {
  std::optional<std::size_t> hit;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i].name == name) {
      if (hit) throw Failure{"axis name '" + name + "' is ambiguous in " + where + "; use its index"};
      hit = i;
    }
  }
  if (hit) return *hit;
  char* end = nullptr;
  const unsigned long k = std::strtoul(name.c_str(), &end, 10);
  if (!name.empty() && end == name.c_str() + name.size() && k < axes.size()) return k;
  std::string known;
  for (std::size_t i = 0; i < axes.size(); ++i) known += (i ? ", " : "") + axes[i].name;
  throw Failure{"no axis '" + name + "' in " + where + " (axes: " + known + ")"};
}

inline Element leaf_value(const lang::AxisInfo& axis, const std::string& text) {
  auto [value, unit] = split_unit(text);
  if (axis.poset.kind() == PosetKind::real) {
    if (unit && *unit != axis.poset.unit()) {
      throw Failure{"unit mismatch on axis '" + axis.name + "': expected [" + axis.poset.unit() + "], got [" + *unit + "]"};
    }
    const double v = parse_double(value, "value for axis '" + axis.name + "'");
    if (v < 0) throw Failure{"axis '" + axis.name + "' needs a value >= 0, got " + value};
    return Element::real(v);
  }
  if (unit) throw Failure{"axis '" + axis.name + "' is not a real axis and takes no unit"};
  auto idx = axis.poset.index_of(value);
  if (!idx) throw Failure{"'" + value + "' is not an element of " + axis.poset.to_string()};
  return Element::finite(*idx);
}

// Builds the functionality query from axis=value assignments. Every leaf
// needs a value, except one-element finite leaves and the swept axis.
inline std::vector<std::optional<Element>> assign(const lang::Model& m, const std::vector<std::string>& assignments) {
  const auto& axes = m.fun.axes;
  std::vector<std::optional<Element>> vals(axes.size());
  for (const auto& a : assignments) {
    auto eq = a.find('=');
    std::size_t k;
    std::string text;
    if (eq == std::string::npos) {
      if (axes.size() != 1) throw Failure{"'" + a + "' does not name an axis; write axis=value[unit]"};
      k = 0;
      text = a;
    } else {
      k = find_axis(axes, a.substr(0, eq), "the model's functionality");
      text = a.substr(eq + 1);
    }
    if (vals[k]) throw Failure{"axis '" + axes[k].name + "' is assigned twice"};
    vals[k] = leaf_value(axes[k], text);
  }
  return vals;
}

inline Element complete(const lang::Model& m, std::vector<std::optional<Element>> vals) {
  const auto& axes = m.fun.axes;
  auto lv = leaves(m.funsp());
  if (lv.size() == 1 && lv[0].kind() == PosetKind::finite && lv[0].size() == 1 && axes.empty()) {
    return bottom(m.funsp());
  }
  std::vector<Element> flat;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (vals[i]) {
      flat.push_back(*vals[i]);
    } else if (axes[i].poset.kind() == PosetKind::finite && axes[i].poset.size() == 1) {
      flat.push_back(Element::finite(0));
    } else {
      throw Failure{"missing value for functionality axis '" + axes[i].name + "'"};
    }
  }
  return unflatten(m.funsp(), flat);
}

struct Tolerance {
  std::string label;
  std::string atom;
  std::optional<std::size_t> axis;
  std::vector<double> alphas;
};

inline Tolerance parse_tolerance(const lang::Model& m, const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos) throw Failure{"tolerance '" + spec + "' needs the form atom[/axis]=a1,a2,..."};
  Tolerance t;
  t.label = spec.substr(0, eq);
  auto slash = t.label.find('/');
  t.atom = t.label.substr(0, slash);
  auto it = m.atoms.find(t.atom);
  if (it == m.atoms.end()) throw Failure{"tolerance: the term has no atom '" + t.atom + "'"};
  if (slash != std::string::npos) t.axis = find_axis(it->second.fun.axes, t.label.substr(slash + 1), "atom '" + t.atom + "'");
  for (const auto& a : split(spec.substr(eq + 1), ',')) {
    const double v = parse_double(a, "tolerance");
    if (!(v > 0.0) || std::isinf(v)) throw Failure{"tolerance must be positive and finite, got '" + a + "'"};
    t.alphas.push_back(v);
  }
  return t;
}

inline std::size_t resolve_max_iter(const std::optional<std::size_t>& flag) {
  if (flag) {
    if (*flag == 0) throw Failure{"--max-iter must be positive"};
    return *flag;
  }
  if (const char* env = std::getenv("MCDP_MAX_ITER"); env && *env) return parse_count(env, "MCDP_MAX_ITER");
  return kDefaultMaxIter;
}

struct Loaded {
  std::string file;
  lang::ModelDocument doc;
};

inline void print_diagnostics(const std::string& file, const std::vector<lang::Diagnostic>& ds, CommandResult& r) {
  for (const auto& d : ds) r.err += lang::format(file, d) + "\n";
}

inline std::optional<Loaded> load(const std::string& path, CommandResult& r) {
  const std::string text = read_file(path);
  auto pr = lang::parse(text);
  print_diagnostics(path, pr.diagnostics, r);
  if (!pr.ok()) return std::nullopt;
  return Loaded{path, std::move(pr.document)};
}

inline std::optional<lang::Model> build(const Loaded& l, std::optional<std::size_t> relax_n, CommandResult& r) {
  auto er = lang::elaborate(l.doc, lang::ElaborateOptions{relax_n});
  print_diagnostics(l.file, er.diagnostics, r);
  if (!er.ok()) return std::nullopt;
  return std::move(er.model);
}

inline UncertainValuation apply(const lang::Model& m, const std::vector<Tolerance>& tols, std::size_t k) {
  UncertainValuation uval = m.valuation;
  for (const auto& t : tols) {
    uval = inject_tolerance(std::move(uval), t.atom, t.alphas[std::min(k, t.alphas.size() - 1)], t.axis);
  }
  return uval;
}

inline std::size_t tolerance_rows(const std::vector<Tolerance>& tols) {
  std::size_t n = 1;
  for (const auto& t : tols) {
    if (t.alphas.size() == 1) continue;
    if (n != 1 && t.alphas.size() != n) throw Failure{"tolerance lists must have equal lengths (or a single value)"};
    n = t.alphas.size();
  }
  return n;
}

inline int verdict_exit(const UncertainReport& rep) {
  if (!rep.converged()) return kExitNotConverged;
  switch (rep.verdict) {
    case Verdict::feasible: return kExitFeasible;
    case Verdict::infeasible: return kExitInfeasible;
    case Verdict::indeterminate: return kExitIndeterminate;
  }
  return kExitError;
}

inline const char* status_of(const UncertainReport& rep) { return rep.converged() ? "ok" : "not-converged"; }

inline void require_format(const std::string& f) {
  if (f != "json" && f != "csv") throw Failure{"unknown format '" + f + "' (json or csv)"};
}

template <class Fn>
CommandResult guarded(Fn&& fn) {
  CommandResult r;
  try {
    fn(r);
  } catch (const Failure& f) {
    r.err += "error: " + f.message + "\n";
    r.exit_code = kExitError;
    r.out.clear();
  } catch (const Error& e) {
    r.err += std::string("error: ") + e.what() + "\n";
    r.exit_code = kExitError;
    r.out.clear();
  }
  return r;
}

}  // namespace detail

// Parses, elaborates and spot-checks a model. Exit 0 iff there are no errors.
inline CommandResult run_check(const std::string& path) {
  return detail::guarded([&](CommandResult& r) {
    auto loaded = detail::load(path, r);
    if (!loaded) {
      r.exit_code = kExitError;
      return;
    }
    auto model = detail::build(*loaded, std::nullopt, r);
    if (!model) {
      r.exit_code = kExitError;
      return;
    }
    auto issues = lang::check_model(*model);
    detail::print_diagnostics(path, issues, r);
    if (lang::has_errors(issues)) {
      r.exit_code = kExitError;
      return;
    }
    r.out += path + ": ok: " + std::to_string(model->atoms.size()) + " atoms, " + model->funsp().to_string() + " -> " +
             model->ressp().to_string() + "\n";
  });
}

// Prints the canonical rendering of a model.
inline CommandResult run_format(const std::string& path) {
  return detail::guarded([&](CommandResult& r) {
    auto loaded = detail::load(path, r);
    if (!loaded) {
      r.exit_code = kExitError;
      return;
    }
    r.out = lang::render(loaded->doc);
  });
}

inline CommandResult run_solve(const QuerySpec& q) {
  return detail::guarded([&](CommandResult& r) {
    detail::require_format(q.format);
    const std::size_t max_iter = detail::resolve_max_iter(q.max_iter);
    if (q.relax_n.size() > 1) throw detail::Failure{"solve takes one --relax-n value; use sweep for a list"};
    auto loaded = detail::load(q.model_path, r);
    if (!loaded) {
      r.exit_code = kExitError;
      return;
    }
    std::optional<std::size_t> n;
    if (!q.relax_n.empty()) n = q.relax_n[0];
    auto model = detail::build(*loaded, n, r);
    if (!model) {
      r.exit_code = kExitError;
      return;
    }
    std::vector<detail::Tolerance> tols;
    for (const auto& t : q.tolerances) {
      tols.push_back(detail::parse_tolerance(*model, t));
      if (tols.back().alphas.size() != 1) throw detail::Failure{"solve takes one tolerance value per atom; use sweep for a list"};
    }
    const Element f = detail::complete(*model, detail::assign(*model, q.assignments));
    auto udp = compose_uncertain(model->term, detail::apply(*model, tols, 0), max_iter);
    auto rep = solve_uncertain(udp, f, max_iter);
    r.exit_code = detail::verdict_exit(rep);
    if (q.format == "json") {
      auto j = render::uncertain_json(model->funsp(), rep);
      j["status"] = detail::status_of(rep);
      r.out = j.dump(2) + "\n";
    } else {
      r.out = render::csv_row({"query", "lower", "upper", "verdict", "iterations_lower", "iterations_upper", "status"});
      r.out += render::csv_row({render::element_csv(model->funsp(), f), render::antichain_csv(rep.lower.result),
                                render::antichain_csv(rep.upper.result), to_string(rep.verdict),
                                std::to_string(rep.lower.iterations), std::to_string(rep.upper.iterations),
                                detail::status_of(rep)});
    }
    if (!rep.converged()) r.err += "warning: iteration cap " + std::to_string(max_iter) + " reached; results are partial\n";
  });
}

// One row per (relax-n, tolerance, grid point), in that nesting order.
inline CommandResult run_sweep(const QuerySpec& q) {
  return detail::guarded([&](CommandResult& r) {
    detail::require_format(q.format);
    const std::size_t max_iter = detail::resolve_max_iter(q.max_iter);
    if (q.steps < 1) throw detail::Failure{"--steps must be >= 1"};
    auto loaded = detail::load(q.model_path, r);
    if (!loaded) {
      r.exit_code = kExitError;
      return;
    }
    std::vector<std::optional<std::size_t>> ns;
    for (auto n : q.relax_n) ns.push_back(n);
    if (ns.empty()) ns.push_back(std::nullopt);

    render::Json rows = render::Json::array();
    std::string csv;
    bool header_done = false;
    bool any_error = false, any_partial = false;

    for (const auto& n : ns) {
      auto model = detail::build(*loaded, n, r);
      if (!model) {
        r.exit_code = kExitError;
        r.out.clear();
        return;
      }
      std::vector<detail::Tolerance> tols;
      for (const auto& t : q.tolerances) tols.push_back(detail::parse_tolerance(*model, t));
      const std::size_t tol_rows = detail::tolerance_rows(tols);

      auto base = detail::assign(*model, q.assignments);
      std::optional<std::size_t> axis;
      std::vector<Element> grid;
      if (q.axis) {
        axis = detail::find_axis(model->fun.axes, *q.axis, "the model's functionality");
        const auto& info = model->fun.axes[*axis];
        if (info.poset.kind() != PosetKind::real) throw detail::Failure{"sweep axis '" + *q.axis + "' is not a real axis"};
        if (base[*axis]) throw detail::Failure{"sweep axis '" + *q.axis + "' is also assigned with --f"};
        const double a = detail::leaf_value(info, q.from).as_real();
        const double b = detail::leaf_value(info, q.to).as_real();
        if (!(a <= b) || std::isinf(b)) throw detail::Failure{"sweep range needs finite --from <= --to"};
        for (std::size_t i = 0; i < q.steps; ++i) {
          const double t = q.steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(q.steps - 1);
          grid.push_back(Element::real(i + 1 == q.steps && q.steps > 1 ? b : a + (b - a) * t));
        }
      } else {
        grid.push_back(Element::real(0));  // single row; the value is not used
      }

      if (!header_done) {
        std::vector<std::string> h;
        if (!q.relax_n.empty()) h.push_back("n");
        for (const auto& t : tols) h.push_back("alpha:" + t.label);
        if (axis) h.push_back(model->fun.axes[*axis].name + "[" + model->fun.axes[*axis].poset.unit() + "]");
        for (const char* c : {"query", "lower", "upper", "verdict", "iterations_lower", "iterations_upper", "status"}) h.push_back(c);
        csv += render::csv_row(h);
        header_done = true;
      }

      for (std::size_t k = 0; k < tol_rows; ++k) {
        std::optional<UncertainDP> udp;
        std::string config_error;
        try {
          udp = compose_uncertain(model->term, detail::apply(*model, tols, k), max_iter);
        } catch (const Error& e) {
          config_error = e.what();
        }
        for (const auto& g : grid) {
          std::vector<std::string> cells;
          render::Json row;
          if (n) {
            cells.push_back(std::to_string(*n));
            row["n"] = *n;
          }
          if (!tols.empty()) {
            render::Json tj = render::Json::object();
            for (const auto& t : tols) {
              const double a = t.alphas[std::min(k, t.alphas.size() - 1)];
              cells.push_back(Element::format_double(a));
              tj[t.label] = a;
            }
            row["tolerance"] = tj;
          }
          if (axis) cells.push_back(Element::format_double(g.as_real()));
          std::optional<Element> f;
          std::string error = config_error;
          if (error.empty()) {
            auto vals = base;
            if (axis) vals[*axis] = g;
            f = detail::complete(*model, vals);
          }
          std::optional<UncertainReport> rep;
          if (error.empty()) {
            try {
              rep = solve_uncertain(*udp, *f, max_iter);
            } catch (const Error& e) {
              error = e.what();
            }
          }
          if (rep) {
            const std::string status = detail::status_of(*rep);
            any_partial = any_partial || !rep->converged();
            cells.insert(cells.end(), {render::element_csv(model->funsp(), *f), render::antichain_csv(rep->lower.result),
                                       render::antichain_csv(rep->upper.result), to_string(rep->verdict),
                                       std::to_string(rep->lower.iterations), std::to_string(rep->upper.iterations), status});
            auto j = render::uncertain_json(model->funsp(), *rep);
            for (auto& [key, v] : j.items()) row[key] = v;
            row["status"] = status;
          } else {
            any_error = true;
            const std::string status = "error: " + error;
            cells.insert(cells.end(), {f ? render::element_csv(model->funsp(), *f) : "", "", "", "", "", "", status});
            if (f) row["query"] = render::element_json(model->funsp(), *f);
            row["status"] = status;
          }
          csv += render::csv_row(cells);
          rows.push_back(std::move(row));
        }
      }
    }
    if (q.format == "json") {
      r.out = render::Json{{"rows", rows}}.dump(2) + "\n";
    } else {
      r.out = csv;
    }
    r.exit_code = any_partial ? kExitNotConverged : any_error ? kExitError : kExitFeasible;
    if (any_partial) r.err += "warning: iteration cap " + std::to_string(max_iter) + " reached on some rows; results are partial\n";
    if (any_error) r.err += "warning: some rows failed; see their status\n";
  });
}

}  // namespace mcdp::cli
