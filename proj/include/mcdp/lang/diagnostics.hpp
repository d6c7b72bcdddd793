#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mcdp::lang {

// Location of a syntax node: 1-based line/column of its first byte plus the
// half-open byte range [begin, end) in the source.
struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t begin = 0;
  std::size_t end = 0;

  // Spans are metadata: two trees that differ only in layout compare equal.
  friend bool operator==(const SourceSpan&, const SourceSpan&) { return true; }

  static SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
    SourceSpan s = a;
    s.end = b.end > a.end ? b.end : a.end;
    return s;
  }
};

enum class Severity { error, warning, note };

inline const char* to_string(Severity s) {
  switch (s) {
    case Severity::error: return "error";
    case Severity::warning: return "warning";
    case Severity::note: return "note";
  }
  return "error";
}

struct Diagnostic {
  Severity severity = Severity::error;
  SourceSpan span;
  std::string message;
};

// file:line:col: severity: message
inline std::string format(const std::string& file, const Diagnostic& d) {
  return file + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": " +
         to_string(d.severity) + ": " + d.message;
}

inline bool has_errors(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    if (d.severity == Severity::error) return true;
  return false;
}

}  // namespace mcdp::lang
