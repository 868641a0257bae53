// Shading of source text from a program slice.
//
// Every user-written core node carries the span of the surface construct it
// came from. A span is shaded when all core nodes carrying it are holes in
// the slice (a node below a hole counts as a hole). Each byte takes the
// status of the innermost span that contains it.

#include <algorithm>
#include <map>

#include "itml/frontend.hpp"

namespace itml {

namespace {

// Span -> "every node with this span is a hole in the slice".
using SpanStatus = std::map<SourceSpan, bool>;

void note(SpanStatus& out, const MaybeSpan& span, bool hole) {
  if (!span) return;
  auto [it, inserted] = out.emplace(*span, hole);
  if (!inserted) it->second = it->second && hole;
}

void walk(SpanStatus& out, const Comp& full, const Comp* slice);

void walk(SpanStatus& out, const Expr& full, const Expr* slice) {
  bool present = slice && !slice->is_hole() && slice->kind == full.kind;
  note(out, full.span, !present);
  if (full.e1) walk(out, *full.e1, present ? slice->e1.get() : nullptr);
  if (full.e2) walk(out, *full.e2, present ? slice->e2.get() : nullptr);
  if (full.body) walk(out, *full.body, present ? slice->body.get() : nullptr);
}

void walk(SpanStatus& out, const Comp& full, const Comp* slice) {
  bool present = slice && !slice->is_hole() && slice->kind == full.kind;
  note(out, full.span, !present);
  if (full.e1) walk(out, *full.e1, present ? slice->e1.get() : nullptr);
  if (full.e2) walk(out, *full.e2, present ? slice->e2.get() : nullptr);
  if (full.e3) walk(out, *full.e3, present ? slice->e3.get() : nullptr);
  if (full.m1) walk(out, *full.m1, present ? slice->m1.get() : nullptr);
  if (full.m2) walk(out, *full.m2, present ? slice->m2.get() : nullptr);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

}  // namespace

std::vector<ShadedRange> shaded_ranges(const Elaboration& full, const Comp& slice, std::string_view source) {
  SpanStatus status;
  walk(status, *full.program, &slice);

  // Sweep bytes left to right with a stack of open spans. The map is ordered
  // by (begin, end); reorder so that at equal begin the outer span opens
  // first.
  std::vector<std::pair<SourceSpan, bool>> spans(status.begin(), status.end());
  std::stable_sort(spans.begin(), spans.end(), [](const auto& a, const auto& b) {
    if (a.first.begin != b.first.begin) return a.first.begin < b.first.begin;
    return a.first.end > b.first.end;
  });
  std::vector<char> shaded(source.size(), 0);
  std::vector<std::pair<uint32_t, bool>> open;  // (end, hole)
  size_t next = 0;
  for (uint32_t c = 0; c < source.size(); ++c) {
    while (!open.empty() && open.back().first <= c) open.pop_back();
    while (next < spans.size() && spans[next].first.begin <= c) {
      const auto& [span, hole] = spans[next++];
      if (span.end > c) open.emplace_back(span.end, hole);
    }
    shaded[c] = !open.empty() && open.back().second;
  }

  std::vector<ShadedRange> out;
  uint32_t c = 0;
  while (c < source.size()) {
    if (!shaded[c]) {
      ++c;
      continue;
    }
    uint32_t b = c;
    while (c < source.size() && shaded[c]) ++c;
    uint32_t e = c;
    while (b < e && is_space(source[b])) ++b;
    while (e > b && is_space(source[e - 1])) --e;
    if (b < e) out.push_back(ShadedRange{b, e});
  }
  return out;
}

std::string apply_shading(std::string_view source, const std::vector<ShadedRange>& ranges, ShadeStyle style) {
  std::string_view open = style == ShadeStyle::Markers ? "⟦" : "\x1b[2;37m";
  std::string_view close = style == ShadeStyle::Markers ? "⟧" : "\x1b[0m";
  std::string out;
  out.reserve(source.size() + ranges.size() * 8);
  uint32_t at = 0;
  for (const ShadedRange& r : ranges) {
    out.append(source.substr(at, r.begin - at));
    out.append(open);
    out.append(source.substr(r.begin, r.end - r.begin));
    out.append(close);
    at = r.end;
  }
  out.append(source.substr(at));
  return out;
}

std::string render_slice(const Comp& slice, const Elaboration& full, std::string_view source, ShadeStyle style) {
  return apply_shading(source, shaded_ranges(full, slice, source), style);
}

}  // namespace itml
