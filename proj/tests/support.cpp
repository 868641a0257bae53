#include "support.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace itml::test {

namespace {

bool coin(double p, std::mt19937_64& rng) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

std::string program_path(const std::string& name) { return std::string(ITML_PROGRAMS_DIR) + "/" + name; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Loaded load_source(std::string source) {
  Loaded l;
  l.surface = parse_program(std::move(source));
  l.elaboration = elaborate(l.surface);
  l.run = eval_comp(Env{}, Store{}, l.elaboration.program);
  return l;
}

Loaded load_program(const std::string& name) { return load_source(read_text(program_path(name))); }

std::string collapse_space(std::string_view s) {
  std::string out;
  bool gap = false;
  for (char c : s) {
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
      gap = true;
      continue;
    }
    if (gap && !out.empty()) out += ' ';
    gap = false;
    out += c;
  }
  return out;
}

std::vector<std::string> shaded_texts(const Loaded& l, const std::string& criterion) {
  Criterion c = parse_criterion(criterion, l.run);
  BackwardSlice s = bwd_comp(c, l.run);
  std::vector<std::string> out;
  const std::string& src = l.surface.source;
  for (const ShadedRange& r : shaded_ranges(l.elaboration, *s.program, src)) {
    out.push_back(collapse_space(std::string_view(src).substr(r.begin, r.end - r.begin)));
  }
  return out;
}

ExprP random_prefix(const ExprP& e, double p, std::mt19937_64& rng) {
  if (e->is_hole() || coin(p, rng)) return Expr::hole();
  auto c = std::make_shared<Expr>(*e);
  if (c->e1) c->e1 = random_prefix(c->e1, p, rng);
  if (c->e2) c->e2 = random_prefix(c->e2, p, rng);
  if (c->body) c->body = random_prefix(c->body, p, rng);
  return c;
}

CompP random_prefix(const CompP& m, double p, std::mt19937_64& rng) {
  if (m->is_hole() || coin(p, rng)) return Comp::hole();
  auto c = std::make_shared<Comp>(*m);
  if (c->e1) c->e1 = random_prefix(c->e1, p, rng);
  if (c->e2) c->e2 = random_prefix(c->e2, p, rng);
  if (c->e3) c->e3 = random_prefix(c->e3, p, rng);
  if (c->m1) c->m1 = random_prefix(c->m1, p, rng);
  if (c->m2) c->m2 = random_prefix(c->m2, p, rng);
  return c;
}

TraceP random_prefix(const TraceP& t, double p, std::mt19937_64& rng) {
  if (t->is_hole()) return t;
  if (coin(p, rng)) return Trace::hole(t->writes, t->outcome);
  auto c = clone_node(*t);
  if (c->e1) c->e1 = random_prefix(c->e1, p, rng);
  if (c->e2) c->e2 = random_prefix(c->e2, p, rng);
  if (c->e3) c->e3 = random_prefix(c->e3, p, rng);
  if (c->t1) c->t1 = random_prefix(c->t1, p, rng);
  if (c->t2) c->t2 = random_prefix(c->t2, p, rng);
  return c;
}

ValueP random_prefix(const ValueP& v, double p, std::mt19937_64& rng) {
  if (v->is_hole() || coin(p, rng)) return Value::hole();
  switch (v->kind) {
    case Value::Kind::Pair: return Value::pair(random_prefix(v->v1, p, rng), random_prefix(v->v2, p, rng));
    case Value::Kind::Inl: return Value::inl(random_prefix(v->v1, p, rng));
    case Value::Kind::Inr: return Value::inr(random_prefix(v->v1, p, rng));
    default: return v;
  }
}

Store random_prefix(const Store& s, double p, std::mt19937_64& rng) {
  Store out;
  for (const auto& [cell, v] : s.entries()) out.set(cell, random_prefix(v, p, rng));
  return out;
}

Criterion random_criterion(const RunRecord& r, double p, std::mt19937_64& rng) {
  Criterion c;
  c.result = Result{r.result.outcome, random_prefix(r.result.value, p, rng)};
  c.store = random_prefix(r.final_store, p, rng);
  return c;
}

}  // namespace itml::test
