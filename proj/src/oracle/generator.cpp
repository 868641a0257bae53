// Random generation of small, well-typed, terminating core programs.

#include <fmt/format.h>

#include <random>

#include "itml/oracle.hpp"

namespace itml {

namespace {

enum class Ty { Int, Bool, Ref, Arr };

struct Binding {
  std::string name;
  Ty type;
  int64_t length = 0;  // arrays only
};

class Generator {
 public:
  explicit Generator(uint64_t seed) : rng_(seed * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull) {}

  CompP program(int budget) {
    if (budget <= 0) return Comp::ret(Expr::unit());
    std::vector<std::pair<std::string, CompP>> lets;
    for (int k = 0; k < budget; ++k) lets.push_back(step());
    CompP body = final_return();
    for (auto it = lets.rbegin(); it != lets.rend(); ++it) body = Comp::let(it->first, it->second, body);
    return body;
  }

 private:
  int pick(int n) { return int(std::uniform_int_distribution<int>(0, n - 1)(rng_)); }
  bool chance(int percent) { return pick(100) < percent; }

  std::vector<const Binding*> of_type(Ty t) const {
    std::vector<const Binding*> out;
    for (const Binding& b : scope_) {
      if (b.type == t) out.push_back(&b);
    }
    return out;
  }

  std::string fresh() { return fmt::format("v{}", counter_++); }

  ExprP int_atom() {
    auto ints = of_type(Ty::Int);
    if (!ints.empty() && chance(50)) return Expr::var(ints[size_t(pick(int(ints.size())))]->name);
    return Expr::integer(pick(4));
  }

  ExprP bool_atom() {
    auto bools = of_type(Ty::Bool);
    if (!bools.empty() && chance(50)) return Expr::var(bools[size_t(pick(int(bools.size())))]->name);
    if (chance(50)) return Expr::prim(PrimOp::Lt, int_atom(), int_atom());
    return Expr::boolean(chance(50));
  }

  ExprP int_expr() {
    if (chance(60)) return int_atom();
    static const PrimOp ops[] = {PrimOp::Add, PrimOp::Sub, PrimOp::Mul};
    return Expr::prim(ops[pick(3)], int_atom(), int_atom());
  }

  // One let-bound step: the binder name and the computation it binds.
  std::pair<std::string, CompP> step() {
    auto refs = of_type(Ty::Ref);
    auto arrs = of_type(Ty::Arr);
    for (;;) {
      switch (pick(14)) {
        case 0: return bind(Ty::Int, Comp::ret(int_expr()));
        case 1: return bind(Ty::Bool, Comp::ret(bool_atom()));
        case 2:
        case 3: return bind(Ty::Ref, Comp::ref(int_atom()));
        case 4:
          if (refs.empty()) continue;
          return {"_", Comp::assign(Expr::var(refs[size_t(pick(int(refs.size())))]->name), int_expr())};
        case 5:
          if (refs.empty()) continue;
          return bind(Ty::Int, Comp::deref(Expr::var(refs[size_t(pick(int(refs.size())))]->name)));
        case 6: return bind(Ty::Int, Comp::if_then(bool_atom(), Comp::ret(int_atom()), Comp::ret(int_atom())));
        case 7: {
          ExprP scrutinee = chance(50) ? Expr::inl(int_atom()) : Expr::inr(int_atom());
          std::string x = fresh(), y = fresh();
          CompP left = Comp::ret(Expr::var(x));
          CompP right = Comp::ret(chance(50) ? Expr::var(y) : int_atom());
          return bind(Ty::Int, Comp::case_of(scrutinee, x, left, y, right));
        }
        case 8: {
          std::string x = fresh();
          CompP body = chance(50) ? Comp::raise(Expr::str("e")) : Comp::ret(int_atom());
          if (chance(25)) body = Comp::divide(DivOp::Div, int_atom(), int_atom());
          return bind(Ty::Int, Comp::try_with(body, x, Comp::ret(int_atom())));
        }
        case 9: {
          int64_t n = chance(10) ? -1 : pick(3);
          auto [name, m] = bind(Ty::Arr, Comp::arr_make(Expr::integer(n), int_atom()));
          scope_.back().length = n;
          return {name, m};
        }
        case 10: {
          if (arrs.empty()) continue;
          const Binding* a = arrs[size_t(pick(int(arrs.size())))];
          int64_t i = pick(int(std::max<int64_t>(a->length, 0)) + 1);
          return bind(Ty::Int, Comp::arr_get(Expr::var(a->name), Expr::integer(i)));
        }
        case 11: {
          if (arrs.empty()) continue;
          const Binding* a = arrs[size_t(pick(int(arrs.size())))];
          int64_t i = pick(int(std::max<int64_t>(a->length, 0)) + 1);
          return {"_", Comp::arr_set(Expr::var(a->name), Expr::integer(i), int_atom())};
        }
        case 12: return bind(Ty::Int, Comp::divide(chance(70) ? DivOp::Div : DivOp::Mod, int_atom(), int_atom()));
        case 13: {
          std::string f = fresh(), x = fresh();
          if (chance(30)) {
            // Counts its argument down to zero.
            std::string y = fresh();
            CompP recurse = Comp::let(y, Comp::ret(Expr::prim(PrimOp::Sub, Expr::var(x), Expr::integer(1))),
                                      Comp::app(Expr::var(f), Expr::var(y)));
            CompP body = Comp::if_then(Expr::prim(PrimOp::Lt, Expr::var(x), Expr::integer(1)),
                                       Comp::ret(Expr::integer(0)), recurse);
            return bind(Ty::Int, Comp::app(Expr::fun(f, x, body), Expr::integer(pick(2))));
          }
          CompP body = Comp::ret(Expr::prim(PrimOp::Add, Expr::var(x), int_atom()));
          return bind(Ty::Int, Comp::app(Expr::fun(f, x, body), int_atom()));
        }
      }
    }
  }

  std::pair<std::string, CompP> bind(Ty t, CompP m) {
    std::string name = fresh();
    scope_.push_back(Binding{name, t, 0});
    return {name, std::move(m)};
  }

  CompP final_return() {
    std::vector<const Binding*> candidates;
    for (const Binding& b : scope_) {
      if (b.type == Ty::Int || b.type == Ty::Bool) candidates.push_back(&b);
    }
    if (candidates.empty() || chance(20)) return Comp::ret(Expr::unit());
    const Binding* b = candidates[size_t(pick(int(candidates.size())))];
    if (chance(20)) return Comp::ret(Expr::pair(Expr::var(b->name), int_atom()));
    return Comp::ret(Expr::var(b->name));
  }

  std::mt19937_64 rng_;
  std::vector<Binding> scope_;
  int counter_ = 0;
};

}  // namespace

CompP generate_program(uint64_t seed, int budget) { return Generator(seed).program(budget); }

}  // namespace itml
