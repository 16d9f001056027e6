#include "art/audit.hpp"

#include <functional>
#include <set>

#include "art/fresh.hpp"
#include "art/horn.hpp"

namespace art {

namespace A {
namespace {
AssertPtr mk(Assertion a) { return std::make_shared<const Assertion>(std::move(a)); }
}  // namespace
AssertPtr pure(ExprPtr p) {
  Assertion a;
  a.kind = Assertion::Pure;
  a.pure = std::move(p);
  return mk(std::move(a));
}
AssertPtr emp() { return mk(Assertion{}); }
AssertPtr pointsTo(ExprPtr ad, ExprPtr v) {
  Assertion a;
  a.kind = Assertion::PointsTo;
  a.addr = std::move(ad);
  a.val = std::move(v);
  return mk(std::move(a));
}
static AssertPtr nary(Assertion::Kind k, std::vector<AssertPtr> ks) {
  if (ks.size() == 1) return ks[0];
  Assertion a;
  a.kind = k;
  a.kids = std::move(ks);
  return mk(std::move(a));
}
AssertPtr star(std::vector<AssertPtr> ks) {
  std::vector<AssertPtr> r;
  for (auto& k : ks)
    if (k->kind != Assertion::Emp) r.push_back(k);
  if (r.empty()) return emp();
  return nary(Assertion::Star, std::move(r));
}
AssertPtr conj(std::vector<AssertPtr> ks) { return nary(Assertion::And, std::move(ks)); }
AssertPtr disj(std::vector<AssertPtr> ks) { return nary(Assertion::Or, std::move(ks)); }
AssertPtr implies(AssertPtr g, AssertPtr b) {
  Assertion a;
  a.kind = Assertion::Implies;
  a.kids = {std::move(g), std::move(b)};
  return mk(std::move(a));
}
AssertPtr neg(AssertPtr x) {
  Assertion a;
  a.kind = Assertion::Not;
  a.kids = {std::move(x)};
  return mk(std::move(a));
}
AssertPtr exists(std::vector<std::string> vs, AssertPtr body) {
  if (vs.empty()) return body;
  Assertion a;
  a.kind = Assertion::Exists;
  a.vars = std::move(vs);
  a.kids = {std::move(body)};
  return mk(std::move(a));
}
}  // namespace A

std::string show(const AssertPtr& a) {
  auto join = [&](const std::string& sep) {
    std::string s = "(";
    for (size_t i = 0; i < a->kids.size(); i++) s += (i ? sep : "") + show(a->kids[i]);
    return s + ")";
  };
  switch (a->kind) {
    case Assertion::Pure: return show(a->pure);
    case Assertion::Emp: return "emp";
    case Assertion::PointsTo: return show(a->addr) + " |-> " + show(a->val);
    case Assertion::Star: return join(" * ");
    case Assertion::And: return join(" && ");
    case Assertion::Or: return join(" || ");
    case Assertion::Implies: return "(" + show(a->kids[0]) + " => " + show(a->kids[1]) + ")";
    case Assertion::Not: return "!" + show(a->kids[0]);
    case Assertion::Exists: {
      std::string s = "(exists ";
      for (size_t i = 0; i < a->vars.size(); i++) s += (i ? ", " : "") + a->vars[i];
      return s + ". " + show(a->kids[0]) + ")";
    }
  }
  return "?";
}

namespace {

using LocTerms = std::map<std::string, ExprPtr>;

ExprPtr locTerm(const std::string& l, const LocTerms& lt) {
  auto it = lt.find(l);
  return it == lt.end() ? E::loc(l) : it->second;
}

ExprPtr typeAssertL(const ExprPtr& term, const RefType& t, const LocTerms& lt) {
  std::vector<ExprPtr> parts;
  if (t.pred && !isTrue(t.pred)) {
    Subst s;
    s.vars[kNu] = term;
    parts.push_back(subst(t.pred, s));
  }
  switch (t.base->kind) {
    case BaseKind::Ref: {
      auto L = locTerm(t.base->name, lt);
      parts.push_back(E::eq(term, L));
      parts.push_back(E::ne(L, E::null()));
      break;
    }
    case BaseKind::MaybeRef:
      parts.push_back(E::implies(E::ne(term, E::null()), E::eq(term, locTerm(t.base->name, lt))));
      break;
    case BaseKind::Null: parts.push_back(E::eq(term, E::null())); break;
    case BaseKind::Record:
      for (auto& f : t.base->fields) parts.push_back(typeAssertL(E::field(term, f.name), f.type, lt));
      break;
    default: break;
  }
  return E::conj(parts);
}

AssertPtr typePred(const Program& p, const TypeDef& d, const std::vector<RefType>& args, const ExprPtr& l,
                   const ExprPtr& x, int depth, int& counter);

// cell assertion for a location bound to binder b : t
AssertPtr cellAt(const Program& p, const ExprPtr& l, const ExprPtr& b, const RefType& t, int depth, int& counter,
                 const LocTerms& lt) {
  if (t.base->kind == BaseKind::App) {
    auto* d = p.findType(t.base->name);
    if (!d) throw InputError(Span{}, "unknown type '" + t.base->name + "'");
    std::vector<AssertPtr> ks;
    if (t.pred && !isTrue(t.pred)) ks.push_back(A::pure(typeAssertL(b, RefType{T::intB(), t.pred}, lt)));
    ks.push_back(typePred(p, *d, t.base->args, l, b, depth, counter));
    return A::star(ks);
  }
  return A::star({A::pointsTo(l, b), A::pure(typeAssertL(b, t, lt))});
}

AssertPtr guarded(const ExprPtr& l, const AssertPtr& cell, const ExprPtr& b) {
  return A::conj({A::implies(A::pure(E::ne(l, E::null())), cell),
                  A::implies(A::pure(E::eq(l, E::null())), A::pure(E::eq(b, E::null())))});
}

AssertPtr typePred(const Program& p, const TypeDef& d, const std::vector<RefType>& args, const ExprPtr& l,
                   const ExprPtr& x, int depth, int& counter) {
  if (depth <= 0) return A::pure(E::tt());
  std::map<std::string, RefType> tys;
  for (size_t i = 0; i < d.params.size() && i < args.size(); i++) tys[d.params[i]] = args[i];
  int n = ++counter;
  LocTerms lt;
  Subst s;
  std::vector<std::string> vs;
  for (auto& e : d.exHeap.entries) {
    auto ln = "&" + e.loc + "'" + std::to_string(n);
    auto bn = e.binder + "'" + std::to_string(n);
    lt[e.loc] = E::var(ln);
    s.vars[e.binder] = E::var(bn);
    vs.push_back(ln);
    vs.push_back(bn);
  }
  s.vars[d.rootBinder] = x;
  auto root = subst(substTy(d.root, tys), s);
  std::vector<AssertPtr> ks{A::pointsTo(l, x), A::pure(typeAssertL(x, root, lt))};
  for (auto& e : d.exHeap.entries) {
    auto et = subst(substTy(e.type, tys), s);
    auto b = s.vars[e.binder];
    ks.push_back(guarded(lt[e.loc], cellAt(p, lt[e.loc], b, et, depth - 1, counter, lt), b));
  }
  return A::exists(vs, A::star(ks));
}

}  // namespace

ExprPtr typeAssert(const ExprPtr& term, const RefType& t) { return typeAssertL(term, t, {}); }

AssertPtr typePredicate(const Program& p, const TypeDef& d, const std::vector<RefType>& tyArgs, const ExprPtr& l,
                        const ExprPtr& x, int depth) {
  int counter = 0;
  return typePred(p, d, tyArgs, l, x, depth, counter);
}

AssertPtr denote(const Program& p, const Env& gamma0, const Heap& sigma0, int depth, const Solution& sol) {
  Env gamma = gamma0;
  for (auto& e : gamma.entries) {
    if (e.guard) e.guard = applySolution(e.guard, sol);
    if (e.type.base) e.type = applySolution(e.type, sol);
  }
  auto sigma = applySolution(sigma0, sol);
  std::vector<ExprPtr> pure;
  for (auto& e : gamma.entries) {
    switch (e.kind) {
      case EnvEntry::Guard: pure.push_back(e.guard); break;
      case EnvEntry::Bind: pure.push_back(typeAssert(E::var(e.name), e.type)); break;
      case EnvEntry::Ghost: {
        auto L = E::loc(e.loc);
        pure.push_back(E::implies(E::eq(L, E::null()), E::eq(E::var(e.name), E::null())));
        if (e.type.base->kind != BaseKind::App) pure.push_back(E::implies(E::ne(L, E::null()), typeAssert(E::var(e.name), e.type)));
        break;
      }
    }
  }
  std::vector<AssertPtr> ks;
  auto pc = E::conj(pure);
  if (!isTrue(pc)) ks.push_back(A::pure(pc));
  int counter = 0;
  for (auto& h : sigma.entries) {
    auto L = E::loc(h.loc);
    auto b = E::var(h.binder);
    ks.push_back(guarded(L, cellAt(p, L, b, h.type, depth, counter, {}), b));
  }
  return A::star(ks);
}

ExprPtr pureOf(const AssertPtr& a) {
  switch (a->kind) {
    case Assertion::Pure: return a->pure;
    case Assertion::Emp:
    case Assertion::PointsTo:
    case Assertion::Exists: return E::tt();
    case Assertion::Star:
    case Assertion::And: {
      std::vector<ExprPtr> ps;
      for (auto& k : a->kids) ps.push_back(pureOf(k));
      return E::conj(ps);
    }
    case Assertion::Or: {
      ExprPtr r = E::ff();
      for (auto& k : a->kids) r = E::bin(Op::Or, r, pureOf(k));
      return r;
    }
    case Assertion::Implies: {
      auto b = pureOf(a->kids[1]);
      if (isTrue(b)) return E::tt();
      return E::implies(pureOf(a->kids[0]), b);
    }
    case Assertion::Not: return E::notE(pureOf(a->kids[0]));
  }
  return E::tt();
}

SatResult auditPure(const Program& p, const Env& gamma, const Heap& sigma, SmtBackend& smt, const Solution& sol) {
  auto pc = pureOf(denote(p, gamma, sigma, 3, sol));
  SortEnv sorts;
  for (auto& e : gamma.entries)
    if (e.kind != EnvEntry::Guard) sorts[e.name] = sortOf(e.type.base);
  for (auto& h : sigma.entries) sorts[h.binder] = sortOf(h.type.base);
  return smt.checkSat({pc}, sorts);
}

// ---------------------------------------------------------------- snapshots

namespace S {
namespace {
SnapPtr mk(Snap s) { return std::make_shared<const Snap>(std::move(s)); }
}  // namespace
SnapPtr integer(long long v) { return mk(Snap{Snap::Int, v, {}, nullptr}); }
SnapPtr boolean(bool b) { return mk(Snap{Snap::Bool, b ? 1 : 0, {}, nullptr}); }
SnapPtr null() { return mk(Snap{Snap::Null, 0, {}, nullptr}); }
SnapPtr rec(std::vector<std::pair<std::string, SnapPtr>> fs) { return mk(Snap{Snap::Rec, 0, std::move(fs), nullptr}); }
SnapPtr ptr(long long a, SnapPtr t) { return mk(Snap{Snap::Ptr, a, {}, std::move(t)}); }
SnapPtr addr(long long a) { return mk(Snap{Snap::Addr, a, {}, nullptr}); }
}  // namespace S

bool snapEqual(const SnapPtr& a, const SnapPtr& b) {
  auto isAddr = [](const SnapPtr& s) { return s->kind == Snap::Ptr || s->kind == Snap::Addr; };
  if (isAddr(a) && isAddr(b)) return a->i == b->i;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Snap::Int:
    case Snap::Bool: return a->i == b->i;
    case Snap::Null: return true;
    case Snap::Rec:
      if (a->fields.size() != b->fields.size()) return false;
      for (size_t i = 0; i < a->fields.size(); i++)
        if (a->fields[i].first != b->fields[i].first || !snapEqual(a->fields[i].second, b->fields[i].second))
          return false;
      return true;
    default: return false;
  }
}

std::string show(const SnapPtr& s) {
  switch (s->kind) {
    case Snap::Int: return std::to_string(s->i);
    case Snap::Bool: return s->i ? "true" : "false";
    case Snap::Null: return "null";
    case Snap::Addr: return "@" + std::to_string(s->i);
    case Snap::Ptr: return "(@" + std::to_string(s->i) + ", " + show(s->target) + ")";
    case Snap::Rec: {
      std::string r = "{";
      for (size_t i = 0; i < s->fields.size(); i++)
        r += (i ? ", " : "") + s->fields[i].first + ": " + show(s->fields[i].second);
      return r + "}";
    }
  }
  return "?";
}

Walked walk(const SnapPtr& v) {
  Walked w;
  std::function<SnapPtr(const SnapPtr&)> go = [&](const SnapPtr& s) -> SnapPtr {
    switch (s->kind) {
      case Snap::Rec: {
        std::vector<std::pair<std::string, SnapPtr>> fs;
        for (auto& [f, x] : s->fields) fs.push_back({f, go(x)});
        return S::rec(fs);
      }
      case Snap::Ptr: w.cells[s->i] = go(s->target); return S::addr(s->i);
      default: return s;
    }
  };
  w.root = go(v);
  return w;
}

namespace {

[[noreturn]] void stuck(const std::string& m) { throw InputError(Span{}, "measure evaluation stuck: " + m); }

long long asInt(const SnapPtr& s) {
  if (s->kind != Snap::Int && s->kind != Snap::Bool) stuck("expected a number, got " + show(s));
  return s->i;
}

const SnapPtr& fieldOf(const SnapPtr& s, const std::string& f) {
  const Snap* r = s.get();
  if (r->kind == Snap::Ptr) r = r->target.get();
  if (r->kind != Snap::Rec) stuck("projection ." + f + " of " + show(s));
  for (auto& [n, v] : r->fields)
    if (n == f) return v;
  stuck("no field " + f + " in " + show(s));
}

SnapPtr arith(Op op, const std::vector<SnapPtr>& a) {
  switch (op) {
    case Op::Add: return S::integer(asInt(a[0]) + asInt(a[1]));
    case Op::Sub: return S::integer(asInt(a[0]) - asInt(a[1]));
    case Op::Mul: return S::integer(asInt(a[0]) * asInt(a[1]));
    case Op::Eq: return S::boolean(snapEqual(a[0], a[1]));
    case Op::Ne: return S::boolean(!snapEqual(a[0], a[1]));
    case Op::Lt: return S::boolean(asInt(a[0]) < asInt(a[1]));
    case Op::Le: return S::boolean(asInt(a[0]) <= asInt(a[1]));
    case Op::Gt: return S::boolean(asInt(a[0]) > asInt(a[1]));
    case Op::Ge: return S::boolean(asInt(a[0]) >= asInt(a[1]));
    case Op::And: return S::boolean(asInt(a[0]) && asInt(a[1]));
    case Op::Or: return S::boolean(asInt(a[0]) || asInt(a[1]));
    case Op::Implies: return S::boolean(!asInt(a[0]) || asInt(a[1]));
    case Op::Iff: return S::boolean(!asInt(a[0]) == !asInt(a[1]));
    case Op::Not: return S::boolean(!asInt(a[0]));
    case Op::Neg: return S::integer(-asInt(a[0]));
  }
  return S::null();
}

// value of e; nullptr when it mentions an unbound name
SnapPtr evalIn(const Program& p, const ExprPtr& e, const std::map<std::string, SnapPtr>& env,
               const std::function<SnapPtr(const SnapPtr&)>& deref) {
  switch (e->kind) {
    case ExprKind::Int: return S::integer(e->ival);
    case ExprKind::Bool: return S::boolean(e->bval);
    case ExprKind::Null: return S::null();
    case ExprKind::Loc:
    case ExprKind::Var: {
      auto it = env.find(e->kind == ExprKind::Loc ? "&" + e->name : e->name);
      return it == env.end() ? nullptr : it->second;
    }
    case ExprKind::Field: {
      auto r = evalIn(p, e->args[0], env, deref);
      if (!r) return nullptr;
      if (r->kind == Snap::Addr) r = deref(r);
      if (!r) return nullptr;
      return fieldOf(r, e->name);
    }
    case ExprKind::Measure: {
      auto a = evalIn(p, e->args[0], env, deref);
      if (!a) return nullptr;
      auto* m = p.findMeasure(e->name);
      if (!m) stuck("unknown measure " + e->name);
      return evalMeasure(p, *m, deref ? deref(a) : a);
    }
    case ExprKind::Ite: {
      auto c = evalIn(p, e->args[0], env, deref);
      if (!c) return nullptr;
      return evalIn(p, asInt(c) ? e->args[1] : e->args[2], env, deref);
    }
    case ExprKind::KVar: stuck("unsolved refinement variable");
    default: {
      std::vector<SnapPtr> as;
      for (auto& a : e->args) {
        auto v = evalIn(p, a, env, deref);
        if (!v) return nullptr;
        as.push_back(v);
      }
      return arith(e->op, as);
    }
  }
}

}  // namespace

SnapPtr evalMeasure(const Program& p, const Measure& m, const SnapPtr& v) {
  if (v->kind == Snap::Null) return evalIn(p, m.nullBody, {}, nullptr);
  if (v->kind != Snap::Ptr && v->kind != Snap::Rec) stuck(m.name + " applied to " + show(v));
  return evalIn(p, m.consBody, {{m.param, v}}, nullptr);
}

// ---------------------------------------------------------------- ground checking

namespace {

using Env_ = std::map<std::string, SnapPtr>;
using Cont = std::function<bool(const CellMap&, Env_&)>;

struct Ground {
  const Program& p;
  const CellMap& full;
  std::vector<SnapPtr> domain;

  // pointer -> snapshot with reachable cells
  SnapPtr toSnap(const SnapPtr& v, int fuel = 64) const {
    if (fuel <= 0) return v;
    if (v->kind == Snap::Addr) {
      auto it = full.find(v->i);
      if (it == full.end()) return v;
      return S::ptr(v->i, toSnap(it->second, fuel - 1));
    }
    if (v->kind == Snap::Rec) {
      std::vector<std::pair<std::string, SnapPtr>> fs;
      for (auto& [f, x] : v->fields) fs.push_back({f, toSnap(x, fuel - 1)});
      return S::rec(fs);
    }
    return v;
  }

  SnapPtr eval(const ExprPtr& e, const Env_& env) const {
    return evalIn(p, e, env, [&](const SnapPtr& s) { return toSnap(s); });
  }

  static std::string key(const ExprPtr& e) { return e->kind == ExprKind::Loc ? "&" + e->name : e->name; }

  std::vector<std::string> unbound(const ExprPtr& e, const Env_& env) const {
    std::set<std::string> fv, fl;
    freeVars(e, fv);
    freeLocs(e, fl);
    std::vector<std::string> r;
    for (auto& v : fv)
      if (!env.count(v)) r.push_back(v);
    for (auto& l : fl)
      if (!env.count("&" + l)) r.push_back("&" + l);
    return r;
  }

  // try every binding of the names, then continue
  bool bindAll(const std::vector<std::string>& names, size_t i, Env_& env, const std::function<bool(Env_&)>& k) {
    if (i == names.size()) return k(env);
    if (env.count(names[i])) return bindAll(names, i + 1, env, k);
    for (auto& d : domain) {
      env[names[i]] = d;
      if (bindAll(names, i + 1, env, k)) return true;
    }
    env.erase(names[i]);
    return false;
  }

  bool truth(const ExprPtr& e, const Env_& env) const {
    auto v = eval(e, env);
    return v && asInt(v);
  }

  bool purePred(const ExprPtr& e, const CellMap& h, Env_& env, const Cont& k) {
    auto cs = conjuncts(e);
    if (cs.size() > 1) {
      std::function<bool(size_t, Env_&)> go = [&](size_t i, Env_& en) -> bool {
        if (i == cs.size()) return k(h, en);
        return purePred(cs[i], h, en, [&](const CellMap&, Env_& e2) { return go(i + 1, e2); });
      };
      return go(0, env);
    }
    auto ub = unbound(e, env);
    if (ub.empty()) return truth(e, env) && k(h, env);
    if (e->kind == ExprKind::Binary && e->op == Op::Eq) {
      for (int side = 0; side < 2; side++) {
        auto& a = e->args[side];
        auto& b = e->args[1 - side];
        if ((a->kind == ExprKind::Var || a->kind == ExprKind::Loc) && !env.count(key(a)) && unbound(b, env).empty()) {
          auto v = eval(b, env);
          if (!v) return false;
          Env_ e2 = env;
          e2[key(a)] = v;
          return k(h, e2);
        }
      }
    }
    Env_ e2 = env;
    return bindAll(ub, 0, e2, [&](Env_& e3) { return truth(e, e3) && k(h, e3); });
  }

  bool go(const AssertPtr& a, const CellMap& h, Env_& env, const Cont& k) {
    switch (a->kind) {
      case Assertion::Emp: return k(h, env);
      case Assertion::Pure: return purePred(a->pure, h, env, k);
      case Assertion::PointsTo: {
        auto consume = [&](Env_& e2) -> bool {
          auto ad = eval(a->addr, e2);
          if (!ad || ad->kind != Snap::Addr) return false;
          auto it = h.find(ad->i);
          if (it == h.end()) return false;
          CellMap rest = h;
          rest.erase(ad->i);
          Env_ e3 = e2;
          if ((a->val->kind == ExprKind::Var) && !e3.count(a->val->name)) {
            e3[a->val->name] = it->second;
          } else {
            auto v = eval(a->val, e3);
            if (!v || !snapEqual(v, it->second)) return false;
          }
          return k(rest, e3);
        };
        auto ub = unbound(a->addr, env);
        if (ub.empty()) return consume(env);
        if (ub.size() == 1 && (a->addr->kind == ExprKind::Var || a->addr->kind == ExprKind::Loc)) {
          for (auto& [ad, c] : h) {
            Env_ e2 = env;
            e2[ub[0]] = S::addr(ad);
            if (consume(e2)) return true;
          }
          return false;
        }
        Env_ e2 = env;
        return bindAll(ub, 0, e2, consume);
      }
      case Assertion::Star: {
        std::function<bool(size_t, const CellMap&, Env_&)> seq = [&](size_t i, const CellMap& hh, Env_& en) -> bool {
          if (i == a->kids.size()) return k(hh, en);
          return go(a->kids[i], hh, en, [&](const CellMap& h2, Env_& e2) { return seq(i + 1, h2, e2); });
        };
        return seq(0, h, env);
      }
      case Assertion::And: {
        std::function<bool(size_t, const CellMap*, Env_&)> all = [&](size_t i, const CellMap* used,
                                                                     Env_& en) -> bool {
          if (i == a->kids.size()) return k(used ? *used : h, en);
          return go(a->kids[i], h, en, [&](const CellMap& h2, Env_& e2) {
            if (h2.size() == h.size()) return all(i + 1, used, e2);
            if (used && *used != h2) return false;
            return all(i + 1, &h2, e2);
          });
        };
        return all(0, nullptr, env);
      }
      case Assertion::Or:
        for (auto& kid : a->kids)
          if (go(kid, h, env, k)) return true;
        return false;
      case Assertion::Implies: {
        auto g = a->kids[0];
        auto gp = pureOf(g);
        Env_ e2 = env;
        return bindAll(unbound(gp, env), 0, e2, [&](Env_& e3) {
          if (!truth(gp, e3)) return k(h, e3);
          return go(a->kids[1], h, e3, k);
        });
      }
      case Assertion::Not: {
        auto gp = pureOf(a->kids[0]);
        Env_ e2 = env;
        return bindAll(unbound(gp, env), 0, e2, [&](Env_& e3) { return !truth(gp, e3) && k(h, e3); });
      }
      case Assertion::Exists: {
        Env_ e2 = env;
        for (auto& v : a->vars) e2.erase(v);
        return go(a->kids[0], h, e2, k);
      }
    }
    return false;
  }
};

}  // namespace

bool groundSat(const Program& p, const AssertPtr& a, const CellMap& heap, const std::map<std::string, SnapPtr>& env) {
  Ground g{p, heap, {}};
  g.domain.push_back(S::null());
  std::set<long long> ints{0};
  for (auto& [ad, c] : heap) {
    g.domain.push_back(S::addr(ad));
    g.domain.push_back(c);
    for (auto& [f, v] : c->fields)
      if (v->kind == Snap::Int) ints.insert(v->i);
  }
  for (auto i : ints) g.domain.push_back(S::integer(i));
  Env_ e = env;
  return g.go(a, heap, e, [](const CellMap& rest, Env_&) { return rest.empty(); });
}

}  // namespace art
