#include "art/wellformed.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "art/horn.hpp"

namespace art {

namespace {

bool numeric(const std::string& s) { return s == "int" || s == "val" || (!s.empty() && s[0] == '\''); }
bool value(const std::string& s) { return s != "bool" && s != "void"; }

[[noreturn]] void bad(const WfContext& cx, const std::string& m) { throw InputError(cx.span, m); }

std::string check(const ExprPtr& e, const SortEnv& env, const WfContext& cx) {
  switch (e->kind) {
    case ExprKind::Int: return "int";
    case ExprKind::Bool: return "bool";
    case ExprKind::Null:
    case ExprKind::Loc: return "ptr";
    case ExprKind::Var: {
      auto it = env.find(e->name);
      if (it == env.end()) bad(cx, "unbound symbol '" + (e->name == kNu ? std::string("v") : e->name) + "'");
      return it->second;
    }
    case ExprKind::KVar: return "bool";
    case ExprKind::Unary: {
      auto s = check(e->args[0], env, cx);
      if (e->op == Op::Not) {
        if (s != "bool") bad(cx, "sort mismatch: '!' applied to " + s + " in " + show(e));
        return "bool";
      }
      if (!numeric(s)) bad(cx, "sort mismatch: negation of " + s + " in " + show(e));
      return "int";
    }
    case ExprKind::Binary: {
      auto a = check(e->args[0], env, cx);
      auto b = check(e->args[1], env, cx);
      switch (e->op) {
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
          if (!numeric(a) || !numeric(b)) bad(cx, "sort mismatch: arithmetic on " + a + " and " + b + " in " + show(e));
          return "int";
        case Op::Lt:
        case Op::Le:
        case Op::Gt:
        case Op::Ge:
          if (!numeric(a) || !numeric(b)) bad(cx, "sort mismatch: comparison of " + a + " and " + b + " in " + show(e));
          return "bool";
        case Op::Eq:
        case Op::Ne:
          if ((a == "bool") != (b == "bool") || a == "void" || b == "void")
            bad(cx, "sort mismatch: equality between " + a + " and " + b + " in " + show(e));
          return "bool";
        default:
          if (a != "bool" || b != "bool") bad(cx, "sort mismatch: connective on " + a + " and " + b + " in " + show(e));
          return "bool";
      }
    }
    case ExprKind::Field: {
      auto s = check(e->args[0], env, cx);
      if (!value(s)) bad(cx, "sort mismatch: field projection of " + s);
      return "val";
    }
    case ExprKind::Measure: {
      const Measure* m = cx.prog ? cx.prog->findMeasure(e->name) : nullptr;
      if (!m) bad(cx, "unbound measure '" + e->name + "'");
      auto s = check(e->args[0], env, cx);
      if (!value(s) || (s != m->ctor && s != "ptr" && s != "val"))
        bad(cx, "sort mismatch: measure " + e->name + " expects " + m->ctor + " but got " + s);
      return m->boolResult ? "bool" : "int";
    }
    case ExprKind::Ite: {
      if (check(e->args[0], env, cx) != "bool") bad(cx, "sort mismatch: condition of if");
      auto a = check(e->args[1], env, cx);
      auto b = check(e->args[2], env, cx);
      if ((a == "bool") != (b == "bool")) bad(cx, "sort mismatch: branches of if");
      return a;
    }
  }
  return "int";
}

void typeCheck(const RefType& t, SortEnv env, const WfContext& cx) {
  env[kNu] = sortOf(t.base);
  if (t.pred) {
    auto s = check(t.pred, env, cx);
    if (s != "bool") bad(cx, "refinement " + show(t.pred) + " is not a predicate");
  }
  if (t.base->kind == BaseKind::Record) {
    std::set<std::string> seen;
    for (auto& f : t.base->fields) {
      if (!seen.insert(f.name).second) bad(cx, "duplicate field '" + f.name + "'");
      typeCheck(f.type, env, cx);
    }
  }
  if (t.base->kind == BaseKind::App) {
    if (cx.prog) {
      auto* d = cx.prog->findType(t.base->name);
      if (!d) bad(cx, "unknown type constructor '" + t.base->name + "'");
      if (d->params.size() != t.base->args.size())
        bad(cx, "arity mismatch: " + t.base->name + " expects " + std::to_string(d->params.size()) +
                    " type arguments but got " + std::to_string(t.base->args.size()));
    }
    for (auto& a : t.base->args) typeCheck(a, env, cx);
  }
}

WfResult guard(const std::function<void()>& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.diag;
  }
  return std::nullopt;
}

void tyVarsOf(const RefType& t, std::set<std::string>& out) {
  if (t.base->kind == BaseKind::TyVar) out.insert(t.base->name);
  for (auto& f : t.base->fields) tyVarsOf(f.type, out);
  for (auto& a : t.base->args) tyVarsOf(a, out);
}

}  // namespace

std::string sortCheck(const ExprPtr& e, const SortEnv& env, const WfContext& cx) { return check(e, env, cx); }

SortEnv envSorts(const Env& gamma, const Heap& sigma) {
  SortEnv env;
  for (auto& e : gamma.entries)
    if (e.kind != EnvEntry::Guard) env[e.name] = sortOf(e.type.base);
  for (auto& h : sigma.entries) env[h.binder] = sortOf(h.type.base);
  return env;
}

WfResult wfType(const Env& gamma, const Heap& sigma, const RefType& t, const WfContext& cx) {
  return guard([&] { typeCheck(t, envSorts(gamma, sigma), cx); });
}

WfResult wfHeap(const Env& gamma, const Heap& sigma, const WfContext& cx) {
  return guard([&] {
    std::set<std::string> locs, binders;
    for (auto& e : sigma.entries) {
      if (!locs.insert(e.loc).second) bad(cx, "duplicate location &" + e.loc);
      if (!binders.insert(e.binder).second) bad(cx, "duplicate binder " + e.binder);
    }
    auto env = envSorts(gamma, sigma);
    for (auto& e : sigma.entries) typeCheck(e.type, env, cx);
  });
}

WfResult wfTypeDef(const TypeDef& d, const WfContext& cx0) {
  WfContext cx = cx0;
  cx.span = d.span;
  return guard([&] {
    if (d.root.base->kind != BaseKind::Record) bad(cx, "type " + d.name + ": root must be a record");
    std::set<std::string> tv;
    tyVarsOf(d.root, tv);
    for (auto& e : d.exHeap.entries) tyVarsOf(e.type, tv);
    for (auto& a : tv)
      if (std::find(d.params.begin(), d.params.end(), a) == d.params.end())
        bad(cx, "type " + d.name + ": undeclared type variable " + a);
    for (auto& e : d.exHeap.entries) {
      std::set<std::string> fv;
      typeFreeVars(e.type, fv);
      if (fv.count(d.rootBinder)) bad(cx, "type " + d.name + ": existential heap refers to root binder " + d.rootBinder);
    }
    Env g;
    auto env = envSorts(g, d.exHeap);
    env[d.rootBinder] = "rec";
    for (auto& p : d.params) (void)p;
    for (auto& e : d.exHeap.entries) typeCheck(e.type, env, cx);
    typeCheck(d.root, env, cx);
  });
}

WfResult wfMeasure(const TypeDef& d, const Measure& m, const WfContext& cx0) {
  WfContext cx = cx0;
  cx.span = m.span;
  return guard([&] {
    if (!m.nullBody) bad(cx, "measure " + m.name + ": missing null case");
    std::set<std::string> fv;
    freeVars(m.nullBody, fv);
    if (!fv.empty()) bad(cx, "measure " + m.name + ": null case mentions " + *fv.begin());
    // replace x.f by placeholder symbols carrying the field's snapshot sort
    SortEnv env;
    std::function<ExprPtr(const ExprPtr&)> proj = [&](const ExprPtr& e) -> ExprPtr {
      if (e->kind == ExprKind::Field) {
        if (e->args[0]->kind != ExprKind::Var || e->args[0]->name != m.param)
          bad(cx, "measure " + m.name + ": projection must be of the parameter");
        auto* f = findField(*d.root.base, e->name);
        if (!f) bad(cx, "measure " + m.name + ": field '" + e->name + "' not in constructor " + d.name);
        std::string key = m.param + "." + e->name;
        auto s = snapTy(f->type.base, d.exHeap);
        std::string so;
        if (s->kind == Sort::Product || s->kind == Sort::Union) {
          // pointer to a stored application: a snapshot of that constructor
          auto* he = d.exHeap.find(f->type.base->name);
          so = he ? sortOf(he->type.base) : "ptr";
        } else {
          so = sortOf(f->type.base);
        }
        env[key] = so;
        return E::var(key);
      }
      if (e->kind == ExprKind::Measure) {
        auto a = e->args[0];
        if (!(a->kind == ExprKind::Field))
          bad(cx, "measure " + m.name + ": non-structural recursion in " + show(e));
        return E::measure(e->name, proj(a));
      }
      if (e->kind == ExprKind::Var && e->name == m.param) return e;
      if (e->args.empty()) return e;
      Expr c = *e;
      for (auto& a : c.args) a = proj(a);
      return std::make_shared<const Expr>(std::move(c));
    };
    auto body = proj(m.consBody);
    env[m.param] = d.name;
    auto s = check(body, env, cx);
    if ((s == "bool") != m.boolResult) bad(cx, "measure " + m.name + ": body sort " + s + " does not match result");
    auto sn = check(m.nullBody, {}, cx);
    if ((sn == "bool") != m.boolResult) bad(cx, "measure " + m.name + ": null case sort does not match result");
  });
}

WfResult wfSchema(const Env& gamma, const Heap& sigma, const Schema& s, const WfContext& cx) {
  return guard([&] {
    auto amb = envSorts(gamma, sigma);
    std::set<std::string> bound;
    auto fresh = [&](const std::string& n) {
      if (n.empty()) return;
      if (amb.count(n) || !bound.insert(n).second) bad(cx, "binder '" + n + "' shadows a name already in scope");
    };
    for (auto& [x, t] : s.args) fresh(x);
    for (auto& e : s.inHeap.entries) fresh(e.binder);
    fresh(s.outName);
    for (auto& e : s.outHeap.entries) fresh(e.binder);
    SortEnv in = amb;
    for (auto& [x, t] : s.args) in[x] = sortOf(t.base);
    for (auto& e : s.inHeap.entries) in[e.binder] = sortOf(e.type.base);
    for (auto& [x, t] : s.args) typeCheck(t, in, cx);
    for (auto& e : s.inHeap.entries) typeCheck(e.type, in, cx);
    SortEnv out = in;
    if (!s.outName.empty()) out[s.outName] = sortOf(s.outType.base);
    for (auto& e : s.outHeap.entries) out[e.binder] = sortOf(e.type.base);
    typeCheck(s.outType, out, cx);
    for (auto& e : s.outHeap.entries) typeCheck(e.type, out, cx);
  });
}

WfResult wfProgram(const Program& p) {
  WfContext cx{&p, {}};
  std::set<std::string> names;
  for (auto& d : p.types) {
    if (!names.insert(d.name).second) return Diagnostic{d.span, "duplicate type " + d.name};
    if (auto r = wfTypeDef(d, cx)) return r;
  }
  for (auto& m : p.measures) {
    auto* d = p.findType(m.ctor);
    if (!d) return Diagnostic{m.span, "measure " + m.name + " over unknown constructor " + m.ctor};
    if (auto r = wfMeasure(*d, m, cx)) return r;
  }
  std::set<std::string> fns;
  for (auto& f : p.functions) {
    if (!fns.insert(f.name).second) return Diagnostic{f.span, "duplicate function " + f.name};
    if (f.name == "assert") return Diagnostic{f.span, "'assert' is reserved"};
    if (!f.schema) return Diagnostic{f.span, "function '" + f.name + "' has no signature"};
    WfContext fc{&p, f.span};
    if (auto r = wfSchema({}, {}, *f.schema, fc)) return r;
  }
  return std::nullopt;
}

std::string show(const SortPtr& s) {
  switch (s->kind) {
    case Sort::Int: return "int";
    case Sort::Bool: return "bool";
    case Sort::Pointer: return "ptr";
    case Sort::Null: return "null";
    case Sort::Void: return "void";
    case Sort::TyVar: return s->name;
    case Sort::Snapshot: return "snap(" + s->name + ")";
    case Sort::Record: {
      std::string r = "{";
      for (size_t i = 0; i < s->fields.size(); i++)
        r += (i ? ", " : "") + s->fields[i].first + ": " + show(s->fields[i].second);
      return r + "}";
    }
    case Sort::Product: return "(" + show(s->parts[0]) + " * " + show(s->parts[1]) + ")";
    case Sort::Union: return "(" + show(s->parts[0]) + " + " + show(s->parts[1]) + ")";
  }
  return "?";
}

namespace {
SortPtr mkS(Sort s) { return std::make_shared<const Sort>(std::move(s)); }

SortPtr snap(const BasePtr& t, const Heap& sigma, std::set<std::string>& visiting) {
  switch (t->kind) {
    case BaseKind::Int: return mkS({Sort::Int});
    case BaseKind::Bool: return mkS({Sort::Bool});
    case BaseKind::Void: return mkS({Sort::Void});
    case BaseKind::Null: return mkS({Sort::Null});
    case BaseKind::TyVar: return mkS({Sort::TyVar, t->name});
    case BaseKind::App: return mkS({Sort::Snapshot, show(t)});
    case BaseKind::Record: {
      Sort s{Sort::Record};
      for (auto& f : t->fields) s.fields.push_back({f.name, snap(f.type.base, sigma, visiting)});
      return mkS(s);
    }
    case BaseKind::Ref:
    case BaseKind::MaybeRef: {
      SortPtr ptr = mkS({Sort::Pointer});
      auto* e = sigma.find(t->name);
      SortPtr r = ptr;
      if (e && !visiting.count(t->name)) {
        visiting.insert(t->name);
        Sort p{Sort::Product};
        p.parts = {ptr, snap(e->type.base, sigma, visiting)};
        visiting.erase(t->name);
        r = mkS(p);
      }
      if (t->kind == BaseKind::MaybeRef) {
        Sort u{Sort::Union};
        u.parts = {r, mkS({Sort::Null})};
        return mkS(u);
      }
      return r;
    }
  }
  return mkS({Sort::Int});
}
}  // namespace

SortPtr snapTy(const BasePtr& t, const Heap& sigma) {
  std::set<std::string> visiting;
  return snap(t, sigma, visiting);
}

}  // namespace art
