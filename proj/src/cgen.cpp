#include "art/cgen.hpp"

#include <algorithm>

namespace art {

namespace {

ExprPtr nuIs(const ExprPtr& e) { return E::eq(E::nu(), e); }

Subst nuSubst(const ExprPtr& term) {
  Subst s;
  s.vars[kNu] = term;
  return s;
}

RefType mapPreds(const RefType& t, const std::function<ExprPtr(const ExprPtr&)>& f) {
  BasePtr b = t.base;
  if (b->kind == BaseKind::Record) {
    std::vector<FieldType> fs;
    for (auto& fl : b->fields) fs.push_back({fl.name, mapPreds(fl.type, f)});
    b = T::record(fs);
  } else if (b->kind == BaseKind::App) {
    std::vector<RefType> as;
    for (auto& a : b->args) as.push_back(mapPreds(a, f));
    b = T::app(b->name, as);
  }
  return RefType{b, t.pred ? f(t.pred) : nullptr};
}

ExprPtr heapFact(const std::string& loc, const std::string& binder, const RefType& t) {
  auto L = E::loc(loc);
  std::vector<ExprPtr> parts;
  parts.push_back(E::implies(E::eq(L, E::null()), E::eq(E::var(binder), E::null())));
  auto f = facts(E::var(binder), t);
  if (!isTrue(f)) parts.push_back(E::implies(E::ne(L, E::null()), f));
  return E::conj(parts);
}

void collectExprIdents(const ExprPtr& e, std::set<std::string>& out) {
  std::set<std::string> fv;
  freeVars(e, fv);
  out.insert(fv.begin(), fv.end());
}

void collectIdents(const Block& b, std::set<std::string>& out) {
  for (auto& s : b) {
    if (!s->x.empty() && s->kind != StmtKind::Unfold && s->kind != StmtKind::Fold && s->kind != StmtKind::Pad)
      out.insert(s->x);
    if (s->e) collectExprIdents(s->e, out);
    for (auto& a : s->args) collectExprIdents(a, out);
    for (auto& [f, e] : s->fields) collectExprIdents(e, out);
    collectIdents(s->thenB, out);
    collectIdents(s->elseB, out);
  }
}

BasePtr joinShape(const BasePtr& a, const BasePtr& b) {
  if (sameShape(a, b)) return eraseB(a);
  auto ptrJoin = [](const BasePtr& p, const BasePtr& q) -> BasePtr {
    if (q->kind == BaseKind::Null && isPtr(p)) return T::maybeRef(p->name);
    if (isPtr(p) && isPtr(q) && p->name == q->name) return T::maybeRef(p->name);
    return nullptr;
  };
  if (auto r = ptrJoin(a, b)) return r;
  if (auto r = ptrJoin(b, a)) return r;
  if (a->kind == BaseKind::Record && b->kind == BaseKind::Record && a->fields.size() == b->fields.size()) {
    std::vector<FieldType> fs;
    for (size_t i = 0; i < a->fields.size(); i++) {
      if (a->fields[i].name != b->fields[i].name) return nullptr;
      auto j = joinShape(a->fields[i].type.base, b->fields[i].type.base);
      if (!j) return nullptr;
      fs.push_back({a->fields[i].name, T::mk(j)});
    }
    return T::record(fs);
  }
  return nullptr;
}

// self type left behind at a location whose binder y moved into the environment
RefType selfAt(const std::string& y, const RefType& t) {
  if (t.base->kind == BaseKind::Record) {
    std::vector<FieldType> fs;
    for (auto& f : t.base->fields)
      fs.push_back({f.name, RefType{f.type.base, nuIs(E::field(E::var(y), f.name))}});
    return RefType{T::record(fs), nullptr};
  }
  return RefType{t.base, nuIs(E::var(y))};
}

bool hasConjunct(const ExprPtr& p, const ExprPtr& c) {
  for (auto& x : conjuncts(p))
    if (exprEqual(x, c)) return true;
  return false;
}

ExprPtr addConj(const ExprPtr& p, const ExprPtr& c) {
  if (!p || isTrue(p)) return c;
  if (hasConjunct(p, c)) return p;
  return E::conj2(p, c);
}

}  // namespace

ExprPtr facts(const ExprPtr& term, const RefType& t) {
  std::vector<ExprPtr> parts;
  if (t.pred && !isTrue(t.pred)) parts.push_back(subst(t.pred, nuSubst(term)));
  switch (t.base->kind) {
    case BaseKind::Ref:
      parts.push_back(E::eq(term, E::loc(t.base->name)));
      parts.push_back(E::ne(E::loc(t.base->name), E::null()));
      break;
    case BaseKind::MaybeRef: parts.push_back(E::eq(term, E::loc(t.base->name))); break;
    case BaseKind::Null: parts.push_back(E::eq(term, E::null())); break;
    case BaseKind::Record:
      for (auto& f : t.base->fields) parts.push_back(facts(E::field(term, f.name), f.type));
      break;
    default: break;
  }
  return E::conj(parts);
}

std::vector<ExprPtr> hypotheses(const World& w) {
  std::vector<ExprPtr> hs;
  auto push = [&](const ExprPtr& e) {
    if (e && !isTrue(e)) hs.push_back(e);
  };
  for (auto& e : w.gamma.entries) {
    switch (e.kind) {
      case EnvEntry::Guard: push(e.guard); break;
      case EnvEntry::Bind: push(facts(E::var(e.name), e.type)); break;
      case EnvEntry::Ghost: push(heapFact(e.loc, e.name, e.type)); break;
    }
  }
  for (auto& h : w.sigma.entries) push(heapFact(h.loc, h.binder, h.type));
  return hs;
}

BasePtr typeOfExpr(const Env& gamma, const ExprPtr& e, Span sp) {
  switch (e->kind) {
    case ExprKind::Int: return T::intB();
    case ExprKind::Bool: return T::boolB();
    case ExprKind::Null: return T::nullB();
    case ExprKind::Loc: return T::ref(e->name);
    case ExprKind::Var: {
      auto* b = gamma.lookup(e->name);
      if (!b) throw InputError(sp, "unbound variable '" + e->name + "'");
      return eraseB(b->type.base);
    }
    case ExprKind::Unary: return e->op == Op::Not ? T::boolB() : T::intB();
    case ExprKind::Binary:
      for (auto& a : e->args) typeOfExpr(gamma, a, sp);
      if (e->op == Op::Add || e->op == Op::Sub || e->op == Op::Mul) return T::intB();
      return T::boolB();
    default: throw InputError(sp, "expression '" + show(e) + "' is not a program expression");
  }
}

Schema assertSchema() {
  Schema s;
  s.args.push_back({"b", RefType{T::boolB(), E::nu()}});
  s.outType = T::mk(T::voidB());
  return s;
}

// ---------------------------------------------------------------- setup

Checker::Checker(const Program& p, CgenOptions o) : prog_(p), opt_(o) {
  for (auto& f : prog_.functions) {
    progIdents_.insert(f.name);
    for (auto& x : f.params) progIdents_.insert(x);
    collectIdents(f.body, progIdents_);
    if (f.schema) {
      for (auto& e : f.schema->inHeap.entries) progIdents_.insert(e.binder);
      for (auto& e : f.schema->outHeap.entries) progIdents_.insert(e.binder);
      if (!f.schema->outName.empty()) progIdents_.insert(f.schema->outName);
    }
  }
  for (auto& n : progIdents_) base_.reserve(n);
  mkTemplates();
}

int Checker::newKappa(const std::string& nuSort, const std::vector<std::pair<std::string, std::string>>& scope,
                      const std::string& origin) {
  int id = ++nextKappa_;
  KappaInfo k;
  k.id = id;
  k.nuSort = nuSort;
  k.scope = scope;
  k.origin = origin;
  cs_.kappas[id] = k;
  return id;
}

RefType Checker::templ(const RefType& t, bool output, const std::vector<std::pair<std::string, std::string>>& scope,
                       const std::string& origin) {
  BasePtr b = t.base;
  if (b->kind == BaseKind::Record) {
    std::vector<FieldType> fs;
    for (auto& f : b->fields) fs.push_back({f.name, templ(f.type, output, scope, origin)});
    b = T::record(fs);
  } else if (b->kind == BaseKind::App) {
    std::vector<RefType> as;
    for (auto& a : b->args) as.push_back(templ(a, output, scope, origin));
    b = T::app(b->name, as);
  }
  ExprPtr p = t.pred;
  if (!p && output) {
    switch (b->kind) {
      case BaseKind::Int:
      case BaseKind::Bool:
      case BaseKind::TyVar:
      case BaseKind::App: p = E::kvar(newKappa(sortOf(b), scope, origin)); break;
      default: break;
    }
  }
  return RefType{b, p};
}

void Checker::mkTemplates() {
  for (auto& f : prog_.functions) {
    if (!f.schema) continue;
    Schema s = *f.schema;
    std::vector<std::pair<std::string, std::string>> scope;
    for (auto& [x, t] : s.args) scope.push_back({x, sortOf(t.base)});
    for (auto& e : s.inHeap.entries) scope.push_back({e.binder, sortOf(e.type.base)});
    for (auto& [x, t] : s.args) t = templ(t, false, scope, f.name + ":arg");
    for (auto& e : s.inHeap.entries) e.type = templ(e.type, false, scope, f.name + ":in");
    s.outType = templ(s.outType, true, scope, f.name + ":ret");
    auto oscope = scope;
    if (!s.outName.empty() && s.outType.base->kind != BaseKind::Void)
      oscope.push_back({s.outName, sortOf(s.outType.base)});
    for (auto& e : s.outHeap.entries) e.type = templ(e.type, true, oscope, f.name + ":out");
    tmpl_[f.name] = s;
  }
}

const Schema& Checker::schemaOf(const std::string& f, Span sp) const {
  static const Schema as = assertSchema();
  if (f == "assert") return as;
  auto it = tmpl_.find(f);
  if (it == tmpl_.end()) {
    if (prog_.findFunction(f)) throw InputError(sp, "function '" + f + "' has no signature");
    throw InputError(sp, "call to unknown function '" + f + "'");
  }
  return it->second;
}

std::vector<std::pair<std::string, std::string>> Checker::scopeOf(const World& w) const {
  std::vector<std::pair<std::string, std::string>> sc;
  std::set<std::string> seen;
  auto add = [&](const std::string& n, const BasePtr& b) {
    std::string so = sortOf(b);
    if (so == "void" || !seen.insert(n).second) return;
    sc.push_back({n, so});
  };
  for (auto it = w.gamma.entries.rbegin(); it != w.gamma.entries.rend(); ++it)
    if (it->kind != EnvEntry::Guard) add(it->name, it->type.base);
  for (auto& h : w.sigma.entries) add(h.binder, h.type.base);
  std::sort(sc.begin(), sc.end());
  return sc;
}

RefType Checker::kappaType(const BasePtr& shape, const std::vector<std::pair<std::string, std::string>>& scope,
                           const std::string& origin) {
  switch (shape->kind) {
    case BaseKind::Int:
    case BaseKind::Bool:
    case BaseKind::TyVar: return RefType{shape, E::kvar(newKappa(sortOf(shape), scope, origin))};
    case BaseKind::App: {
      std::vector<RefType> as;
      for (auto& a : shape->args) as.push_back(kappaType(a.base, scope, origin));
      auto b = T::app(shape->name, as);
      return RefType{b, E::kvar(newKappa(sortOf(b), scope, origin))};
    }
    case BaseKind::Record: {
      std::vector<FieldType> fs;
      for (auto& f : shape->fields) fs.push_back({f.name, kappaType(f.type.base, scope, origin)});
      return RefType{T::record(fs), nullptr};
    }
    default: return RefType{shape, nullptr};
  }
}

// ---------------------------------------------------------------- clauses

void Checker::emit(const World& w, const ExprPtr& lhs, const std::vector<ExprPtr>& head, const std::string& nuSort,
                   const std::vector<ExprPtr>& extra, const std::string& tag, Span sp) {
  if (!opt_.emit) return;
  std::vector<ExprPtr> concrete, kappas;
  for (auto& h : head) {
    for (auto& c : conjuncts(h)) {
      if (isTrue(c)) continue;
      (c->kind == ExprKind::KVar ? kappas : concrete).push_back(c);
    }
  }
  if (concrete.empty() && kappas.empty()) return;
  HornClause base;
  base.hyps = hypotheses(w);
  for (auto& e : extra)
    if (e && !isTrue(e)) base.hyps.push_back(e);
  base.lhs = lhs ? lhs : E::tt();
  base.nuSort = nuSort;
  base.tag = tag;
  base.fn = fn_ ? fn_->name : "";
  base.span = sp;
  for (auto& e : w.gamma.entries)
    if (e.kind != EnvEntry::Guard) base.sorts[e.name] = sortOf(e.type.base);
  for (auto& h : w.sigma.entries) base.sorts[h.binder] = sortOf(h.type.base);
  base.sorts[kNu] = nuSort;
  for (auto& k : kappas) {
    HornClause c = base;
    c.id = ++nextClause_;
    c.head = k;
    cs_.clauses.push_back(std::move(c));
  }
  if (!concrete.empty()) {
    HornClause c = base;
    c.id = ++nextClause_;
    c.head = E::conj(concrete);
    cs_.clauses.push_back(std::move(c));
  }
}

void Checker::subCon(const World& w, const RefType& t1, const RefType& t2, const ExprPtr& self,
                     const std::vector<ExprPtr>& extra, const std::string& tag, Span sp) {
  const BasePtr& b1 = t1.base;
  const BasePtr& b2 = t2.base;
  auto mismatch = [&]() {
    throw InputError(sp, "type mismatch: " + show(erase(t1)) + " is not a subtype of " + show(erase(t2)));
  };
  auto selfEq = [&]() -> ExprPtr { return self ? nuIs(self) : nullptr; };
  if (b2->kind == BaseKind::Record) {
    if (b1->kind != BaseKind::Record || b1->fields.size() != b2->fields.size()) mismatch();
    for (size_t i = 0; i < b2->fields.size(); i++) {
      if (b1->fields[i].name != b2->fields[i].name) mismatch();
      subCon(w, b1->fields[i].type, b2->fields[i].type, self ? E::field(self, b1->fields[i].name) : nullptr, extra,
             tag, sp);
    }
    if (t2.pred && !isTrue(t2.pred)) emit(w, E::conj({t1.pred, selfEq()}), {t2.pred}, "rec", extra, tag, sp);
    return;
  }
  if (b2->kind == BaseKind::App) {
    if (b1->kind != BaseKind::App || b1->name != b2->name || b1->args.size() != b2->args.size()) mismatch();
    for (size_t i = 0; i < b2->args.size(); i++) subCon(w, b1->args[i], b2->args[i], nullptr, extra, tag, sp);
    if (t2.pred && !isTrue(t2.pred)) emit(w, E::conj({t1.pred, selfEq()}), {t2.pred}, sortOf(b2), extra, tag, sp);
    return;
  }
  if (!physSub(b1, b2)) mismatch();
  if (isPtr(b1) && isPtr(b2) && b1->name != b2->name) mismatch();
  std::vector<ExprPtr> head;
  if (t2.pred) head.push_back(t2.pred);
  if (b2->kind == BaseKind::Ref && b1->kind == BaseKind::MaybeRef) head.push_back(E::ne(E::nu(), E::null()));
  if (b1->kind == BaseKind::Null && b2->kind == BaseKind::MaybeRef) head.push_back(nuIs(E::loc(b2->name)));
  ExprPtr lhs = E::conj({t1.pred, facts(E::nu(), RefType{b1, nullptr}), selfEq()});
  emit(w, lhs, head, sortOf(b2), extra, tag, sp);
}

// ---------------------------------------------------------------- locations

std::string Checker::resolveLoc(const World& w, const std::string& name) const {
  auto* e = w.gamma.lookup(name);
  if (e && isPtr(e->type.base)) return e->type.base->name;
  return name;
}

std::string Checker::displayLoc(const World& w, const std::string& loc) const {
  for (auto& e : w.gamma.entries) {
    if (e.kind != EnvEntry::Bind || !isPtr(e.type.base) || e.type.base->name != loc) continue;
    if (!progIdents_.count(e.name)) continue;  // renamed-apart binding
    auto* cur = w.gamma.lookup(e.name);
    if (cur && isPtr(cur->type.base) && cur->type.base->name == loc) return e.name;
  }
  return loc;
}

void Checker::materializePad(World& w, const std::string& loc, const RefType& t) {
  w.pads.erase(std::remove(w.pads.begin(), w.pads.end(), loc), w.pads.end());
  w.sigma.put({loc, names_.indexed(loc), t});
}

std::string Checker::takePad(World& w, Span sp, const std::string& why) {
  if (w.pads.empty()) throw InputError(sp, why);
  auto p = w.pads.front();
  return p;
}

ExprPtr Checker::measureFacts(const std::string& ctor, const ExprPtr& root, const std::string&,
                              const std::function<ExprPtr(const std::string&)>& fieldTerm) const {
  std::vector<ExprPtr> parts;
  for (auto* m : prog_.measuresOf(ctor)) {
    std::function<ExprPtr(const ExprPtr&)> rw = [&](const ExprPtr& e) -> ExprPtr {
      if (e->kind == ExprKind::Field && e->args[0]->kind == ExprKind::Var && e->args[0]->name == m->param)
        return fieldTerm(e->name);
      if (e->kind == ExprKind::Var && e->name == m->param) return root;
      if (e->args.empty()) return e;
      Expr c = *e;
      for (auto& a : c.args) a = rw(a);
      return std::make_shared<const Expr>(std::move(c));
    };
    parts.push_back(E::eq(E::measure(m->name, root), rw(m->consBody)));
  }
  return E::conj(parts);
}

// ---------------------------------------------------------------- worlds

World Checker::entry(const Function& f) {
  fn_ = &f;
  names_ = base_;
  auto it = tmpl_.find(f.name);
  if (it == tmpl_.end()) throw InputError(f.span, "function '" + f.name + "' has no signature");
  const Schema& s = it->second;
  World w;
  for (auto& [x, t] : s.args) {
    w.gamma.bind(x, t);
    w.params[x] = x;
  }
  w.sigma = s.inHeap;
  w.locs.idents.insert(progIdents_.begin(), progIdents_.end());
  for (auto& l : s.locParams) w.locs.used.insert(l);
  w.U.clear();
  return w;
}

void Checker::exec(World& w, const Block& b) {
  for (auto& s : b) {
    if (w.bottom) break;
    if (onStmt) onStmt(w, *s);
    if (s->kind == StmtKind::If) {
      auto [a, e] = branch(w, s->e);
      exec(a, s->thenB);
      exec(e, s->elseB);
      w = join(w, std::move(a), std::move(e), s->span);
    } else {
      step(w, *s);
    }
  }
}

std::pair<World, World> Checker::branch(const World& w, const ExprPtr& cond) const {
  World a = w, b = w;
  a.gamma.guard(cond);
  b.gamma.guard(E::notE(cond));
  return {a, b};
}

World Checker::join(const World& pre, World a, World b, Span sp) {
  if (a.bottom) {
    if (b.bottom) return a;
    b.locs.merge(a.locs);
    return b;
  }
  if (b.bottom) {
    a.locs.merge(b.locs);
    return a;
  }
  auto matPads = [&](World& x, const World& other) {
    auto pads = x.pads;
    for (auto& p : pads) {
      if (auto* o = other.sigma.find(p))
        materializePad(x, p, erase(o->type));
    }
    x.pads.clear();
  };
  matPads(a, b);
  matPads(b, a);
  // variables (re)bound in a branch and visible in both
  std::vector<std::string> names;
  auto collect = [&](const World& x, const World& other) {
    for (size_t i = pre.gamma.entries.size(); i < x.gamma.entries.size(); i++) {
      auto& e = x.gamma.entries[i];
      if (e.kind != EnvEntry::Bind || std::find(names.begin(), names.end(), e.name) != names.end()) continue;
      if (other.gamma.lookup(e.name)) names.push_back(e.name);
    }
  };
  collect(a, b);
  collect(b, a);
  World j;
  j.gamma = pre.gamma;
  j.params = pre.params;
  j.locs = a.locs;
  j.locs.merge(b.locs);
  // join kappas may only mention names that mean the same thing in both branches
  auto scope = scopeOf(pre);
  scope.erase(std::remove_if(scope.begin(), scope.end(),
                             [&](auto& v) { return std::find(names.begin(), names.end(), v.first) != names.end(); }),
              scope.end());
  for (auto& ea : a.sigma.entries) {
    auto* eb = b.sigma.find(ea.loc);
    if (!eb) continue;
    if (ea.binder == eb->binder) {
      j.sigma.put(ea);
      continue;
    }
    auto shape = joinShape(ea.type.base, eb->type.base);
    if (!shape)
      throw InputError(sp, "branches disagree on the shape of &" + ea.loc + ": " + show(erase(ea.type)) + " vs " +
                               show(erase(eb->type)));
    auto t = kappaType(shape, scope, "join");
    auto nb = names_.indexed(ea.loc);
    auto nz = E::ne(E::loc(ea.loc), E::null());
    subCon(a, ea.type, t, E::var(ea.binder), {nz}, "join", sp);
    subCon(b, eb->type, t, E::var(eb->binder), {nz}, "join", sp);
    j.sigma.put({ea.loc, nb, t});
  }
  // pre-if cells the join replaced: their old binders stay meaningful
  for (auto& e : pre.sigma.entries) {
    auto* now = j.sigma.find(e.loc);
    if (!now || now->binder != e.binder) j.gamma.ghost(e.binder, e.loc, e.type);
  }
  for (auto& x : names) {
    auto* la = a.gamma.lookup(x);
    auto* lb = b.gamma.lookup(x);
    // a location shared by both branches needs both to agree; pointers into dropped cells are dropped too
    auto shape = joinShape(la->type.base, lb->type.base);
    if (!shape) throw InputError(sp, "branches give '" + x + "' different shapes");
    std::set<std::string> fv;
    typeFreeVars(la->type, fv);
    if (sameType(la->type, lb->type) && fv.empty()) {
      rebind(j, x, la->type);
      continue;
    }
    auto t = kappaType(shape, scope, "join");
    subCon(a, la->type, t, E::var(x), {}, "join", sp);
    subCon(b, lb->type, t, E::var(x), {}, "join", sp);
    rebind(j, x, t);
  }
  for (auto& u : a.U)
    if (b.U.count(u)) j.U.insert(u);
  for (auto& [l, c] : a.unfoldCtor) {
    auto it = b.unfoldCtor.find(l);
    if (it != b.unfoldCtor.end() && it->second == c && j.sigma.has(l)) j.unfoldCtor[l] = c;
  }
  return j;
}

void Checker::rebind(World& w, const std::string& x, RefType t) {
  if (w.gamma.lookup(x)) {
    Subst s;
    s.vars[x] = E::var(names_.fresh(x));
    for (auto& e : w.gamma.entries) {
      if (e.kind == EnvEntry::Guard) {
        e.guard = subst(e.guard, s);
        continue;
      }
      if (e.kind == EnvEntry::Bind && e.name == x) e.name = s.vars[x]->name;
      e.type = subst(e.type, s);
    }
    for (auto& h : w.sigma.entries) h.type = subst(h.type, s);
    for (auto& [p, n] : w.params)
      if (n == x) n = s.vars[x]->name;
    t = subst(t, s);
  }
  w.gamma.bind(x, std::move(t));
}

void Checker::finish(World& w, Span sp) {
  if (!w.bottom) doReturn(w, nullptr, sp);
}

// ---------------------------------------------------------------- statements

void Checker::step(World& w, const Stmt& s) {
  Span sp = s.span;
  switch (s.kind) {
    case StmtKind::Assign: {
      auto b = typeOfExpr(w.gamma, s.e, sp);
      rebind(w, s.x, RefType{b, nuIs(s.e)});
      break;
    }
    case StmtKind::Read: {
      const std::string& x = s.e->name;
      auto* e = w.gamma.lookup(x);
      if (!e) throw InputError(sp, "unbound variable '" + x + "'");
      if (e->type.base->kind == BaseKind::MaybeRef)
        throw InputError(sp, "read through possibly-null reference '" + x + "' (missing conc)");
      if (e->type.base->kind != BaseKind::Ref) throw InputError(sp, "field read on non-reference '" + x + "'");
      auto L = e->type.base->name;
      auto* h = w.sigma.find(L);
      if (!h) throw InputError(sp, "location &" + L + " of '" + x + "' is not in the heap");
      if (h->type.base->kind != BaseKind::Record)
        throw InputError(sp, "location &" + L + " holds " + show(erase(h->type)) + ", not a record (missing unfold)");
      auto* f = findField(*h->type.base, s.f);
      if (!f) throw InputError(sp, "record at &" + L + " has no field '" + s.f + "'");
      rebind(w, s.x, RefType{f->type.base, addConj(f->type.pred, nuIs(E::field(E::var(h->binder), s.f)))});
      break;
    }
    case StmtKind::Write: {
      auto* e = w.gamma.lookup(s.x);
      if (!e) throw InputError(sp, "unbound variable '" + s.x + "'");
      if (e->type.base->kind == BaseKind::MaybeRef)
        throw InputError(sp, "write through possibly-null reference '" + s.x + "' (missing conc)");
      if (e->type.base->kind != BaseKind::Ref) throw InputError(sp, "field write on non-reference '" + s.x + "'");
      auto L = e->type.base->name;
      auto* h = w.sigma.find(L);
      if (!h) throw InputError(sp, "location &" + L + " of '" + s.x + "' is not in the heap");
      if (h->type.base->kind != BaseKind::Record)
        throw InputError(sp, "location &" + L + " holds " + show(erase(h->type)) + ", not a record (missing unfold)");
      if (!findField(*h->type.base, s.f)) throw InputError(sp, "record at &" + L + " has no field '" + s.f + "'");
      auto be = typeOfExpr(w.gamma, s.e, sp);
      auto zn = names_.indexed(L);
      std::vector<FieldType> fs;
      for (auto& f : h->type.base->fields) {
        if (f.name == s.f)
          fs.push_back({f.name, RefType{be, nuIs(s.e)}});
        else
          fs.push_back({f.name, RefType{f.type.base, addConj(f.type.pred, nuIs(E::field(E::var(h->binder), f.name)))}});
      }
      w.gamma.ghost(h->binder, L, h->type);
      h = w.sigma.find(L);
      h->binder = zn;
      h->type = RefType{T::record(fs), nullptr};
      break;
    }
    case StmtKind::Alloc: {
      auto L = w.locs.fresh(s.x, true);
      auto z = names_.indexed(L);
      std::vector<FieldType> fs;
      std::set<std::string> seen;
      for (auto& [f, e] : s.fields) {
        if (!seen.insert(f).second) throw InputError(sp, "duplicate field '" + f + "'");
        fs.push_back({f, RefType{typeOfExpr(w.gamma, e, sp), nuIs(e)}});
      }
      w.sigma.put({L, z, nameFields(z, RefType{T::record(fs), nullptr})});
      rebind(w, s.x, T::mk(T::ref(L)));
      break;
    }
    case StmtKind::Call: doCall(w, s); break;
    case StmtKind::Return: doReturn(w, &s, sp); break;
    case StmtKind::Unfold: doUnfold(w, resolveLoc(w, s.x), sp); break;
    case StmtKind::Fold: doFold(w, resolveLoc(w, s.x), sp); break;
    case StmtKind::Conc: doConc(w, s.x, sp); break;
    case StmtKind::Pad: {
      if (w.sigma.has(s.x)) throw InputError(sp, "pad: location &" + s.x + " is already in the heap");
      w.locs.used.insert(s.x);
      w.pads.push_back(s.x);
      w.gamma.guard(E::eq(E::loc(s.x), E::null()));
      break;
    }
    case StmtKind::If: {
      auto [a, e] = branch(w, s.e);
      exec(a, s.thenB);
      exec(e, s.elseB);
      w = join(w, std::move(a), std::move(e), sp);
      break;
    }
  }
}

void Checker::doConc(World& w, const std::string& x, Span sp) {
  auto* e = w.gamma.lookup(x);
  if (!e || !isPtr(e->type.base)) throw InputError(sp, "conc: '" + x + "' is not a reference");
  auto base = e->type.base;
  auto L = base->name;
  emit(w, E::conj({nuIs(E::var(x)), facts(E::nu(), RefType{base, nullptr})}), {E::ne(E::nu(), E::null())}, "ptr",
       {}, "conc", sp);
  auto* h = w.sigma.find(L);
  if (!h) throw InputError(sp, "conc: location &" + L + " is not in the heap");
  auto y = h->binder;
  auto t = h->type;
  w.gamma.bind(y, t);
  rebind(w, x, RefType{T::ref(L), nuIs(E::var(x))});
  h = w.sigma.find(L);
  h->binder = names_.indexed(L);
  h->type = selfAt(y, t);
}

void Checker::addHeap(World& w, const std::string& loc) {
  bool nonNull = false;
  std::set<std::string> seen;
  for (auto it = w.gamma.entries.rbegin(); it != w.gamma.entries.rend(); ++it) {
    if (it->kind != EnvEntry::Bind || !seen.insert(it->name).second) continue;
    if (it->type.base->kind == BaseKind::Ref && it->type.base->name == loc) nonNull = true;
  }
  if (!nonNull) return;
  auto* h = w.sigma.find(loc);
  if (!h) return;
  auto y = h->binder;
  auto t = h->type;
  w.gamma.bind(y, t);
  h = w.sigma.find(loc);
  h->binder = names_.indexed(loc);
  h->type = selfAt(y, t);
}

void Checker::doUnfold(World& w, const std::string& L, Span sp) {
  auto* h = w.sigma.find(L);
  if (!h) throw InputError(sp, "unfold: location &" + L + " is not in the heap");
  if (h->type.base->kind != BaseKind::App)
    throw InputError(sp, "unfold: &" + L + " holds " + show(erase(h->type)) + ", not a type application");
  const std::string C = h->type.base->name;
  auto* def = prog_.findType(C);
  if (!def) throw InputError(sp, "unfold: unknown type '" + C + "'");
  std::map<std::string, RefType> tys;
  for (size_t i = 0; i < def->params.size() && i < h->type.base->args.size(); i++)
    tys[def->params[i]] = h->type.base->args[i];
  Subst s;
  std::map<std::string, std::string> exBinder;  // definition location -> new binder
  for (auto& e : def->exHeap.entries) {
    auto nl = w.locs.fresh(e.loc);
    s.locs[e.loc] = nl;
    auto nb = names_.indexed(nl);
    s.vars[e.binder] = E::var(nb);
    exBinder[e.loc] = nb;
  }
  auto x1 = names_.indexed(L);
  s.vars[def->rootBinder] = E::var(x1);
  auto root = nameFields(x1, subst(substTy(def->root, tys), s));
  auto ex = subst(substTy(def->exHeap, tys), s);
  auto oldB = h->binder;
  auto oldT = h->type;
  auto fieldTerm = [&](const std::string& f) -> ExprPtr {
    auto* df = findField(*def->root.base, f);
    if (df && isPtr(df->type.base) && exBinder.count(df->type.base->name))
      return E::var(exBinder[df->type.base->name]);
    return E::field(E::var(x1), f);
  };
  auto mf = measureFacts(C, E::var(oldB), "", fieldTerm);
  w.gamma.ghost(oldB, L, oldT);
  if (!isTrue(mf)) w.gamma.guard(E::implies(E::ne(E::loc(L), E::null()), mf));
  size_t pos = 0;
  for (; pos < w.sigma.entries.size(); pos++)
    if (w.sigma.entries[pos].loc == L) break;
  w.sigma.entries[pos].binder = x1;
  w.sigma.entries[pos].type = root;
  w.sigma.entries.insert(w.sigma.entries.begin() + static_cast<long>(pos) + 1, ex.entries.begin(), ex.entries.end());
  w.U.insert({L, C});
  w.unfoldCtor[L] = C;
}

void Checker::doFold(World& w, const std::string& L, Span sp) {
  auto* h = w.sigma.find(L);
  if (!h) throw InputError(sp, "fold: location &" + L + " is not in the heap");
  if (h->type.base->kind != BaseKind::Record)
    throw InputError(sp, "fold: &" + L + " holds " + show(erase(h->type)) + ", not a record");
  const std::string z = h->binder;
  const RefType R = h->type;
  std::string C;
  auto uc = w.unfoldCtor.find(L);
  if (uc != w.unfoldCtor.end()) {
    C = uc->second;
  } else {
    std::set<std::string> have;
    for (auto& f : R.base->fields) have.insert(f.name);
    for (auto& d : prog_.types) {
      std::set<std::string> want;
      for (auto& f : d.root.base->fields) want.insert(f.name);
      if (want == have) {
        if (!C.empty()) throw InputError(sp, "fold: record at &" + L + " matches both '" + C + "' and '" + d.name + "'");
        C = d.name;
      }
    }
    if (C.empty()) throw InputError(sp, "fold: no type definition matches the record at &" + L);
  }
  auto* def = prog_.findType(C);
  if (!def) throw InputError(sp, "fold: unknown type '" + C + "'");
  Unifier u;
  for (auto& e : def->exHeap.entries) u.locVars.insert(e.loc);
  u.tyVars.insert(def->params.begin(), def->params.end());
  if (!u.unify(def->root.base, R.base))
    throw InputError(sp, "fold: record at &" + L + " does not match the definition of '" + C + "'");
  std::map<std::string, std::string> consumed;  // definition location -> actual location
  for (auto& e : def->exHeap.entries) {
    auto it = u.locs.find(e.loc);
    if (it == u.locs.end()) continue;
    auto* t = w.sigma.find(it->second);
    if (!t) throw InputError(sp, "fold: location &" + it->second + " reachable from &" + L + " is not in the heap");
    if (t->type.base->kind != BaseKind::App)
      throw InputError(sp, "fold: &" + it->second + " must be folded before &" + L);
    if (!u.unify(e.type.base, t->type.base))
      throw InputError(sp, "fold: &" + it->second + " does not match the definition of '" + C + "'");
    consumed[e.loc] = it->second;
  }
  auto scope = scopeOf(w);
  std::map<std::string, RefType> tys;
  std::vector<RefType> tyArgs;
  for (auto& a : def->params) {
    auto it = u.tys.find(a);
    BasePtr b = it == u.tys.end() ? T::intB() : it->second;
    auto t = kappaType(b, scope, "fold");
    tys[a] = t;
    tyArgs.push_back(t);
  }
  Subst s;
  std::map<std::string, ExprPtr> exTerm;  // definition location -> binder term of the consumed tail
  for (auto& e : def->exHeap.entries) {
    auto it = consumed.find(e.loc);
    if (it != consumed.end()) {
      s.locs[e.loc] = it->second;
      auto b = w.sigma.find(it->second)->binder;
      s.vars[e.binder] = E::var(b);
      exTerm[e.loc] = E::var(b);
    } else {
      auto nl = w.locs.fresh(e.loc);
      s.locs[e.loc] = nl;
      s.vars[e.binder] = E::null();
      exTerm[e.loc] = E::null();
      w.gamma.guard(E::eq(E::loc(nl), E::null()));
    }
  }
  s.vars[def->rootBinder] = E::var(z);
  auto defRoot = subst(substTy(def->root, tys), s);
  auto nz = E::ne(E::loc(L), E::null());
  for (size_t i = 0; i < R.base->fields.size(); i++) {
    auto& fa = R.base->fields[i];
    auto* fd = findField(*defRoot.base, fa.name);
    auto* fo = findField(*def->root.base, fa.name);
    auto fterm = E::field(E::var(z), fa.name);
    subCon(w, fa.type, fd->type, fterm, {nz}, "fold", sp);
    if (!isPtr(fo->type.base)) continue;
    auto it = consumed.find(fo->type.base->name);
    if (it == consumed.end()) continue;
    const HeapEntry* ex = nullptr;
    for (auto& e : def->exHeap.entries)
      if (e.loc == fo->type.base->name) ex = &e;
    auto* stored = w.sigma.find(it->second);
    auto want = subst(substTy(ex->type, tys), s);
    std::vector<ExprPtr> extra{nz};
    if (fo->type.base->kind == BaseKind::MaybeRef && opt_.foldNullGuard) extra.push_back(E::ne(fterm, E::null()));
    subCon(w, stored->type, want, E::var(stored->binder), extra, "fold", sp);
  }
  auto fieldTerm = [&](const std::string& f) -> ExprPtr {
    auto* fo = findField(*def->root.base, f);
    if (fo && isPtr(fo->type.base) && exTerm.count(fo->type.base->name)) return exTerm[fo->type.base->name];
    return E::field(E::var(z), f);
  };
  auto mf = measureFacts(C, E::nu(), "", fieldTerm);
  auto y = names_.indexed(L);
  w.gamma.ghost(z, L, R);
  for (auto& [dl, al] : consumed) {
    auto* t = w.sigma.find(al);
    w.gamma.ghost(t->binder, al, t->type);
    w.sigma.remove(al);
    w.unfoldCtor.erase(al);
    for (auto it = w.U.begin(); it != w.U.end();) it = it->first == al ? w.U.erase(it) : std::next(it);
  }
  h = w.sigma.find(L);
  h->binder = y;
  h->type = RefType{T::app(C, tyArgs), isTrue(mf) ? nullptr : mf};
  w.unfoldCtor.erase(L);
  for (auto it = w.U.begin(); it != w.U.end();) it = it->first == L ? w.U.erase(it) : std::next(it);
}

// ---------------------------------------------------------------- calls and returns

namespace {

std::string mapLoc(const Unifier& u, const std::string& l) {
  if (!u.locVars.count(l)) return l;
  auto it = u.locs.find(l);
  return it == u.locs.end() ? "" : it->second;
}

// propagate location bindings through the heap; strict mode reports clashes
void matchHeap(Unifier& u, const Heap& formal, const Heap& actual, bool strict, Span sp, const std::string& what) {
  std::set<std::string> done;
  for (bool progress = true; progress;) {
    progress = false;
    for (auto& e : formal.entries) {
      if (done.count(e.loc)) continue;
      auto l = mapLoc(u, e.loc);
      if (l.empty()) continue;
      done.insert(e.loc);
      progress = true;
      auto* a = actual.find(l);
      if (!a) {
        if (strict) throw InputError(sp, what + ": location &" + l + " is not in the heap");
        continue;
      }
      if (!u.unify(e.type.base, a->type.base) && strict)
        throw InputError(sp, what + ": &" + l + " holds " + show(erase(a->type)) + " but " + show(erase(e.type)) +
                                 " is required");
    }
  }
}

ExprPtr prunePending(const ExprPtr& e, const std::map<int, KappaInfo>& ks) {
  if (!e) return e;
  if (e->kind == ExprKind::KVar) {
    auto it = ks.find(e->kappa);
    if (it == ks.end()) return e;
    VarSubst p;
    for (auto& [k, v] : e->pending) {
      bool keep = k == kNu;
      for (auto& [n, so] : it->second.scope)
        if (n == k) keep = true;
      if (keep) p[k] = v;
    }
    return E::kvar(e->kappa, p);
  }
  if (e->args.empty()) return e;
  Expr c = *e;
  for (auto& a : c.args) a = prunePending(a, ks);
  return std::make_shared<const Expr>(std::move(c));
}

}  // namespace

Checker::Match Checker::matchCall(const World& w, const Stmt& s) const {
  const Schema& S = schemaOf(s.f, s.span);
  Unifier u;
  u.locVars.insert(S.locParams.begin(), S.locParams.end());
  u.tyVars.insert(S.tyParams.begin(), S.tyParams.end());
  for (size_t i = 0; i < S.args.size() && i < s.args.size(); i++)
    u.unify(S.args[i].second.base, typeOfExpr(w.gamma, s.args[i], s.span));
  matchHeap(u, S.inHeap, w.sigma, false, s.span, "");
  Match m;
  for (auto& e : S.inHeap.entries) {
    auto l = mapLoc(u, e.loc);
    if (l.empty() || !w.sigma.has(l))
      m.missing.push_back(e.loc);
    else
      m.target.entries.push_back({l, "", erase(e.type)});
  }
  return m;
}

Checker::Match Checker::matchReturn(const World& w, const Stmt* s) const {
  const Schema& S = tmpl_.at(fn_->name);
  Unifier u;
  u.locVars.insert(S.outLocs.begin(), S.outLocs.end());
  if (s && s->e) u.unify(S.outType.base, typeOfExpr(w.gamma, s->e, s->span));
  matchHeap(u, S.outHeap, w.sigma, false, s ? s->span : Span{}, "");
  Match m;
  for (auto& e : S.outHeap.entries) {
    auto l = mapLoc(u, e.loc);
    if (l.empty() || !w.sigma.has(l))
      m.missing.push_back(e.loc);
    else
      m.target.entries.push_back({l, "", erase(e.type)});
  }
  return m;
}

void Checker::doCall(World& w, const Stmt& s) {
  Span sp = s.span;
  const Schema& S = schemaOf(s.f, sp);
  if (S.args.size() != s.args.size())
    throw InputError(sp, "call to '" + s.f + "' passes " + std::to_string(s.args.size()) + " arguments, expected " +
                             std::to_string(S.args.size()));
  Unifier u;
  u.locVars.insert(S.locParams.begin(), S.locParams.end());
  u.tyVars.insert(S.tyParams.begin(), S.tyParams.end());
  std::vector<BasePtr> argTys;
  for (size_t i = 0; i < s.args.size(); i++) {
    auto a = typeOfExpr(w.gamma, s.args[i], sp);
    argTys.push_back(a);
    if (!u.unify(S.args[i].second.base, a))
      throw InputError(sp, "argument " + std::to_string(i + 1) + " of '" + s.f + "': expected " +
                               show(erase(S.args[i].second)) + ", got " + show(a));
  }
  matchHeap(u, S.inHeap, w.sigma, true, sp, "call to '" + s.f + "'");
  Subst th;
  std::vector<std::pair<std::string, const HeapEntry*>> padded;  // pad location, formal entry
  for (auto& e : S.inHeap.entries) {
    if (!mapLoc(u, e.loc).empty()) continue;
    auto p = takePad(w, sp, "call to '" + s.f + "' needs a cell for &" + e.loc + " but none is available (missing pad)");
    w.pads.erase(w.pads.begin());
    u.locs[e.loc] = p;
    padded.push_back({p, &e});
  }
  for (auto& lp : S.locParams) {
    if (u.locs.count(lp)) continue;
    auto n = w.locs.fresh(lp);
    w.gamma.guard(E::eq(E::loc(n), E::null()));
    u.locs[lp] = n;
  }
  auto scope = scopeOf(w);
  std::map<std::string, RefType> tys;
  for (auto& a : S.tyParams) {
    auto it = u.tys.find(a);
    tys[a] = kappaType(it == u.tys.end() ? T::intB() : it->second, scope, "inst");
  }
  th.locs = u.locs;
  for (size_t i = 0; i < S.outLocs.size(); i++) {
    auto n = i == 0 ? w.locs.fresh(s.x.empty() ? s.f : s.x, !s.x.empty()) : w.locs.fresh(S.outLocs[i]);
    th.locs[S.outLocs[i]] = n;
  }
  for (size_t i = 0; i < S.args.size(); i++) th.vars[S.args[i].first] = s.args[i];
  for (auto& [p, e] : padded) th.vars[e->binder] = E::var(names_.indexed(p));
  for (auto& e : S.inHeap.entries) {
    auto l = th.locs[e.loc];
    if (auto* a = w.sigma.find(l)) th.vars[e.binder] = E::var(a->binder);
  }
  std::map<std::string, std::string> outBinder;
  for (auto& e : S.outHeap.entries) {
    auto nb = names_.indexed(th.locs.count(e.loc) ? th.locs[e.loc] : e.loc);
    outBinder[e.loc] = nb;
    th.vars[e.binder] = E::var(nb);
  }
  if (!S.outName.empty() && !s.x.empty()) th.vars[S.outName] = E::var(s.x);
  auto inst = [&](const RefType& t) {
    auto r = subst(substTy(t, tys), th);
    return mapPreds(r, [&](const ExprPtr& p) { return prunePending(p, cs_.kappas); });
  };
  for (auto& [p, e] : padded) w.sigma.put({p, th.vars[e->binder]->name, inst(e->type)});
  for (size_t i = 0; i < s.args.size(); i++)
    subCon(w, RefType{argTys[i], nullptr}, inst(S.args[i].second), s.args[i], {}, s.f == "assert" ? "assert" : "arg",
           sp);
  for (auto& e : S.inHeap.entries) {
    auto l = th.locs[e.loc];
    auto* a = w.sigma.find(l);
    subCon(w, a->type, inst(e.type), E::var(a->binder), {E::ne(E::loc(l), E::null())}, "call", sp);
  }
  for (auto& e : S.inHeap.entries) {
    auto l = th.locs[e.loc];
    auto* a = w.sigma.find(l);
    w.gamma.ghost(a->binder, l, a->type);
    w.sigma.remove(l);
    w.unfoldCtor.erase(l);
    for (auto it = w.U.begin(); it != w.U.end();) it = it->first == l ? w.U.erase(it) : std::next(it);
  }
  if (!s.x.empty()) {
    if (S.outType.base->kind == BaseKind::Void) throw InputError(sp, "'" + s.f + "' returns no value");
    rebind(w, s.x, inst(S.outType));
  }
  std::vector<std::string> outLocs;
  for (auto& e : S.outHeap.entries) {
    auto l = th.locs.count(e.loc) ? th.locs[e.loc] : e.loc;
    w.sigma.put({l, outBinder[e.loc], inst(e.type)});
    outLocs.push_back(l);
  }
  for (auto& l : outLocs) addHeap(w, l);
}

void Checker::doReturn(World& w, const Stmt* s, Span sp) {
  const Schema& S = tmpl_.at(fn_->name);
  ExprPtr e = s ? s->e : nullptr;
  Unifier u;
  u.locVars.insert(S.outLocs.begin(), S.outLocs.end());
  BasePtr A;
  if (e) {
    if (S.outType.base->kind == BaseKind::Void) throw InputError(sp, "'" + fn_->name + "' returns no value");
    A = typeOfExpr(w.gamma, e, sp);
    if (!u.unify(S.outType.base, A))
      throw InputError(sp, "return value: expected " + show(erase(S.outType)) + ", got " + show(A));
  } else if (S.outType.base->kind != BaseKind::Void) {
    throw InputError(sp, "'" + fn_->name + "' must return a value");
  }
  matchHeap(u, S.outHeap, w.sigma, true, sp, "return");
  Subst th;
  std::vector<std::pair<std::string, const HeapEntry*>> padded;
  for (auto& oe : S.outHeap.entries) {
    if (!mapLoc(u, oe.loc).empty()) continue;
    auto p = takePad(w, sp, "return needs a cell for &" + oe.loc + " but none is available (missing pad)");
    w.pads.erase(w.pads.begin());
    u.locs[oe.loc] = p;
    padded.push_back({p, &oe});
  }
  for (auto& ol : S.outLocs) {
    if (u.locs.count(ol)) continue;
    auto n = w.locs.fresh(ol);
    w.gamma.guard(E::eq(E::loc(n), E::null()));
    u.locs[ol] = n;
  }
  th.locs = u.locs;
  for (auto& [p, n] : w.params)
    if (p != n) th.vars[p] = E::var(n);
  if (!S.outName.empty() && e) th.vars[S.outName] = e;
  for (auto& [p, oe] : padded) th.vars[oe->binder] = E::var(names_.indexed(p));
  for (auto& oe : S.outHeap.entries) {
    auto l = mapLoc(u, oe.loc);
    if (auto* a = w.sigma.find(l)) th.vars[oe.binder] = E::var(a->binder);
  }
  auto inst = [&](const RefType& t) { return subst(t, th); };
  for (auto& [p, oe] : padded) w.sigma.put({p, th.vars[oe->binder]->name, inst(oe->type)});
  if (e) subCon(w, RefType{A, nullptr}, inst(S.outType), e, {}, "ret", sp);
  for (auto& oe : S.outHeap.entries) {
    auto l = mapLoc(u, oe.loc);
    auto* a = w.sigma.find(l);
    if (!a) throw InputError(sp, "return: location &" + l + " is not in the heap");
    subCon(w, a->type, inst(oe.type), E::var(a->binder), {E::ne(E::loc(l), E::null())}, "ret", sp);
  }
  w.bottom = true;
}

CgenResult generate(const Program& p, const CgenOptions& o) {
  Checker c(p, o);
  for (auto& f : p.functions) {
    auto w = c.entry(f);
    c.exec(w, f.body);
    c.finish(w, f.span);
  }
  return {c.constraints(), c.templates()};
}

}  // namespace art
