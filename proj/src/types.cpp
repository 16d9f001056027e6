#include "art/types.hpp"

#include <algorithm>
#include <sstream>

namespace art {

namespace T {
namespace {
BasePtr mkB(BaseType b) { return std::make_shared<const BaseType>(std::move(b)); }
}  // namespace
BasePtr intB() {
  static BasePtr b = mkB({BaseKind::Int});
  return b;
}
BasePtr boolB() {
  static BasePtr b = mkB({BaseKind::Bool});
  return b;
}
BasePtr voidB() {
  static BasePtr b = mkB({BaseKind::Void});
  return b;
}
BasePtr nullB() {
  static BasePtr b = mkB({BaseKind::Null});
  return b;
}
BasePtr tyvar(const std::string& a) { return mkB({BaseKind::TyVar, a}); }
BasePtr ref(const std::string& l) { return mkB({BaseKind::Ref, l}); }
BasePtr maybeRef(const std::string& l) { return mkB({BaseKind::MaybeRef, l}); }
BasePtr record(std::vector<FieldType> fs) {
  BaseType b{BaseKind::Record};
  b.fields = std::move(fs);
  return mkB(std::move(b));
}
BasePtr app(const std::string& c, std::vector<RefType> args) {
  BaseType b{BaseKind::App, c};
  b.args = std::move(args);
  return mkB(std::move(b));
}
RefType mk(BasePtr b, ExprPtr p) { return RefType{std::move(b), std::move(p)}; }
RefType self(BasePtr b, ExprPtr e) { return RefType{std::move(b), E::eq(E::nu(), std::move(e))}; }
}  // namespace T

bool isPtr(const BasePtr& b) { return b->kind == BaseKind::Ref || b->kind == BaseKind::MaybeRef; }

const FieldType* findField(const BaseType& b, const std::string& f) {
  for (auto& fld : b.fields)
    if (fld.name == f) return &fld;
  return nullptr;
}

bool sameShape(const BasePtr& a, const BasePtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->name != b->name) return false;
  if (a->fields.size() != b->fields.size() || a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->fields.size(); i++)
    if (a->fields[i].name != b->fields[i].name || !sameShape(a->fields[i].type.base, b->fields[i].type.base))
      return false;
  for (size_t i = 0; i < a->args.size(); i++)
    if (!sameShape(a->args[i].base, b->args[i].base)) return false;
  return true;
}

bool sameType(const RefType& a, const RefType& b) {
  if (!sameShape(a.base, b.base)) return false;
  if (!exprEqual(a.pred, b.pred)) return false;
  for (size_t i = 0; i < a.base->fields.size(); i++)
    if (!sameType(a.base->fields[i].type, b.base->fields[i].type)) return false;
  for (size_t i = 0; i < a.base->args.size(); i++)
    if (!sameType(a.base->args[i], b.base->args[i])) return false;
  return true;
}

BasePtr eraseB(const BasePtr& b) {
  if (b->kind == BaseKind::Record) {
    std::vector<FieldType> fs;
    for (auto& f : b->fields) fs.push_back({f.name, erase(f.type)});
    return T::record(fs);
  }
  if (b->kind == BaseKind::App) {
    std::vector<RefType> as;
    for (auto& a : b->args) as.push_back(erase(a));
    return T::app(b->name, as);
  }
  return b;
}

RefType erase(const RefType& t) { return RefType{eraseB(t.base), nullptr}; }

void locsOf(const BasePtr& b, std::set<std::string>& out) {
  if (isPtr(b)) out.insert(b->name);
  if (b->kind == BaseKind::Record)
    for (auto& f : b->fields) locsOf(f.type.base, out);
}

void locsDeep(const RefType& t, std::set<std::string>& out) {
  locsOf(t.base, out);
  freeLocs(t.pred, out);
  for (auto& f : t.base->fields) locsDeep(f.type, out);
  for (auto& a : t.base->args) locsDeep(a, out);
}

void typeFreeVars(const RefType& t, std::set<std::string>& out) {
  std::set<std::string> fv;
  freeVars(t.pred, fv);
  fv.erase(kNu);
  out.insert(fv.begin(), fv.end());
  for (auto& f : t.base->fields) typeFreeVars(f.type, out);
  for (auto& a : t.base->args) typeFreeVars(a, out);
}

std::string show(const BasePtr& b) {
  switch (b->kind) {
    case BaseKind::Int: return "int";
    case BaseKind::Bool: return "bool";
    case BaseKind::Void: return "void";
    case BaseKind::Null: return "null";
    case BaseKind::TyVar: return b->name;
    case BaseKind::Ref: return "ref(&" + b->name + ")";
    case BaseKind::MaybeRef: return "?ref(&" + b->name + ")";
    case BaseKind::Record: {
      std::string s = "{";
      for (size_t i = 0; i < b->fields.size(); i++) {
        if (i) s += ", ";
        s += b->fields[i].name + ": " + show(b->fields[i].type);
      }
      return s + "}";
    }
    case BaseKind::App: {
      std::string s = b->name;
      if (!b->args.empty()) {
        s += "[";
        for (size_t i = 0; i < b->args.size(); i++) {
          if (i) s += ", ";
          s += show(b->args[i]);
        }
        s += "]";
      }
      return s;
    }
  }
  return "?";
}

std::string show(const RefType& t) {
  if (isTrue(t.pred)) return show(t.base);
  return "{v: " + show(t.base) + " | " + show(t.pred) + "}";
}

const HeapEntry* Heap::find(const std::string& loc) const {
  for (auto& e : entries)
    if (e.loc == loc) return &e;
  return nullptr;
}
HeapEntry* Heap::find(const std::string& loc) {
  for (auto& e : entries)
    if (e.loc == loc) return &e;
  return nullptr;
}
void Heap::put(HeapEntry e) {
  if (auto* p = find(e.loc))
    *p = std::move(e);
  else
    entries.push_back(std::move(e));
}
void Heap::remove(const std::string& loc) {
  entries.erase(std::remove_if(entries.begin(), entries.end(), [&](auto& e) { return e.loc == loc; }),
                entries.end());
}
std::vector<std::string> Heap::dom() const {
  std::vector<std::string> d;
  for (auto& e : entries) d.push_back(e.loc);
  return d;
}

std::string show(const Heap& h) {
  if (h.entries.empty()) return "emp";
  std::string s;
  for (size_t i = 0; i < h.entries.size(); i++) {
    if (i) s += " * ";
    s += "&" + h.entries[i].loc + " |-> " + h.entries[i].binder + ": " + show(h.entries[i].type);
  }
  return s;
}

const EnvEntry* Env::lookup(const std::string& x) const {
  for (auto it = entries.rbegin(); it != entries.rend(); ++it)
    if (it->kind == EnvEntry::Bind && it->name == x) return &*it;
  return nullptr;
}

std::string show(const Schema& s) {
  std::string r = "(";
  for (size_t i = 0; i < s.args.size(); i++) {
    if (i) r += ", ";
    r += s.args[i].first + ": " + show(s.args[i].second);
  }
  r += ")";
  if (!s.inHeap.entries.empty()) r += " / " + show(s.inHeap);
  r += " => ";
  if (!s.outLocs.empty()) {
    r += "exists ";
    for (size_t i = 0; i < s.outLocs.size(); i++) r += (i ? ", &" : "&") + s.outLocs[i];
    r += ". ";
  }
  if (!s.outName.empty()) r += s.outName + ": ";
  r += show(s.outType);
  if (!s.outHeap.entries.empty()) r += " / " + show(s.outHeap);
  return r;
}

std::string show(const Qualifier& q) {
  std::string r = "qualif " + q.name + "(v: " + q.nuSort;
  for (auto& [n, s] : q.wildcards) r += ", " + n + ": " + s;
  return r + "): " + show(q.body);
}

namespace {
Subst dropNu(const Subst& s) {
  if (!s.vars.count(kNu)) return s;
  Subst r = s;
  r.vars.erase(kNu);
  return r;
}
}  // namespace

RefType subst(const RefType& t, const Subst& s0) {
  if (s0.empty()) return t;
  Subst s = dropNu(s0);
  BasePtr b = t.base;
  switch (b->kind) {
    case BaseKind::Ref:
    case BaseKind::MaybeRef: {
      auto it = s.locs.find(b->name);
      if (it != s.locs.end()) b = b->kind == BaseKind::Ref ? T::ref(it->second) : T::maybeRef(it->second);
      break;
    }
    case BaseKind::Record: {
      std::vector<FieldType> fs;
      for (auto& f : b->fields) fs.push_back({f.name, subst(f.type, s)});
      b = T::record(fs);
      break;
    }
    case BaseKind::App: {
      std::vector<RefType> as;
      for (auto& a : b->args) as.push_back(subst(a, s));
      b = T::app(b->name, as);
      break;
    }
    default: break;
  }
  return RefType{b, t.pred ? subst(t.pred, s) : nullptr};
}

Heap subst(const Heap& h, const Subst& s) {
  Heap r;
  for (auto& e : h.entries) {
    HeapEntry n = e;
    auto il = s.locs.find(e.loc);
    if (il != s.locs.end()) n.loc = il->second;
    auto ib = s.vars.find(e.binder);
    if (ib != s.vars.end() && ib->second->kind == ExprKind::Var) n.binder = ib->second->name;
    n.type = subst(e.type, s);
    r.entries.push_back(std::move(n));
  }
  return r;
}

RefType substTy(const RefType& t, const std::map<std::string, RefType>& tys) {
  if (tys.empty()) return t;
  const BasePtr& b = t.base;
  switch (b->kind) {
    case BaseKind::TyVar: {
      auto it = tys.find(b->name);
      if (it == tys.end()) return t;
      ExprPtr p = t.pred;
      ExprPtr q = it->second.pred;
      ExprPtr r = (!p && !q) ? nullptr : E::conj2(q ? q : E::tt(), p ? p : E::tt());
      return RefType{it->second.base, r};
    }
    case BaseKind::Record: {
      std::vector<FieldType> fs;
      for (auto& f : b->fields) fs.push_back({f.name, substTy(f.type, tys)});
      return RefType{T::record(fs), t.pred};
    }
    case BaseKind::App: {
      std::vector<RefType> as;
      for (auto& a : b->args) as.push_back(substTy(a, tys));
      return RefType{T::app(b->name, as), t.pred};
    }
    default: return t;
  }
}

Heap substTy(const Heap& h, const std::map<std::string, RefType>& tys) {
  Heap r = h;
  for (auto& e : r.entries) e.type = substTy(e.type, tys);
  return r;
}

RefType nameFields(const std::string& z, const RefType& rec) {
  if (rec.base->kind != BaseKind::Record) return rec;
  std::vector<FieldType> fs;
  for (auto& f : rec.base->fields) {
    ExprPtr link = E::eq(E::nu(), E::field(E::var(z), f.name));
    bool have = false;
    for (auto& c : conjuncts(f.type.pred))
      if (exprEqual(c, link)) have = true;
    ExprPtr p = have ? f.type.pred : f.type.pred ? E::conj2(f.type.pred, link) : link;
    fs.push_back({f.name, RefType{f.type.base, p}});
  }
  return RefType{T::record(fs), rec.pred};
}

}  // namespace art
