#pragma once
// Refinement types, heaps, environments, schemas, type definitions, measures.

#include <optional>
#include <string>
#include <vector>

#include "art/expr.hpp"

namespace art {

enum class BaseKind { Int, Bool, Void, TyVar, Null, Ref, MaybeRef, Record, App };

struct BaseType;
using BasePtr = std::shared_ptr<const BaseType>;

// pred == nullptr marks a position the user left unrefined
struct RefType {
  BasePtr base;
  ExprPtr pred;
};

struct FieldType {
  std::string name;
  RefType type;
};

struct BaseType {
  BaseKind kind = BaseKind::Int;
  std::string name;  // type variable, location, or constructor
  std::vector<FieldType> fields;
  std::vector<RefType> args;
};

namespace T {
BasePtr intB();
BasePtr boolB();
BasePtr voidB();
BasePtr nullB();
BasePtr tyvar(const std::string& a);
BasePtr ref(const std::string& l);
BasePtr maybeRef(const std::string& l);
BasePtr record(std::vector<FieldType> fs);
BasePtr app(const std::string& c, std::vector<RefType> args);
RefType mk(BasePtr b, ExprPtr p = nullptr);
RefType self(BasePtr b, ExprPtr e);  // {b | v = e}
}  // namespace T

bool isPtr(const BasePtr& b);  // Ref or MaybeRef
const FieldType* findField(const BaseType& b, const std::string& f);
// structural equality ignoring refinements
bool sameShape(const BasePtr& a, const BasePtr& b);
bool sameType(const RefType& a, const RefType& b);
RefType erase(const RefType& t);
BasePtr eraseB(const BasePtr& b);
// locations mentioned at top level of fields (not through type applications)
void locsOf(const BasePtr& b, std::set<std::string>& out);
void locsDeep(const RefType& t, std::set<std::string>& out);
void typeFreeVars(const RefType& t, std::set<std::string>& out);

std::string show(const BasePtr& b);
std::string show(const RefType& t);

struct HeapEntry {
  std::string loc;
  std::string binder;
  RefType type;
};

struct Heap {
  std::vector<HeapEntry> entries;
  const HeapEntry* find(const std::string& loc) const;
  HeapEntry* find(const std::string& loc);
  bool has(const std::string& loc) const { return find(loc) != nullptr; }
  void put(HeapEntry e);  // replace or append
  void remove(const std::string& loc);
  std::vector<std::string> dom() const;
};
std::string show(const Heap& h);

struct EnvEntry {
  enum Kind { Bind, Guard, Ghost } kind = Bind;
  std::string name;  // Bind / Ghost binder
  RefType type;      // Bind / Ghost
  ExprPtr guard;     // Guard
  std::string loc;   // Ghost
};

struct Env {
  std::vector<EnvEntry> entries;
  const EnvEntry* lookup(const std::string& x) const;  // latest Bind
  void bind(const std::string& x, RefType t) { entries.push_back({EnvEntry::Bind, x, std::move(t), nullptr, ""}); }
  void guard(ExprPtr p) {
    if (!isTrue(p)) entries.push_back({EnvEntry::Guard, "", {}, std::move(p), ""});
  }
  void ghost(const std::string& b, const std::string& loc, RefType t) {
    entries.push_back({EnvEntry::Ghost, b, std::move(t), nullptr, loc});
  }
};

struct Schema {
  std::vector<std::string> locParams;
  std::vector<std::string> tyParams;
  std::vector<std::pair<std::string, RefType>> args;
  Heap inHeap;
  std::vector<std::string> outLocs;
  std::string outName;
  RefType outType;
  Heap outHeap;
};
std::string show(const Schema& s);

struct Measure {
  std::string name;
  std::string ctor;
  std::string param;
  bool boolResult = false;
  ExprPtr nullBody;
  ExprPtr consBody;
  Span span;
};

struct TypeDef {
  std::string name;
  std::vector<std::string> params;
  Heap exHeap;
  std::string rootBinder;
  RefType root;  // a record
  Span span;
};

struct Qualifier {
  std::string name;
  std::string nuSort;
  std::vector<std::pair<std::string, std::string>> wildcards;  // ~name, sort
  ExprPtr body;
  Span span;
};
std::string show(const Qualifier& q);

// substitution over types; locations rename Ref/MaybeRef targets too
RefType subst(const RefType& t, const Subst& s);
Heap subst(const Heap& h, const Subst& s);
// instantiate type variables
RefType substTy(const RefType& t, const std::map<std::string, RefType>& tys);
Heap substTy(const Heap& h, const std::map<std::string, RefType>& tys);

// attach v = Field(z, f) to every field of a record type
RefType nameFields(const std::string& z, const RefType& rec);

}  // namespace art
