#pragma once
// Separation-logic reading of worlds and types, snapshots, measure
// evaluation, and a ground checker over explicit cell maps.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "art/program.hpp"
#include "art/smt.hpp"
#include "art/solve.hpp"

namespace art {

struct Assertion;
using AssertPtr = std::shared_ptr<const Assertion>;

struct Assertion {
  enum Kind { Pure, Emp, PointsTo, Star, And, Or, Implies, Not, Exists } kind = Emp;
  ExprPtr pure;                    // Pure
  ExprPtr addr, val;               // PointsTo
  std::vector<AssertPtr> kids;     // Star, And, Or, Implies (guard, body), Not
  std::vector<std::string> vars;   // Exists
};

namespace A {
AssertPtr pure(ExprPtr p);
AssertPtr emp();
AssertPtr pointsTo(ExprPtr a, ExprPtr v);
AssertPtr star(std::vector<AssertPtr> ks);
AssertPtr conj(std::vector<AssertPtr> ks);
AssertPtr disj(std::vector<AssertPtr> ks);
AssertPtr implies(AssertPtr g, AssertPtr b);
AssertPtr neg(AssertPtr a);
AssertPtr exists(std::vector<std::string> vs, AssertPtr body);
}  // namespace A

std::string show(const AssertPtr& a);

// <ty>(term): pure reading of a type at a value; ?ref(L) reads as (term != null => term = L)
ExprPtr typeAssert(const ExprPtr& term, const RefType& t);

// bounded unrolling of a type definition at location term l and snapshot term x
AssertPtr typePredicate(const Program& p, const TypeDef& d, const std::vector<RefType>& tyArgs, const ExprPtr& l,
                        const ExprPtr& x, int depth);

// kappas are read through sol; unsolved ones as true
AssertPtr denote(const Program& p, const Env& gamma, const Heap& sigma, int depth = 3, const Solution& sol = {});

// pure part (spatial atoms dropped, guards kept)
ExprPtr pureOf(const AssertPtr& a);

SatResult auditPure(const Program& p, const Env& gamma, const Heap& sigma, SmtBackend& smt, const Solution& sol = {});

// ---------------------------------------------------------------- snapshots

struct Snap;
using SnapPtr = std::shared_ptr<const Snap>;
struct Snap {
  enum Kind { Int, Bool, Null, Rec, Ptr, Addr } kind = Null;
  long long i = 0;  // Int / Bool / Ptr and Addr address
  std::vector<std::pair<std::string, SnapPtr>> fields;
  SnapPtr target;  // Ptr
};

namespace S {
SnapPtr integer(long long v);
SnapPtr boolean(bool b);
SnapPtr null();
SnapPtr rec(std::vector<std::pair<std::string, SnapPtr>> fs);
SnapPtr ptr(long long addr, SnapPtr target);
SnapPtr addr(long long a);
}  // namespace S

bool snapEqual(const SnapPtr& a, const SnapPtr& b);
std::string show(const SnapPtr& s);

using CellMap = std::map<long long, SnapPtr>;  // address -> record of cell-level values

struct Walked {
  SnapPtr root;
  CellMap cells;
};
Walked walk(const SnapPtr& v);

// throws InputError on a stuck projection
SnapPtr evalMeasure(const Program& p, const Measure& m, const SnapPtr& v);

// does the cell map satisfy the assertion exactly (all cells consumed) under the given valuation
bool groundSat(const Program& p, const AssertPtr& a, const CellMap& heap, const std::map<std::string, SnapPtr>& env);

}  // namespace art
