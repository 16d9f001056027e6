#pragma once
// Expressions and predicates. One tree serves program expressions, refinement
// predicates, measure bodies and kappa applications.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace art {

struct Span {
  int line = 0, col = 0;
  std::string str() const { return std::to_string(line) + ":" + std::to_string(col); }
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind { Int, Bool, Null, Loc, Var, Unary, Binary, Field, Measure, Ite, KVar };

enum class Op { Add, Sub, Mul, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Implies, Iff, Not, Neg };

// the value variable
inline const std::string kNu = "\xce\xbd";

// pending substitution carried by a kappa application; ordered by key
using VarSubst = std::map<std::string, ExprPtr>;

struct Expr {
  ExprKind kind;
  long long ival = 0;
  bool bval = false;
  std::string name;  // var, location, field, measure
  Op op = Op::Add;
  std::vector<ExprPtr> args;
  int kappa = -1;
  VarSubst pending;
};

namespace E {
ExprPtr integer(long long v);
ExprPtr boolean(bool b);
ExprPtr tt();
ExprPtr ff();
ExprPtr null();
ExprPtr loc(const std::string& l);
ExprPtr var(const std::string& x);
ExprPtr nu();
ExprPtr un(Op op, ExprPtr a);
ExprPtr bin(Op op, ExprPtr a, ExprPtr b);
ExprPtr eq(ExprPtr a, ExprPtr b);
ExprPtr ne(ExprPtr a, ExprPtr b);
ExprPtr notE(ExprPtr a);
ExprPtr implies(ExprPtr a, ExprPtr b);
ExprPtr field(ExprPtr rec, const std::string& f);
ExprPtr measure(const std::string& m, ExprPtr arg);
ExprPtr ite(ExprPtr c, ExprPtr a, ExprPtr b);
ExprPtr kvar(int id, VarSubst pending = {});
// conjunction that drops `true` and flattens
ExprPtr conj(const std::vector<ExprPtr>& ps);
ExprPtr conj2(ExprPtr a, ExprPtr b);
}  // namespace E

bool isTrue(const ExprPtr& e);
bool isFalse(const ExprPtr& e);
bool exprEqual(const ExprPtr& a, const ExprPtr& b);
// flattened conjuncts
std::vector<ExprPtr> conjuncts(const ExprPtr& e);

std::string show(const ExprPtr& e);
std::string showOp(Op op);

// free variables (not locations); kappa pendings contribute their range
void freeVars(const ExprPtr& e, std::set<std::string>& out);
void freeLocs(const ExprPtr& e, std::set<std::string>& out);
bool mentionsKappa(const ExprPtr& e);
void kappasOf(const ExprPtr& e, std::set<int>& out);

struct Subst {
  std::map<std::string, ExprPtr> vars;
  std::map<std::string, std::string> locs;
  bool empty() const { return vars.empty() && locs.empty(); }
  Subst without(const std::set<std::string>& names) const;
};

// simultaneous substitution; kappa pendings are composed, not applied
ExprPtr subst(const ExprPtr& e, const Subst& s);
ExprPtr substVar(const ExprPtr& e, const std::string& x, const ExprPtr& by);
// apply a kappa's pending substitution to a predicate over the kappa's scope
ExprPtr applyPending(const ExprPtr& body, const VarSubst& pending);

}  // namespace art
