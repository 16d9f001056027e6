#include "art/expr.hpp"

#include <sstream>

namespace art {

namespace {
ExprPtr mk(Expr e) { return std::make_shared<const Expr>(std::move(e)); }
}  // namespace

namespace E {
ExprPtr integer(long long v) {
  Expr e{ExprKind::Int};
  e.ival = v;
  return mk(e);
}
ExprPtr boolean(bool b) {
  Expr e{ExprKind::Bool};
  e.bval = b;
  return mk(e);
}
ExprPtr tt() {
  static ExprPtr t = boolean(true);
  return t;
}
ExprPtr ff() {
  static ExprPtr f = boolean(false);
  return f;
}
ExprPtr null() {
  static ExprPtr n = mk(Expr{ExprKind::Null});
  return n;
}
ExprPtr loc(const std::string& l) {
  Expr e{ExprKind::Loc};
  e.name = l;
  return mk(e);
}
ExprPtr var(const std::string& x) {
  Expr e{ExprKind::Var};
  e.name = x;
  return mk(e);
}
ExprPtr nu() {
  static ExprPtr n = var(kNu);
  return n;
}
ExprPtr un(Op op, ExprPtr a) {
  Expr e{ExprKind::Unary};
  e.op = op;
  e.args = {std::move(a)};
  return mk(e);
}
ExprPtr bin(Op op, ExprPtr a, ExprPtr b) {
  Expr e{ExprKind::Binary};
  e.op = op;
  e.args = {std::move(a), std::move(b)};
  return mk(e);
}
ExprPtr eq(ExprPtr a, ExprPtr b) { return bin(Op::Eq, std::move(a), std::move(b)); }
ExprPtr ne(ExprPtr a, ExprPtr b) { return bin(Op::Ne, std::move(a), std::move(b)); }
ExprPtr notE(ExprPtr a) { return un(Op::Not, std::move(a)); }
ExprPtr implies(ExprPtr a, ExprPtr b) {
  if (isTrue(a)) return b;
  if (isTrue(b)) return tt();
  return bin(Op::Implies, std::move(a), std::move(b));
}
ExprPtr field(ExprPtr rec, const std::string& f) {
  Expr e{ExprKind::Field};
  e.name = f;
  e.args = {std::move(rec)};
  return mk(e);
}
ExprPtr measure(const std::string& m, ExprPtr arg) {
  Expr e{ExprKind::Measure};
  e.name = m;
  e.args = {std::move(arg)};
  return mk(e);
}
ExprPtr ite(ExprPtr c, ExprPtr a, ExprPtr b) {
  Expr e{ExprKind::Ite};
  e.args = {std::move(c), std::move(a), std::move(b)};
  return mk(e);
}
ExprPtr kvar(int id, VarSubst pending) {
  Expr e{ExprKind::KVar};
  e.kappa = id;
  e.pending = std::move(pending);
  return mk(e);
}
ExprPtr conj(const std::vector<ExprPtr>& ps) {
  std::vector<ExprPtr> flat;
  for (auto& p : ps)
    for (auto& c : conjuncts(p))
      if (!isTrue(c)) flat.push_back(c);
  if (flat.empty()) return tt();
  ExprPtr acc = flat[0];
  for (size_t i = 1; i < flat.size(); i++) acc = bin(Op::And, acc, flat[i]);
  return acc;
}
ExprPtr conj2(ExprPtr a, ExprPtr b) { return conj({std::move(a), std::move(b)}); }
}  // namespace E

bool isTrue(const ExprPtr& e) { return !e || (e->kind == ExprKind::Bool && e->bval); }
bool isFalse(const ExprPtr& e) { return e && e->kind == ExprKind::Bool && !e->bval; }

std::vector<ExprPtr> conjuncts(const ExprPtr& e) {
  if (!e) return {};
  if (e->kind == ExprKind::Binary && e->op == Op::And) {
    auto l = conjuncts(e->args[0]);
    auto r = conjuncts(e->args[1]);
    l.insert(l.end(), r.begin(), r.end());
    return l;
  }
  if (isTrue(e)) return {};
  return {e};
}

bool exprEqual(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return isTrue(a) && isTrue(b);
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Int: return a->ival == b->ival;
    case ExprKind::Bool: return a->bval == b->bval;
    case ExprKind::Null: return true;
    case ExprKind::Loc:
    case ExprKind::Var: return a->name == b->name;
    case ExprKind::KVar:
      if (a->kappa != b->kappa || a->pending.size() != b->pending.size()) return false;
      for (auto ia = a->pending.begin(), ib = b->pending.begin(); ia != a->pending.end(); ++ia, ++ib)
        if (ia->first != ib->first || !exprEqual(ia->second, ib->second)) return false;
      return true;
    default: break;
  }
  if (a->op != b->op || a->name != b->name || a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); i++)
    if (!exprEqual(a->args[i], b->args[i])) return false;
  return true;
}

std::string showOp(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Eq: return "=";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::And: return "&&";
    case Op::Or: return "||";
    case Op::Implies: return "=>";
    case Op::Iff: return "<=>";
    case Op::Not: return "!";
    case Op::Neg: return "-";
  }
  return "?";
}

namespace {
int prec(Op op) {
  switch (op) {
    case Op::Implies:
    case Op::Iff: return 1;
    case Op::Or: return 2;
    case Op::And: return 3;
    case Op::Eq:
    case Op::Ne:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge: return 4;
    case Op::Add:
    case Op::Sub: return 5;
    case Op::Mul: return 6;
    default: return 7;
  }
}

void showTo(std::ostringstream& os, const ExprPtr& e, int ctx) {
  if (!e) {
    os << "true";
    return;
  }
  switch (e->kind) {
    case ExprKind::Int:
      if (e->ival < 0 && ctx > 4)
        os << "(" << e->ival << ")";
      else
        os << e->ival;
      return;
    case ExprKind::Bool: os << (e->bval ? "true" : "false"); return;
    case ExprKind::Null: os << "null"; return;
    case ExprKind::Loc: os << "&" << e->name; return;
    case ExprKind::Var: os << (e->name == kNu ? std::string("v") : e->name); return;
    case ExprKind::Unary:
      os << showOp(e->op);
      showTo(os, e->args[0], 8);
      return;
    case ExprKind::Binary: {
      int p = prec(e->op);
      bool paren = p < ctx || (p == ctx && (p == 1 || p == 4));
      if (paren) os << "(";
      // left-assoc for arithmetic, right for implication
      int lp = e->op == Op::Implies ? p + 1 : p;
      int rp = e->op == Op::Implies ? p : p + 1;
      if (e->op == Op::And || e->op == Op::Or) lp = rp = p;
      showTo(os, e->args[0], lp);
      os << " " << showOp(e->op) << " ";
      showTo(os, e->args[1], rp);
      if (paren) os << ")";
      return;
    }
    case ExprKind::Field:
      os << "Field(";
      showTo(os, e->args[0], 0);
      os << ", " << e->name << ")";
      return;
    case ExprKind::Measure:
      os << e->name << "(";
      showTo(os, e->args[0], 0);
      os << ")";
      return;
    case ExprKind::Ite:
      os << "(if ";
      showTo(os, e->args[0], 0);
      os << " then ";
      showTo(os, e->args[1], 0);
      os << " else ";
      showTo(os, e->args[2], 0);
      os << ")";
      return;
    case ExprKind::KVar: {
      os << "k" << e->kappa;
      if (!e->pending.empty()) {
        os << "[";
        bool first = true;
        for (auto& [k, v] : e->pending) {
          if (!first) os << ", ";
          first = false;
          os << (k == kNu ? std::string("v") : k) << ":=";
          showTo(os, v, 0);
        }
        os << "]";
      }
      return;
    }
  }
}
}  // namespace

std::string show(const ExprPtr& e) {
  std::ostringstream os;
  showTo(os, e, 0);
  return os.str();
}

void freeVars(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == ExprKind::Var) {
    out.insert(e->name);
    return;
  }
  if (e->kind == ExprKind::KVar) {
    for (auto& [k, v] : e->pending) freeVars(v, out);
    return;
  }
  for (auto& a : e->args) freeVars(a, out);
}

void freeLocs(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == ExprKind::Loc) out.insert(e->name);
  if (e->kind == ExprKind::KVar)
    for (auto& [k, v] : e->pending) freeLocs(v, out);
  for (auto& a : e->args) freeLocs(a, out);
}

bool mentionsKappa(const ExprPtr& e) {
  if (!e) return false;
  if (e->kind == ExprKind::KVar) return true;
  for (auto& a : e->args)
    if (mentionsKappa(a)) return true;
  return false;
}

void kappasOf(const ExprPtr& e, std::set<int>& out) {
  if (!e) return;
  if (e->kind == ExprKind::KVar) out.insert(e->kappa);
  for (auto& a : e->args) kappasOf(a, out);
}

Subst Subst::without(const std::set<std::string>& names) const {
  Subst r = *this;
  for (auto& n : names) r.vars.erase(n);
  return r;
}

ExprPtr subst(const ExprPtr& e, const Subst& s) {
  if (!e || s.empty()) return e;
  switch (e->kind) {
    case ExprKind::Int:
    case ExprKind::Bool:
    case ExprKind::Null: return e;
    case ExprKind::Loc: {
      auto it = s.locs.find(e->name);
      return it == s.locs.end() ? e : E::loc(it->second);
    }
    case ExprKind::Var: {
      auto it = s.vars.find(e->name);
      return it == s.vars.end() ? e : it->second;
    }
    case ExprKind::KVar: {
      // compose: theta . sigma, then theta on names outside dom(sigma)
      VarSubst np;
      for (auto& [k, v] : e->pending) np[k] = subst(v, s);
      for (auto& [k, v] : s.vars)
        if (!e->pending.count(k)) np[k] = v;
      // drop identity entries
      for (auto it = np.begin(); it != np.end();) {
        if (it->second->kind == ExprKind::Var && it->second->name == it->first)
          it = np.erase(it);
        else
          ++it;
      }
      return E::kvar(e->kappa, std::move(np));
    }
    default: break;
  }
  Expr c = *e;
  bool changed = false;
  for (auto& a : c.args) {
    auto na = subst(a, s);
    if (na != a) changed = true;
    a = na;
  }
  if (!changed) return e;
  return std::make_shared<const Expr>(std::move(c));
}

ExprPtr substVar(const ExprPtr& e, const std::string& x, const ExprPtr& by) {
  Subst s;
  s.vars[x] = by;
  return subst(e, s);
}

ExprPtr applyPending(const ExprPtr& body, const VarSubst& pending) {
  Subst s;
  s.vars = pending;
  return subst(body, s);
}

}  // namespace art
