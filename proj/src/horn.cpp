#include "art/horn.hpp"

namespace art {

std::string sortOf(const BasePtr& b) {
  switch (b->kind) {
    case BaseKind::Int: return "int";
    case BaseKind::Bool: return "bool";
    case BaseKind::Void: return "void";
    case BaseKind::Null:
    case BaseKind::Ref:
    case BaseKind::MaybeRef: return "ptr";
    case BaseKind::Record: return "rec";
    case BaseKind::TyVar: return "'" + b->name;
    case BaseKind::App: return b->name;
  }
  return "int";
}

bool smtBool(const std::string& sort) { return sort == "bool"; }

bool sortMatches(const std::string& want, const std::string& have) {
  if (want == "val" || want == have) return true;
  if (want == "int" && !have.empty() && have[0] == '\'') return true;
  return false;
}

std::string show(const HornClause& c) {
  std::string s;
  for (size_t i = 0; i < c.hyps.size(); i++) {
    if (i) s += "; ";
    s += show(c.hyps[i]);
  }
  return s + " |- " + show(c.lhs) + " => " + show(c.head);
}

std::string show(const ConstraintSet& cs) {
  std::string s;
  for (auto& [id, k] : cs.kappas) {
    s += "kappa k" + std::to_string(id) + " (v: " + k.nuSort;
    for (auto& [n, so] : k.scope) s += ", " + n + ": " + so;
    s += ")  -- " + k.origin + "\n";
  }
  for (auto& c : cs.clauses)
    s += "[" + std::to_string(c.id) + " " + c.fn + " " + c.tag + " @" + c.span.str() + "] " + show(c) + "\n";
  return s;
}

}  // namespace art
