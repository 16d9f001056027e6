#pragma once
// Horn clauses over kappa templates.

#include <map>
#include <string>
#include <vector>

#include "art/types.hpp"

namespace art {

// logical sorts: int, bool, ptr, rec, void, a constructor name (snapshots),
// or 'A for a type variable
std::string sortOf(const BasePtr& b);
bool smtBool(const std::string& sort);
// qualifier sort `want` accepts a symbol of sort `have`
bool sortMatches(const std::string& want, const std::string& have);

struct HornClause {
  int id = 0;
  std::vector<ExprPtr> hyps;
  ExprPtr lhs;   // over v
  ExprPtr head;  // over v; a kappa application or a concrete predicate
  std::string nuSort = "int";
  std::map<std::string, std::string> sorts;  // free names -> sort
  std::string tag;
  std::string fn;
  Span span;
};

struct KappaInfo {
  int id = 0;
  std::vector<std::pair<std::string, std::string>> scope;  // name, sort
  std::string nuSort;
  std::string origin;
};

struct ConstraintSet {
  std::vector<HornClause> clauses;
  std::map<int, KappaInfo> kappas;
};

std::string show(const HornClause& c);
std::string show(const ConstraintSet& cs);

}  // namespace art
