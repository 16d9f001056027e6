#pragma once
// Predicate-abstraction fixpoint over kappa variables (iterative weakening).

#include <map>
#include <vector>

#include "art/horn.hpp"
#include "art/smt.hpp"

namespace art {

// decides  hyps /\ lhs => rhs
class Validator {
 public:
  virtual ~Validator() = default;
  virtual Validity check(const std::vector<ExprPtr>& hyps, const ExprPtr& lhs, const ExprPtr& rhs,
                         const SortEnv& sorts) = 0;
};

class SmtValidator : public Validator {
 public:
  explicit SmtValidator(SmtBackend& b) : b_(b) {}
  Validity check(const std::vector<ExprPtr>& hyps, const ExprPtr& lhs, const ExprPtr& rhs,
                 const SortEnv& sorts) override {
    return b_.checkImpl(hyps, lhs, rhs, sorts);
  }

 private:
  SmtBackend& b_;
};

using Solution = std::map<int, std::vector<ExprPtr>>;  // kappa -> conjunction of qualifier instances

// all well-sorted instances of the qualifiers over the kappa's scope, deduplicated
std::vector<ExprPtr> instantiate(const KappaInfo& k, const std::vector<Qualifier>& quals);

struct SolveOptions {
  int workers = 1;
};

struct SolveResult {
  bool ok = false;
  Solution sol;
  std::vector<HornClause> failed;  // concrete clauses that do not hold under sol
  int rounds = 0;
  long checks = 0;
};

SolveResult solve(const ConstraintSet& cs, const std::vector<Qualifier>& quals, Validator& v,
                  const SolveOptions& o = {});

// also used by the tests to start from a given assignment
SolveResult solveFrom(const ConstraintSet& cs, Solution start, Validator& v, const SolveOptions& o = {});

ExprPtr kappaPred(const Solution& s, int k);
ExprPtr applySolution(const ExprPtr& e, const Solution& s);
RefType applySolution(const RefType& t, const Solution& s);
Heap applySolution(const Heap& h, const Solution& s);
Schema applySolution(const Schema& sc, const Solution& s);
std::string showSolution(const Solution& s);

}  // namespace art
