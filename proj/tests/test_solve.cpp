#include <gtest/gtest.h>

#include "art/cgen.hpp"
#include "art/elaborate.hpp"
#include "properties.hpp"

using namespace art;
using namespace art::testing;

namespace {

Qualifier qual(const std::string& text) { return parseQualifiers(text).at(0); }

HornClause clause(std::vector<ExprPtr> hyps, ExprPtr lhs, ExprPtr head) {
  HornClause c;
  c.hyps = std::move(hyps);
  c.lhs = std::move(lhs);
  c.head = std::move(head);
  c.nuSort = "int";
  c.sorts = {{kNu, "int"}, {"x", "int"}};
  return c;
}

ConstraintSet oneKappa() {
  ConstraintSet cs;
  cs.kappas[1] = KappaInfo{1, {{"x", "int"}}, "int", "f:ret"};
  return cs;
}

}  // namespace

TEST(Solve, InstancesRangeOverScopeOfMatchingSort) {
  KappaInfo k{1, {{"x", "int"}, {"y", "int"}, {"l", "list"}}, "int", "f:ret"};
  auto is = shown(instantiate(k, {qual("qualif Eq(v: int, ~A: int): v = ~A")}));
  EXPECT_EQ(is, (std::set<std::string>{"v = x", "v = y"}));
}

TEST(Solve, QualifiersOfAnotherSortAreSkipped) {
  KappaInfo k{1, {{"x", "int"}}, "int", "f:ret"};
  EXPECT_TRUE(instantiate(k, {qual("qualif LenZero(v: list): len(v) = 0")}).empty());
}

TEST(Solve, InstancesAreDeduplicated) {
  KappaInfo k{1, {{"x", "int"}}, "int", "f:ret"};
  auto q = qual("qualif Pos(v: int): 0 <= v");
  EXPECT_EQ(instantiate(k, {q, q}).size(), 1u);
}

TEST(Solve, WeakensToTheStrongestFixpoint) {
  auto cs = oneKappa();
  cs.clauses.push_back(clause({}, E::eq(E::nu(), E::integer(0)), E::kvar(1)));
  cs.clauses.push_back(clause({}, E::eq(E::nu(), E::integer(2)), E::kvar(1)));
  FiniteValidator v;
  auto r = solve(cs, parseQualifiers("qualif Pos(v: int): 0 <= v\nqualif Z(v: int): v = 0\n"), v);
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(shown(r.sol.at(1)), std::set<std::string>{"0 <= v"});
}

TEST(Solve, FailedConcreteClauseIsReported) {
  auto cs = oneKappa();
  cs.clauses.push_back(clause({}, E::eq(E::nu(), E::integer(-1)), E::kvar(1)));
  auto bad = clause({}, E::kvar(1), E::bin(Op::Le, E::integer(0), E::nu()));
  bad.id = 7;
  cs.clauses.push_back(bad);
  FiniteValidator v;
  auto r = solve(cs, parseQualifiers("qualif Pos(v: int): 0 <= v\n"), v);
  EXPECT_FALSE(r.ok);
  ASSERT_EQ(r.failed.size(), 1u);
  EXPECT_EQ(r.failed[0].id, 7);
}

TEST(Solve, SolveFromOnlyWeakens) {
  auto cs = oneKappa();
  cs.clauses.push_back(clause({}, E::eq(E::nu(), E::integer(1)), E::kvar(1)));
  Solution start{{1, {parsePredicate("0 <= v"), parsePredicate("v = 0"), parsePredicate("v <= 1")}}};
  FiniteValidator v;
  auto r = solveFrom(cs, start, v);
  EXPECT_EQ(shown(r.sol.at(1)), (std::set<std::string>{"0 <= v", "v <= 1"}));
}

TEST(Solve, ApplySolutionSubstitutesPending) {
  Solution s{{1, {parsePredicate("0 <= v"), parsePredicate("v <= x")}}};
  auto e = applySolution(E::kvar(1, {{kNu, E::var("y")}, {"x", E::integer(3)}}), s);
  EXPECT_EQ(show(e), "0 <= y && y <= 3");
  EXPECT_EQ(show(kappaPred(Solution{{2, {}}}, 2)), "true");
}

TEST(Solve, ShowSolutionListsEveryKappa) {
  Solution s{{1, {parsePredicate("0 <= v")}}, {2, {}}};
  auto text = showSolution(s);
  EXPECT_NE(text.find("k1"), std::string::npos) << text;
  EXPECT_NE(text.find("0 <= v"), std::string::npos) << text;
  EXPECT_NE(text.find("k2"), std::string::npos) << text;
}

TEST(Solve, AgreesWithBruteForceOnRandomSets) {
  BruteStats st;
  EXPECT_EQ(solverVsBruteForce(500, 7, &st), "");
  // the generator must exercise both interesting outcomes
  EXPECT_GT(st.nonEmpty, 0);
  EXPECT_GT(st.unsafe, 0);
}

TEST(Solve, ParallelChecksGiveTheSameSolution) {
  auto p = load("insert.limp");
  auto g = generate(elaborate(p));
  auto qs = quals(p);
  SmtConfig c;
  c.solverPath = resolveSolver("");
  c.workers = 4;
  SmtBackend b(c);
  b.setMeasures(measureTable(p));
  SmtValidator v(b);
  auto one = solve(g.cs, qs, v);
  SolveOptions par;
  par.workers = 4;
  auto four = solve(g.cs, qs, v, par);
  EXPECT_EQ(one.ok, four.ok);
  EXPECT_EQ(showSolution(one.sol), showSolution(four.sol));
}
