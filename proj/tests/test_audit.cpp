#include <gtest/gtest.h>

#include "art/audit.hpp"
#include "art/cgen.hpp"
#include "art/elaborate.hpp"
#include "properties.hpp"

using namespace art;
using namespace art::testing;

namespace {

// does the list predicate at &x with snapshot binder x0 hold for this list
bool listHolds(const Program& p, const SnapPtr& s, int depth) {
  auto w = walk(s);
  auto a = typePredicate(p, *p.findType("list"), {T::mk(T::intB())}, E::loc("x"), E::var("x0"), depth);
  return groundSat(p, a, w.cells, {{"&x", w.root}});
}

}  // namespace

TEST(Audit, MaybeRefReadsAsConditionalEquality) {
  EXPECT_EQ(show(typeAssert(E::var("t"), T::mk(T::maybeRef("l")))), "t != null => t = &l");
  EXPECT_EQ(show(typeAssert(E::var("t"), T::mk(T::ref("l")))), "t = &l && &l != null");
  EXPECT_EQ(show(typeAssert(E::var("t"), T::mk(T::nullB()))), "t = null");
}

TEST(Audit, RefinementIsInstantiatedAtTheTerm) {
  auto t = T::mk(T::intB(), E::bin(Op::Le, E::integer(0), E::nu()));
  EXPECT_EQ(show(typeAssert(E::var("y"), t)), "0 <= y");
}

TEST(Audit, RecordReadsFieldwise) {
  auto t = T::mk(T::record({{"data", T::mk(T::intB(), E::eq(E::nu(), E::integer(1)))},
                            {"next", T::mk(T::maybeRef("t"))}}));
  EXPECT_EQ(show(typeAssert(E::var("h"), t)), "Field(h, data) = 1 && (Field(h, next) != null => Field(h, next) = &t)");
}

TEST(Audit, PureOfDropsSpatialAtoms) {
  auto a = A::star({A::pointsTo(E::loc("x"), E::var("x0")), A::pure(parsePredicate("0 <= y"))});
  EXPECT_EQ(show(pureOf(a)), "0 <= y");
  EXPECT_EQ(show(pureOf(A::exists({"z"}, A::pure(parsePredicate("z = 1"))))), "true");
}

TEST(Audit, DenotationMentionsEveryHeapCell) {
  auto p = elaborate(load("insert.limp"));
  Checker c(p, CgenOptions{false, true});
  auto w = c.entry(*p.findFunction("insert"));
  auto text = show(denote(p, w.gamma, w.sigma, 2));
  for (auto& h : w.sigma.entries) EXPECT_NE(text.find("&" + h.loc + " |->"), std::string::npos) << text;
}

// the pure reading of every program point in a verified program is consistent
TEST(Audit, PurePartIsSatisfiableAtEveryPoint) {
  SmtConfig cfg;
  cfg.solverPath = resolveSolver("");
  for (auto& f : {"abs.limp", "absL.limp", "insert.limp", "insertSort.limp", "client.limp", "ifexample.limp"}) {
    auto p = elaborate(load(f));
    SmtBackend smt(cfg);
    smt.setMeasures(measureTable(p));
    for (auto& fn : p.functions) {
      Checker c(p, CgenOptions{false, true});
      int points = 0;
      c.onStmt = [&](const World& w, const Stmt& s) {
        points++;
        EXPECT_EQ(auditPure(p, w.gamma, w.sigma, smt), SatResult::Sat) << f << " " << fn.name << " line " << s.span.line;
      };
      auto w = c.entry(fn);
      c.exec(w, fn.body);
      EXPECT_GT(points, 0) << f << " " << fn.name;
    }
  }
}

TEST(Audit, TwoCellListSatisfiesDepthTwoUnrolling) {
  auto p = load("absL.limp");
  EXPECT_TRUE(listHolds(p, listSnap({3, 4}), 2));
  EXPECT_TRUE(listHolds(p, listSnap({3}), 2));
}

TEST(Audit, UnrollingMustConsumeEveryCell) {
  auto p = load("absL.limp");
  // depth two covers two cells; a third is left over
  EXPECT_FALSE(listHolds(p, listSnap({1, 2, 3}), 2));
  EXPECT_TRUE(listHolds(p, listSnap({1, 2, 3}), 3));
}

TEST(Audit, NullRootIsNotACell) {
  auto p = load("absL.limp");
  EXPECT_FALSE(listHolds(p, S::null(), 2));
}

TEST(Audit, ElementRefinementIsCheckedInEveryCell) {
  auto p = load("absL.limp");
  auto refined = T::mk(T::intB(), E::bin(Op::Le, E::integer(0), E::nu()));
  auto w = walk(listSnap({-1, 2}));
  auto a = typePredicate(p, *p.findType("list"), {refined}, E::loc("x"), E::var("x0"), 2);
  EXPECT_FALSE(groundSat(p, a, w.cells, {{"&x", w.root}}));
  auto ok = walk(listSnap({1, 2}));
  EXPECT_TRUE(groundSat(p, a, ok.cells, {{"&x", ok.root}}));
}

TEST(Audit, WalkFlattensPointersIntoCells) {
  auto w = walk(listSnap({5, 6}, 10));
  ASSERT_EQ(w.cells.size(), 2u);
  EXPECT_TRUE(snapEqual(w.root, S::addr(10)));
  EXPECT_TRUE(snapEqual(w.cells.at(10), S::rec({{"data", S::integer(5)}, {"next", S::addr(11)}})));
  EXPECT_TRUE(snapEqual(w.cells.at(11), S::rec({{"data", S::integer(6)}, {"next", S::null()}})));
}

TEST(Audit, MeasureMatchesCellCount) { EXPECT_EQ(measureVsWalk(200, 11), ""); }

TEST(Audit, MeasureOfNullIsTheBaseCase) {
  auto p = load("absL.limp");
  auto v = evalMeasure(p, *p.findMeasure("len"), S::null());
  EXPECT_TRUE(snapEqual(v, S::integer(0)));
}

TEST(Audit, StuckMeasureThrows) {
  auto p = load("absL.limp");
  EXPECT_THROW(evalMeasure(p, *p.findMeasure("len"), S::integer(4)), InputError);
  // a cell without the projected field
  EXPECT_THROW(evalMeasure(p, *p.findMeasure("len"), S::ptr(1, S::rec({{"data", S::integer(1)}}))), InputError);
}

TEST(Audit, KappasAreReadThroughTheSolution) {
  auto p = load("abs.limp");
  Env g;
  g.bind("y", T::mk(T::intB(), E::kvar(1)));
  g.entries.push_back(EnvEntry{EnvEntry::Guard, "", {}, parsePredicate("0 <= y"), ""});
  SmtConfig cfg;
  cfg.solverPath = resolveSolver("");
  SmtBackend smt(cfg);
  EXPECT_EQ(auditPure(p, g, {}, smt), SatResult::Sat);  // unsolved: true
  EXPECT_EQ(auditPure(p, g, {}, smt, Solution{{1, {parsePredicate("v < 0")}}}), SatResult::Unsat);
}
