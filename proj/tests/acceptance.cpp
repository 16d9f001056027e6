// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.
#include <iostream>

#include "properties.hpp"

using namespace art;
using namespace art::testing;

namespace {

std::string solved(const PipelineResult& r, int k) { return show(kappaPred(r.solved.sol, k)); }

// first kappa of the origin whose value sort is `sort`
int kappaOf(const PipelineResult& r, const std::string& origin, const std::string& sort) {
  for (int k : kappasFrom(r.cs, origin))
    if (r.cs.kappas.at(k).nuSort == sort) return k;
  return -1;
}

std::string expect(bool ok, const std::string& why) { return ok ? "" : why; }

std::string c1() {
  auto p = load("abs.limp");
  auto qs = quals(p, "abs.quals");
  std::set<std::string> names;
  for (auto& q : qs) names.insert(show(q.body));
  if (names != std::set<std::string>{"0 <= v", "v = ~A", "v <= ~A"}) return "unexpected qualifier set";
  auto r = verify(p, qs, defaultOptions());
  int k = kappaOf(r, "abs:ret", "int");
  return expect(r.safe() && solved(r, k) == "0 <= v", "k1 = " + solved(r, k));
}

std::string c2() {
  auto r = run("absR.limp", "abs.quals");
  int k2 = kappaOf(r, "absR:out", "int");
  if (!r.safe() || solved(r, k2) != "0 <= v") return "absR field kappa = " + solved(r, k2);
  auto l = run("absL.limp", "abs.quals");
  int k3 = kappaOf(l, "absL:out", "int");
  if (!l.safe() || solved(l, k3) != "0 <= v") return "absL data kappa = " + solved(l, k3);
  auto got = skeletonInto(l.cs, k3);
  auto want = slurp(corpus("golden/absL.skeleton"));
  return expect(got == want, "skeleton:\n" + got);
}

std::string c3() {
  auto r = run("insert.limp");
  int k = kappaOf(r, "insert:out", "list");
  if (!r.safe() || solved(r, k) != "len(v) = 1 + len(x0)") return "k4 = " + solved(r, k);
  auto got = clausesInto(r.cs, k);
  return expect(got == slurp(corpus("golden/insert.lenclauses")), "length clauses:\n" + got);
}

std::string c4() {
  auto r = run("insertSort.limp");
  auto* v = verdict(r, "insertSort");
  return expect(v && v->status == "safe" && v->signature.find("len(v) = len(x0)") != std::string::npos,
                v ? v->status + " " + v->signature : "no verdict");
}

std::string c5() {
  auto r = run("nullderef.limp");
  for (auto& c : r.solved.failed)
    if (c.tag == "conc") return "";
  return "no failed conc clause";
}

std::string c6() {
  auto r = run("fnull.limp");
  auto* m = verdict(r, "main");
  return expect(!r.safe() && m && m->status == "unsafe", "program accepted");
}

std::string c7() {
  auto r = run("absL.limp", "abs.quals");
  const HornClause* guarded = nullptr;
  for (auto& c : r.cs.clauses) {
    if (c.fn != "absL" || c.tag != "fold") continue;
    for (auto& h : c.hyps)
      if (show(h).rfind("Field(", 0) == 0 && show(h).find(" != null") != std::string::npos) guarded = &c;
    if (guarded) break;
  }
  if (!guarded) return "no guarded fold clause";
  auto o = defaultOptions();
  SmtBackend smt(o.smt);
  smt.setMeasures(measureTable(r.elaborated));
  std::vector<ExprPtr> hs;
  for (auto& h : guarded->hyps) hs.push_back(applySolution(h, r.solved.sol));
  auto val = smt.checkImpl(hs, applySolution(guarded->lhs, r.solved.sol), applySolution(guarded->head, r.solved.sol),
                           guarded->sorts);
  if (val != Validity::Valid) return "guarded fold clause is " + show(val);
  auto on = run("absL_refined.limp", "abs.quals");
  if (!on.safe()) return "refined absL rejected with the guard";
  o.foldNullGuard = false;
  auto off = run("absL_refined.limp", "abs.quals", o);
  return expect(!off.safe(), "refined absL still verifies without the guard");
}

std::string c8() {
  for (auto n : {"absL", "insert", "client", "ifexample"}) {
    auto got = printProgram(elaborate(load(std::string(n) + ".limp")));
    if (got != slurp(corpus("golden/" + std::string(n) + ".elab"))) return std::string(n) + " differs from golden";
  }
  return "";
}

std::string c9() {
  if (auto e = solverVsBruteForce(500, 7); !e.empty()) return "solver: " + e;
  if (auto e = corpusRoundTrip(); !e.empty()) return "round trip: " + e;
  if (auto e = measureVsWalk(200, 11); !e.empty()) return "measure: " + e;
  if (auto e = elaborationLaws(); !e.empty()) return "elaboration: " + e;
  return "";
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<std::string()>>> cs{
      {"abs kappa is 0 <= v", c1},
      {"absR/absL kappas and absL clause skeleton", c2},
      {"insert length kappa and clause golden", c3},
      {"insertSort preserves length", c4},
      {"null dereference rejected", c5},
      {"null-returning f with assert(false) rejected", c6},
      {"guarded fold clause valid; refined absL needs the guard", c7},
      {"elaboration goldens", c8},
      {"property suites", c9},
  };
  int failures = 0;
  for (size_t i = 0; i < cs.size(); i++) {
    std::string err;
    try {
      err = cs[i].second();
    } catch (const std::exception& e) {
      err = std::string("exception: ") + e.what();
    }
    std::cout << (err.empty() ? "PASS" : "FAIL") << " " << (i + 1) << " " << cs[i].first;
    if (!err.empty()) std::cout << "\n  " << err;
    std::cout << std::endl;
    failures += !err.empty();
  }
  return failures;
}
