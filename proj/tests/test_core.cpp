#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <unordered_set>

#include "art/fresh.hpp"
#include "art/physical.hpp"
#include "art/types.hpp"

using namespace art;

TEST(Expr, ConjDropsTrueAndFlattens) {
  auto a = E::bin(Op::Le, E::integer(0), E::nu());
  auto c = E::conj({E::tt(), a, E::conj({E::tt(), E::eq(E::nu(), E::var("x"))})});
  ASSERT_EQ(conjuncts(c).size(), 2u);
  EXPECT_EQ(show(c), "0 <= v && v = x");
  EXPECT_TRUE(isTrue(E::conj({})));
}

TEST(Expr, SubstComposesKappaPendings) {
  auto k = E::kvar(3, {{kNu, E::var("y")}});
  Subst s;
  s.vars["y"] = E::var("z");
  auto r = subst(k, s);
  ASSERT_EQ(r->kind, ExprKind::KVar);
  EXPECT_EQ(show(r->pending.at(kNu)), "z");
  // applying the pending to a body over the kappa scope
  auto body = E::bin(Op::Le, E::integer(0), E::nu());
  EXPECT_EQ(show(applyPending(body, r->pending)), "0 <= z");
}

TEST(Expr, SubstIsSimultaneous) {
  Subst s;
  s.vars["x"] = E::var("y");
  s.vars["y"] = E::var("x");
  EXPECT_EQ(show(subst(E::bin(Op::Sub, E::var("x"), E::var("y")), s)), "y - x");
}

TEST(Expr, FreeVarsAndLocs) {
  auto e = E::implies(E::ne(E::loc("t"), E::null()), E::eq(E::measure("len", E::var("t0")), E::integer(1)));
  std::set<std::string> vs, ls;
  freeVars(e, vs);
  freeLocs(e, ls);
  EXPECT_EQ(vs, std::set<std::string>{"t0"});
  EXPECT_EQ(ls, std::set<std::string>{"t"});
}

TEST(Fresh, NoDuplicatesOverManyDraws) {
  FreshNames f;
  f.reserve("x");
  std::unordered_set<std::string> seen{"x"};
  std::mt19937 rng(3);
  const char* hints[] = {"x", "x1", "t", "y", "_t", "l"};
  for (int i = 0; i < 100000; i++) {
    auto n = (i % 2) ? f.fresh(hints[rng() % 6]) : f.indexed(hints[rng() % 6]);
    ASSERT_TRUE(seen.insert(n).second) << n;
  }
}

TEST(Fresh, StripDigits) {
  EXPECT_EQ(stripDigits("x12"), "x");
  EXPECT_EQ(stripDigits("x"), "x");
}

TEST(Types, SameShapeIgnoresRefinements) {
  auto a = T::record({{"data", T::mk(T::intB(), E::bin(Op::Le, E::integer(0), E::nu()))}, {"next", T::mk(T::maybeRef("t"))}});
  auto b = T::record({{"data", T::mk(T::intB())}, {"next", T::mk(T::maybeRef("t"))}});
  EXPECT_TRUE(sameShape(a, b));
  EXPECT_FALSE(sameShape(a, T::record({{"data", T::mk(T::intB())}})));
  EXPECT_FALSE(sameType(T::mk(a), T::mk(b)));
}

TEST(Types, LocationSubstitutionTracksSwap) {
  auto t = T::mk(T::record({{"a", T::mk(T::ref("p"))}, {"b", T::mk(T::maybeRef("q"))}}));
  Subst s;
  s.locs = {{"p", "q"}, {"q", "p"}};
  auto r = subst(t, s);
  EXPECT_EQ(r.base->fields[0].type.base->name, "q");
  EXPECT_EQ(r.base->fields[1].type.base->name, "p");
}

TEST(Types, HeapPutReplacesAndRemove) {
  Heap h;
  h.put({"a", "a0", T::mk(T::intB())});
  h.put({"b", "b0", T::mk(T::intB())});
  h.put({"a", "a1", T::mk(T::boolB())});
  ASSERT_EQ(h.entries.size(), 2u);
  EXPECT_EQ(h.find("a")->binder, "a1");
  h.remove("a");
  EXPECT_FALSE(h.has("a"));
  EXPECT_EQ(h.dom(), std::vector<std::string>{"b"});
}

TEST(Physical, UnifyBindsLocationsAndTypeVars) {
  Unifier u;
  u.locVars = {"x"};
  u.tyVars = {"A"};
  auto formal = T::record({{"d", T::mk(T::tyvar("A"))}, {"n", T::mk(T::maybeRef("x"))}});
  auto actual = T::record({{"d", T::mk(T::intB())}, {"n", T::mk(T::ref("q"))}});
  ASSERT_TRUE(u.unify(formal, actual));
  EXPECT_EQ(u.locs.at("x"), "q");
  EXPECT_EQ(u.tys.at("A")->kind, BaseKind::Int);
  EXPECT_FALSE(u.unify(T::ref("x"), T::ref("other")));
}

TEST(Physical, NullIsOnlyAMaybeRef) {
  EXPECT_TRUE(physSub(T::nullB(), T::maybeRef("l")));
  EXPECT_FALSE(physSub(T::nullB(), T::ref("l")));
  EXPECT_TRUE(physSub(T::ref("l"), T::maybeRef("l")));
}

namespace {

Heap chainHeap(const std::vector<std::pair<std::string, std::string>>& edges, const std::vector<std::string>& nodes) {
  Heap h;
  for (auto& n : nodes) {
    std::vector<FieldType> fs{{"data", T::mk(T::intB())}};
    int i = 0;
    for (auto& [a, b] : edges)
      if (a == n) fs.push_back({"f" + std::to_string(i++), T::mk(T::maybeRef(b))});
    h.put({n, n + "0", T::mk(T::record(fs))});
  }
  return h;
}

}  // namespace

// oracle: first permutation in lexicographic order that respects every edge
TEST(Physical, FoldOrderIsLexicographicallyLeastTopologicalOrder) {
  std::mt19937 rng(5);
  for (int round = 0; round < 200; round++) {
    int n = 1 + static_cast<int>(rng() % 6);
    std::vector<std::string> nodes;
    for (int i = 0; i < n; i++) nodes.push_back(std::string(1, static_cast<char>('a' + i)));
    std::shuffle(nodes.begin(), nodes.end(), rng);
    std::vector<std::pair<std::string, std::string>> edges;  // a points into b: b folds first
    for (int i = 0; i < n; i++)
      for (int j = i + 1; j < n; j++)
        if (rng() % 3 == 0) edges.push_back({nodes[j], nodes[i]});
    auto h = chainHeap(edges, nodes);
    auto got = foldOrder(std::set<std::string>(nodes.begin(), nodes.end()), h);
    std::vector<std::string> perm(nodes);
    std::sort(perm.begin(), perm.end());
    std::vector<std::string> want;
    do {
      auto pos = [&](const std::string& x) { return std::find(perm.begin(), perm.end(), x) - perm.begin(); };
      bool ok = std::all_of(edges.begin(), edges.end(), [&](auto& e) { return pos(e.second) < pos(e.first); });
      if (ok) {
        want = perm;
        break;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    ASSERT_EQ(got, want);
  }
}

TEST(Physical, FoldOrderRejectsCycles) {
  auto h = chainHeap({{"a", "b"}, {"b", "a"}}, {"a", "b"});
  EXPECT_THROW(foldOrder({"a", "b"}, h), InputError);
}

TEST(Physical, PadLocsAreSortedDifference) {
  Heap s, t;
  s.put({"a", "a0", T::mk(T::intB())});
  for (auto l : {"z", "a", "m"}) t.put({l, std::string(l) + "0", T::mk(T::intB())});
  EXPECT_EQ(padLocs(s, t), (std::vector<std::string>{"m", "z"}));
}

TEST(Physical, AliasCheckSeesDivergentPointers) {
  auto rec = [](const std::string& l) { return T::mk(T::record({{"next", T::mk(T::maybeRef(l))}})); };
  Heap a, b;
  a.put({"x", "x0", rec("p")});
  b.put({"x", "x1", rec("q")});
  EXPECT_TRUE(aliasCheck("x", a, b));
  b.put({"x", "x1", rec("p")});
  EXPECT_FALSE(aliasCheck("x", a, b));
}

TEST(Physical, LocNamerAvoidsIdentifiersUnlessForVar) {
  LocNamer n;
  n.idents = {"y"};
  EXPECT_EQ(n.fresh("y", true), "y");
  EXPECT_EQ(n.fresh("y"), "y1");
  EXPECT_EQ(n.fresh("t"), "t");
  EXPECT_EQ(n.fresh("t"), "t1");
}
