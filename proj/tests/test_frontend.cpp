#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "art/frontend.hpp"
#include "support.hpp"

using namespace art;
using namespace art::testing;

namespace {

std::string diagOf(const std::string& text) {
  try {
    frontEnd(text);
  } catch (const InputError& e) {
    return e.diag.str();
  }
  return "";
}

// And/Or chains compared as flat lists: both associations print the same
std::string canon(const ExprPtr& e) {
  if (e->kind == ExprKind::Binary && (e->op == Op::And || e->op == Op::Or)) {
    std::vector<ExprPtr> parts;
    std::function<void(const ExprPtr&)> go = [&](const ExprPtr& x) {
      if (x->kind == ExprKind::Binary && x->op == e->op) {
        go(x->args[0]);
        go(x->args[1]);
      } else {
        parts.push_back(x);
      }
    };
    go(e);
    std::string s = showOp(e->op) + "[";
    for (auto& p : parts) s += canon(p) + ",";
    return s + "]";
  }
  std::string s = std::to_string(static_cast<int>(e->kind)) + ":" + std::to_string(static_cast<int>(e->op)) + ":" +
                  e->name + ":" + std::to_string(e->ival) + "(";
  for (auto& a : e->args) s += canon(a) + ",";
  return s + ")";
}

bool sameBlock(const Block& a, const Block& b);

bool sameStmt(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.x != b.x || a.f != b.f || a.hasElse != b.hasElse) return false;
  if ((a.e == nullptr) != (b.e == nullptr) || (a.e && canon(a.e) != canon(b.e))) return false;
  if (a.args.size() != b.args.size() || a.fields.size() != b.fields.size()) return false;
  for (size_t i = 0; i < a.args.size(); i++)
    if (!exprEqual(a.args[i], b.args[i])) return false;
  for (size_t i = 0; i < a.fields.size(); i++)
    if (a.fields[i].first != b.fields[i].first || !exprEqual(a.fields[i].second, b.fields[i].second)) return false;
  return sameBlock(a.thenB, b.thenB) && sameBlock(a.elseB, b.elseB);
}

bool sameBlock(const Block& a, const Block& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); i++)
    if (!sameStmt(*a[i], *b[i])) return false;
  return true;
}

struct Gen {
  std::mt19937 rng;
  int pick(int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); }

  ExprPtr intE(int d) {
    if (d == 0 || pick(3) == 0) return pick(2) ? E::integer(pick(10)) : E::var(pick(2) ? "a" : "b");
    static const Op ops[] = {Op::Add, Op::Sub, Op::Mul};
    return E::bin(ops[pick(3)], intE(d - 1), intE(d - 1));
  }
  ExprPtr boolE(int d) {
    static const Op cmp[] = {Op::Le, Op::Lt, Op::Eq, Op::Ne, Op::Ge, Op::Gt};
    if (d == 0 || pick(3) == 0) return E::bin(cmp[pick(6)], intE(1), intE(1));
    switch (pick(3)) {
      case 0: return E::notE(boolE(d - 1));
      case 1: return E::bin(Op::And, boolE(d - 1), boolE(d - 1));
      default: return E::bin(Op::Or, boolE(d - 1), boolE(d - 1));
    }
  }
  Block block(int d, int& tmp) {
    Block b;
    for (int n = 1 + pick(3); n > 0; n--) {
      auto s = std::make_shared<Stmt>();
      if (d > 0 && pick(3) == 0) {
        s->kind = StmtKind::If;
        s->e = boolE(2);
        s->thenB = block(d - 1, tmp);
        s->hasElse = pick(2);
        if (s->hasElse) s->elseB = block(d - 1, tmp);
      } else {
        s->kind = StmtKind::Assign;
        s->x = "v" + std::to_string(tmp++);
        s->e = intE(3);
      }
      b.push_back(s);
    }
    return b;
  }
};

}  // namespace

TEST(Frontend, CorpusParsesAndPrintsToAFixpoint) {
  for (auto& f : std::vector<std::string>{"abs.limp", "absR.limp", "absL.limp", "insert.limp", "insertSort.limp",
                                          "client.limp", "ifexample.limp", "nullderef.limp", "fnull.limp"}) {
    auto p = load(f);
    auto once = printProgram(p);
    EXPECT_EQ(printProgram(parseProgram(once)), once) << f;
  }
}

TEST(Frontend, RandomProgramsRoundTrip) {
  Gen g{std::mt19937(17)};
  auto base = parseProgram("main :: (a: int, b: int) => int\nfunction main(a, b) {\n  return a;\n}\n");
  for (int i = 0; i < 300; i++) {
    Program p = base;
    int tmp = 0;
    auto body = g.block(2, tmp);
    auto r = std::make_shared<Stmt>();
    r->kind = StmtKind::Return;
    r->e = g.intE(2);
    body.push_back(r);
    p.functions[0].body = body;
    auto text = printProgram(p);
    Program q;
    ASSERT_NO_THROW(q = parseProgram(text)) << text;
    ASSERT_TRUE(sameBlock(p.functions[0].body, q.functions[0].body)) << text << "\n---\n" << printProgram(q);
  }
}

TEST(Frontend, PredicatesRoundTripThroughShow) {
  Gen g{std::mt19937(23)};
  for (int i = 0; i < 300; i++) {
    auto e = g.boolE(3);
    auto back = parsePredicate(show(e));
    ASSERT_EQ(canon(e), canon(back)) << show(e) << " vs " << show(back);
  }
}

TEST(Frontend, NestedFieldReadsAreNamed) {
  auto p = load("insert.limp");
  auto text = printProgram(p);
  EXPECT_NE(text.find("var _t1 = x.data;"), std::string::npos) << text;
  EXPECT_NE(text.find("if (k <= _t1)"), std::string::npos) << text;
}

TEST(Frontend, TypeDefinitionAndMeasure) {
  auto p = load("absL.limp");
  auto* d = p.findType("list");
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->params, std::vector<std::string>{"A"});
  EXPECT_EQ(d->exHeap.dom(), std::vector<std::string>{"t"});
  ASSERT_EQ(d->root.base->kind, BaseKind::Record);
  EXPECT_EQ(d->root.base->fields[1].type.base->kind, BaseKind::MaybeRef);
  auto* m = p.findMeasure("len");
  ASSERT_NE(m, nullptr);
  EXPECT_EQ(show(m->nullBody), "0");
  EXPECT_EQ(m->ctor, "list");
}

TEST(Frontend, SchemaWithExistentialOutput) {
  auto p = load("insert.limp");
  auto& s = *p.findFunction("insert")->schema;
  EXPECT_EQ(s.outLocs, std::vector<std::string>{"l"});
  EXPECT_EQ(s.inHeap.entries.at(0).binder, "x0");
  EXPECT_EQ(s.args.at(1).second.base->kind, BaseKind::MaybeRef);
  EXPECT_EQ(s.tyParams, std::vector<std::string>{"A"});
}

TEST(Frontend, QualifierFile) {
  auto qs = parseQualifiers(slurp(corpus("base.quals")));
  ASSERT_EQ(qs.size(), 6u);
  EXPECT_EQ(qs[4].nuSort, "list");
  ASSERT_EQ(qs[4].wildcards.size(), 1u);
  EXPECT_EQ(qs[4].wildcards[0].second, "list");
  EXPECT_EQ(show(qs[4].body), "len(v) = 1 + len(~X)");
}

TEST(Frontend, ParseErrorsAreLocated) {
  EXPECT_EQ(diagOf("main :: () => int\nfunction main() {\n  return 1 +;\n}\n").substr(0, 5), "3:13:");
  EXPECT_EQ(diagOf("main :: () => int\nfunction main() {\n  return 1;\n"), "4:1: unterminated block");
}

TEST(Frontend, AnnotationsParseAndPrint) {
  auto text = slurp(corpus("golden/insert.elab"));
  auto p = parseProgram(text);
  EXPECT_EQ(printProgram(p), text);
}
