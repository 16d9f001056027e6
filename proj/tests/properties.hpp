#pragma once
// Property suites, shared by the gtest runner and the acceptance binary.
// Each returns an empty string on success, otherwise the first counterexample.

#include <functional>
#include <random>

#include "art/audit.hpp"
#include "art/elaborate.hpp"
#include "art/solve.hpp"
#include "support.hpp"

namespace art::testing {

// Decides validity by enumerating every free integer variable over a small range.
class FiniteValidator : public Validator {
 public:
  explicit FiniteValidator(int lo = -3, int hi = 3) : lo_(lo), hi_(hi) {}

  Validity check(const std::vector<ExprPtr>& hyps, const ExprPtr& lhs, const ExprPtr& rhs,
                 const SortEnv&) override {
    std::set<std::string> fv;
    for (auto& h : hyps) freeVars(h, fv);
    freeVars(lhs, fv);
    freeVars(rhs, fv);
    std::vector<std::string> vars(fv.begin(), fv.end());
    std::map<std::string, long long> env;
    std::function<bool(size_t)> all = [&](size_t i) {
      if (i == vars.size()) {
        for (auto& h : hyps)
          if (!eval(h, env)) return true;
        return !eval(lhs, env) || eval(rhs, env) != 0;
      }
      for (long long x = lo_; x <= hi_; x++) {
        env[vars[i]] = x;
        if (!all(i + 1)) return false;
      }
      return true;
    };
    return all(0) ? Validity::Valid : Validity::Invalid;
  }

  static long long eval(const ExprPtr& e, const std::map<std::string, long long>& env) {
    switch (e->kind) {
      case ExprKind::Int: return e->ival;
      case ExprKind::Bool: return e->bval;
      case ExprKind::Var: return env.at(e->name);
      case ExprKind::Ite: return eval(e->args[0], env) ? eval(e->args[1], env) : eval(e->args[2], env);
      case ExprKind::Unary: {
        auto a = eval(e->args[0], env);
        return e->op == Op::Not ? !a : -a;
      }
      case ExprKind::Binary: {
        auto a = eval(e->args[0], env);
        if (e->op == Op::And && !a) return 0;
        if (e->op == Op::Or && a) return 1;
        if (e->op == Op::Implies && !a) return 1;
        auto b = eval(e->args[1], env);
        switch (e->op) {
          case Op::Add: return a + b;
          case Op::Sub: return a - b;
          case Op::Mul: return a * b;
          case Op::Eq: return a == b;
          case Op::Ne: return a != b;
          case Op::Lt: return a < b;
          case Op::Le: return a <= b;
          case Op::Gt: return a > b;
          case Op::Ge: return a >= b;
          case Op::And:
          case Op::Or:
          case Op::Implies: return b != 0;
          case Op::Iff: return (a != 0) == (b != 0);
          default: break;
        }
        break;
      }
      default: break;
    }
    throw std::logic_error("finite validator cannot evaluate " + show(e));
  }

 private:
  int lo_, hi_;
};

// ---------------------------------------------------------------- random Horn sets

struct RandomHorn {
  ConstraintSet cs;
  std::vector<Qualifier> quals;
};

inline RandomHorn randomHorn(std::mt19937& rng) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  RandomHorn r;
  int nk = 1 + pick(3);
  int nq = 1 + pick(6);  // instances per kappa
  static const Op cmp[] = {Op::Le, Op::Ge, Op::Eq, Op::Ne, Op::Lt};
  std::set<std::string> seen;
  while (static_cast<int>(r.quals.size()) < nq) {
    Qualifier q;
    q.name = "Q" + std::to_string(r.quals.size());
    q.nuSort = "int";
    if (pick(4) == 0) {
      q.wildcards = {{"~A", "int"}};
      q.body = E::bin(cmp[pick(5)], E::nu(), E::var("~A"));
    } else {
      q.body = E::bin(cmp[pick(5)], E::nu(), E::integer(pick(5) - 2));
    }
    if (seen.insert(show(q.body)).second) r.quals.push_back(q);
  }
  for (int k = 1; k <= nk; k++) r.cs.kappas[k] = KappaInfo{k, {{"x", "int"}}, "int", "rand"};
  auto atom = [&](ExprPtr a) { return E::bin(cmp[pick(5)], a, E::integer(pick(5) - 2)); };
  int nc = 2 + pick(5);
  for (int i = 0; i < nc; i++) {
    HornClause c;
    c.id = i + 1;
    c.nuSort = "int";
    c.sorts = {{kNu, "int"}, {"x", "int"}};
    c.fn = "rand";
    for (int h = pick(3); h > 0; h--)
      c.hyps.push_back(pick(2) ? atom(E::var("x")) : E::kvar(1 + pick(nk), {{kNu, E::var("x")}}));
    switch (pick(4)) {
      case 0: c.lhs = atom(E::nu()); break;
      case 1: c.lhs = E::eq(E::nu(), E::var("x")); break;
      case 2: c.lhs = E::kvar(1 + pick(nk)); break;
      default: c.lhs = E::eq(E::nu(), E::bin(Op::Add, E::var("x"), E::integer(1))); break;
    }
    c.head = pick(4) ? E::kvar(1 + pick(nk)) : atom(E::nu());
    r.cs.clauses.push_back(c);
  }
  return r;
}

inline bool clauseHolds(const HornClause& c, const Solution& s, Validator& v) {
  std::vector<ExprPtr> hs;
  for (auto& h : c.hyps) hs.push_back(applySolution(h, s));
  return v.check(hs, applySolution(c.lhs, s), applySolution(c.head, s), c.sorts) == Validity::Valid;
}

inline std::set<std::string> shown(const std::vector<ExprPtr>& ps) {
  std::set<std::string> r;
  for (auto& p : ps) r.insert(show(p));
  return r;
}

// Exhaustive oracle: walk the assignment lattice (every subset of every kappa's
// qualifier instances) from the top down; the first assignment satisfying all
// kappa-headed clauses is the strongest fixpoint, since satisfying assignments
// are closed under union. The solver must return it and agree on safety.
struct BruteStats {
  int nonEmpty = 0;  // sets whose strongest fixpoint keeps some instance
  int unsafe = 0;
};

inline std::string solverVsBruteForce(int sets, unsigned seed, BruteStats* stats = nullptr) {
  std::mt19937 rng(seed);
  FiniteValidator v;
  for (int n = 0; n < sets; n++) {
    auto rh = randomHorn(rng);
    std::vector<std::pair<int, ExprPtr>> slots;
    for (auto& [id, k] : rh.cs.kappas) {
      auto inst = instantiate(k, rh.quals);
      if (inst.size() > 6) return "generator produced more than 6 instances for one kappa";
      for (auto& q : inst) slots.push_back({id, q});
    }
    const unsigned bits = static_cast<unsigned>(slots.size());
    auto solutionOf = [&](unsigned mask) {
      Solution s;
      for (auto& [id, k] : rh.cs.kappas) s[id];
      for (unsigned i = 0; i < bits; i++)
        if (mask & (1u << i)) s[slots[i].first].push_back(slots[i].second);
      return s;
    };
    // per clause, memoized on the bits of the kappas it mentions
    std::vector<unsigned> relevant;
    for (auto& c : rh.cs.clauses) {
      std::set<int> ks;
      for (auto& h : c.hyps) kappasOf(h, ks);
      kappasOf(c.lhs, ks);
      kappasOf(c.head, ks);
      unsigned m = 0;
      for (unsigned i = 0; i < bits; i++)
        if (ks.count(slots[i].first)) m |= 1u << i;
      relevant.push_back(m);
    }
    std::vector<std::map<unsigned, bool>> memo(rh.cs.clauses.size());
    auto fixpoint = [&](unsigned mask) {
      for (size_t i = 0; i < rh.cs.clauses.size(); i++) {
        auto& c = rh.cs.clauses[i];
        if (c.head->kind != ExprKind::KVar) continue;
        unsigned key = mask & relevant[i];
        auto it = memo[i].find(key);
        if (it == memo[i].end()) it = memo[i].emplace(key, clauseHolds(c, solutionOf(key), v)).first;
        if (!it->second) return false;
      }
      return true;
    };
    std::optional<unsigned> best;
    for (int pc = static_cast<int>(bits); pc >= 0 && !best; pc--) {
      if (pc == 0) {
        if (fixpoint(0)) best = 0;
        break;
      }
      // masks with pc bits set, in increasing order
      unsigned m = (1u << pc) - 1;
      while (m < (1u << bits)) {
        if (fixpoint(m)) {
          best = m;
          break;
        }
        unsigned t = m | (m - 1);
        m = (t + 1) | (((~t & -~t) - 1) >> (__builtin_ctz(m) + 1));
      }
    }
    auto got = solve(rh.cs, rh.quals, v);
    std::string where = "set " + std::to_string(n) + ":\n" + show(rh.cs);
    if (!best) return where + "no fixpoint at all (the empty assignment must be one)";
    auto want = solutionOf(*best);
    for (auto& [id, ps] : want)
      if (shown(got.sol[id]) != shown(ps))
        return where + "k" + std::to_string(id) + " solver " + show(E::conj(got.sol[id])) + " vs oracle " +
               show(E::conj(ps));
    bool safe = true;
    for (auto& c : rh.cs.clauses)
      if (c.head->kind != ExprKind::KVar) safe = safe && clauseHolds(c, want, v);
    if (got.ok != safe) return where + "safety verdict differs";
    if (stats) {
      stats->nonEmpty += *best != 0;
      stats->unsafe += !safe;
    }
  }
  return "";
}

// ---------------------------------------------------------------- corpus round trips

inline const std::vector<std::string>& corpusFiles() {
  static const std::vector<std::string> fs{"abs.limp",    "absR.limp",     "absL.limp",      "absL_refined.limp",
                                           "insert.limp", "insertSort.limp", "client.limp",  "ifexample.limp",
                                           "nullderef.limp", "fnull.limp"};
  return fs;
}

// print/parse is a fixpoint; writing the inferred signatures back as
// annotations verifies again with the same verdict and the same signatures
inline std::string roundTrip(const std::string& name) {
  auto p = load(name);
  auto once = printProgram(p);
  auto twice = printProgram(frontEnd(once));
  if (once != twice) return name + ": print/parse is not a fixpoint";
  auto qs = quals(p);
  auto r1 = verify(p, qs, defaultOptions());
  Program q = p;
  for (auto& f : q.functions) {
    auto it = r1.templates.find(f.name);
    if (it != r1.templates.end()) f.schema = applySolution(it->second, r1.solved.sol);
  }
  Program q2;
  try {
    q2 = frontEnd(printProgram(q));
  } catch (const std::exception& e) {
    return name + ": annotated program does not reparse: " + e.what();
  }
  auto r2 = verify(q2, qs, defaultOptions());
  for (size_t i = 0; i < r1.functions.size(); i++) {
    auto& a = r1.functions[i];
    auto& b = r2.functions[i];
    if (a.status != b.status) return name + ": " + a.name + " was " + a.status + ", annotated " + b.status;
    if (a.status == "safe" && a.signature != b.signature)
      return name + ": " + a.name + " signature " + a.signature + " became " + b.signature;
  }
  return "";
}

inline std::string corpusRoundTrip() {
  for (auto& f : corpusFiles())
    if (auto e = roundTrip(f); !e.empty()) return e;
  return "";
}

// ---------------------------------------------------------------- measures vs snapshots

// list of the given data values, cells at addresses base, base+1, ...
inline SnapPtr listSnap(const std::vector<long long>& data, long long base = 100) {
  SnapPtr cur = S::null();
  for (size_t i = data.size(); i-- > 0;)
    cur = S::ptr(base + static_cast<long long>(i), S::rec({{"data", S::integer(data[i])}, {"next", cur}}));
  return cur;
}

inline std::string measureVsWalk(int snapshots, unsigned seed) {
  auto p = load("absL.limp");
  auto* len = p.findMeasure("len");
  if (!len) return "no len measure";
  std::mt19937 rng(seed);
  for (int n = 0; n < snapshots; n++) {
    std::vector<long long> data(rng() % 9);
    for (auto& d : data) d = static_cast<long long>(rng() % 21) - 10;
    auto s = listSnap(data, 1 + static_cast<long long>(rng() % 1000));
    auto m = evalMeasure(p, *len, s);
    auto cells = walk(s).cells.size();
    if (m->kind != Snap::Int || m->i != static_cast<long long>(cells))
      return "len " + show(m) + " vs " + std::to_string(cells) + " cells for " + show(s);
  }
  auto two = evalMeasure(p, *len, listSnap({7, -7}));
  if (two->kind != Snap::Int || two->i != 2) return "two-cell list has len " + show(two);
  return "";
}

// ---------------------------------------------------------------- elaboration

inline std::string elaborationLaws() {
  for (auto& f : corpusFiles()) {
    auto p = load(f);
    auto e1 = elaborate(p);
    auto e2 = elaborate(e1);
    if (printProgram(e1) != printProgram(e2)) return f + ": elaboration is not idempotent";
    if (printProgram(eraseAnnotations(e1)) != printProgram(eraseAnnotations(p)))
      return f + ": erasing the annotations does not give back the input";
  }
  return "";
}

}  // namespace art::testing
