#include "art/solve.hpp"

#include <future>
#include <set>

namespace art {

namespace {

void assignments(const std::vector<std::pair<std::string, std::string>>& wild, size_t i,
                 const std::vector<std::pair<std::string, std::string>>& scope, VarSubst& cur,
                 const std::function<void()>& k) {
  if (i == wild.size()) {
    k();
    return;
  }
  for (auto& [n, so] : scope) {
    if (!sortMatches(wild[i].second, so)) continue;
    cur[wild[i].first] = E::var(n);
    assignments(wild, i + 1, scope, cur, k);
  }
  cur.erase(wild[i].first);
}

RefType mapPred(const RefType& t, const Solution& s) {
  BasePtr b = t.base;
  if (b->kind == BaseKind::Record) {
    std::vector<FieldType> fs;
    for (auto& f : b->fields) fs.push_back({f.name, mapPred(f.type, s)});
    b = T::record(fs);
  } else if (b->kind == BaseKind::App) {
    std::vector<RefType> as;
    for (auto& a : b->args) as.push_back(mapPred(a, s));
    b = T::app(b->name, as);
  }
  ExprPtr p = t.pred ? applySolution(t.pred, s) : nullptr;
  if (p && isTrue(p)) p = nullptr;
  return RefType{b, p};
}

}  // namespace

std::vector<ExprPtr> instantiate(const KappaInfo& k, const std::vector<Qualifier>& quals) {
  std::vector<ExprPtr> out;
  std::set<std::string> seen;
  for (auto& q : quals) {
    if (!sortMatches(q.nuSort, k.nuSort)) continue;
    VarSubst cur;
    assignments(q.wildcards, 0, k.scope, cur, [&] {
      auto e = cur.empty() ? q.body : applyPending(q.body, cur);
      if (seen.insert(show(e)).second) out.push_back(e);
    });
  }
  return out;
}

ExprPtr kappaPred(const Solution& s, int k) {
  auto it = s.find(k);
  if (it == s.end()) return E::tt();
  return E::conj(it->second);
}

ExprPtr applySolution(const ExprPtr& e, const Solution& s) {
  if (!e) return e;
  if (e->kind == ExprKind::KVar) return applyPending(kappaPred(s, e->kappa), e->pending);
  if (e->args.empty()) return e;
  Expr c = *e;
  bool changed = false;
  for (auto& a : c.args) {
    auto n = applySolution(a, s);
    changed |= n != a;
    a = n;
  }
  if (!changed) return e;
  if (c.kind == ExprKind::Binary && c.op == Op::And) return E::conj2(c.args[0], c.args[1]);
  return std::make_shared<const Expr>(std::move(c));
}

RefType applySolution(const RefType& t, const Solution& s) { return mapPred(t, s); }

Heap applySolution(const Heap& h, const Solution& s) {
  Heap r = h;
  for (auto& e : r.entries) e.type = mapPred(e.type, s);
  return r;
}

Schema applySolution(const Schema& sc, const Solution& s) {
  Schema r = sc;
  for (auto& [x, t] : r.args) t = mapPred(t, s);
  r.inHeap = applySolution(r.inHeap, s);
  r.outType = mapPred(r.outType, s);
  r.outHeap = applySolution(r.outHeap, s);
  return r;
}

std::string showSolution(const Solution& s) {
  std::string out;
  for (auto& [k, ps] : s) out += "k" + std::to_string(k) + " := " + show(E::conj(ps)) + "\n";
  return out;
}

SolveResult solveFrom(const ConstraintSet& cs, Solution sol, Validator& v, const SolveOptions& o) {
  SolveResult r;
  auto hypsOf = [&](const HornClause& c) {
    std::vector<ExprPtr> hs;
    for (auto& h : c.hyps) hs.push_back(applySolution(h, sol));
    return hs;
  };
  int workers = std::max(1, o.workers);
  for (bool changed = true; changed;) {
    changed = false;
    r.rounds++;
    for (auto& c : cs.clauses) {
      if (c.head->kind != ExprKind::KVar) continue;
      auto& cands = sol[c.head->kappa];
      if (cands.empty()) continue;
      auto hs = hypsOf(c);
      auto lhs = applySolution(c.lhs, sol);
      std::vector<ExprPtr> inst;
      for (auto& q : cands) inst.push_back(applyPending(q, c.head->pending));
      r.checks++;
      if (v.check(hs, lhs, E::conj(inst), c.sorts) == Validity::Valid) continue;
      std::vector<char> keep(inst.size(), 0);
      auto run = [&](size_t from, size_t step) {
        for (size_t i = from; i < inst.size(); i += step) keep[i] = v.check(hs, lhs, inst[i], c.sorts) == Validity::Valid;
      };
      r.checks += static_cast<long>(inst.size());
      if (workers == 1 || inst.size() < 2) {
        run(0, 1);
      } else {
        std::vector<std::future<void>> fs;
        size_t n = std::min<size_t>(static_cast<size_t>(workers), inst.size());
        for (size_t w = 0; w < n; w++) fs.push_back(std::async(std::launch::async, run, w, n));
        for (auto& f : fs) f.get();
      }
      std::vector<ExprPtr> next;
      for (size_t i = 0; i < cands.size(); i++)
        if (keep[i]) next.push_back(cands[i]);
      cands = std::move(next);
      changed = true;
    }
  }
  for (auto& c : cs.clauses) {
    if (c.head->kind == ExprKind::KVar) continue;
    r.checks++;
    auto res = v.check(hypsOf(c), applySolution(c.lhs, sol), applySolution(c.head, sol), c.sorts);
    if (res != Validity::Valid) r.failed.push_back(c);
  }
  r.ok = r.failed.empty();
  r.sol = std::move(sol);
  return r;
}

SolveResult solve(const ConstraintSet& cs, const std::vector<Qualifier>& quals, Validator& v, const SolveOptions& o) {
  Solution sol;
  for (auto& [id, k] : cs.kappas) sol[id] = instantiate(k, quals);
  return solveFrom(cs, std::move(sol), v, o);
}

}  // namespace art
