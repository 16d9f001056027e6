#pragma once
// Helpers shared by the gtest suites and the acceptance runner.

#include <algorithm>
#include <functional>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "art/driver.hpp"
#include "art/frontend.hpp"
#include "art/smt.hpp"

namespace art::testing {

inline std::string corpus(const std::string& name) { return std::string(ART_CORPUS) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Program load(const std::string& name) { return frontEnd(slurp(corpus(name))); }

inline std::vector<Qualifier> quals(const Program& p, const std::string& file = "base.quals") {
  return allQualifiers(p, slurp(corpus(file)));
}

inline PipelineOptions defaultOptions() {
  PipelineOptions o;
  o.smt.solverPath = resolveSolver("");
  return o;
}

inline PipelineResult run(const std::string& name, const std::string& qualFile = "base.quals",
                          PipelineOptions o = defaultOptions()) {
  auto p = load(name);
  return verify(p, quals(p, qualFile), o);
}

// kappa whose origin is fn:tag, in creation order
inline std::vector<int> kappasFrom(const ConstraintSet& cs, const std::string& origin) {
  std::vector<int> r;
  for (auto& [id, k] : cs.kappas)
    if (k.origin == origin) r.push_back(id);
  return r;
}

inline const FunctionVerdict* verdict(const PipelineResult& r, const std::string& fn) {
  for (auto& f : r.functions)
    if (f.name == fn) return &f;
  return nullptr;
}

// Dependency skeleton: each clause becomes body-kappas => head-kappa, where the
// body holds the kappas that flow into the left-hand side: those in it, and
// hypothesis kappas whose value is a variable the left-hand side mentions.
// Kappas introduced inside a body (fold, inst, join) are resolved away by
// composing the clauses that define them with the clauses that use them.
struct Edge {
  std::vector<int> body;  // sorted
  int head = -1;          // -1: concrete
  bool operator<(const Edge& o) const { return std::tie(body, head) < std::tie(o.body, o.head); }
};

inline std::vector<Edge> skeleton(const ConstraintSet& cs) {
  std::vector<Edge> es;
  for (auto& c : cs.clauses) {
    Edge e;
    std::set<int> ks;
    std::set<std::string> lv;
    freeVars(c.lhs, lv);
    std::function<void(const ExprPtr&)> flow = [&](const ExprPtr& h) {
      if (h->kind == ExprKind::KVar) {
        auto it = h->pending.find(kNu);
        if (it != h->pending.end() && it->second->kind == ExprKind::Var && lv.count(it->second->name))
          ks.insert(h->kappa);
        return;
      }
      for (auto& a : h->args) flow(a);
    };
    for (auto& h : c.hyps) flow(h);
    kappasOf(c.lhs, ks);
    e.body.assign(ks.begin(), ks.end());
    e.head = c.head->kind == ExprKind::KVar ? c.head->kappa : -1;
    es.push_back(e);
  }
  for (auto& [id, k] : cs.kappas) {
    if (k.origin != "fold" && k.origin != "inst" && k.origin != "join") continue;
    std::vector<Edge> defs, rest;
    for (auto& e : es) (e.head == id ? defs : rest).push_back(e);
    std::vector<Edge> out;
    for (auto& e : rest) {
      auto it = std::find(e.body.begin(), e.body.end(), id);
      if (it == e.body.end()) {
        out.push_back(e);
        continue;
      }
      for (auto& d : defs) {
        if (std::count(d.body.begin(), d.body.end(), id)) continue;
        Edge n;
        std::set<int> b(e.body.begin(), e.body.end());
        b.erase(id);
        b.insert(d.body.begin(), d.body.end());
        n.body.assign(b.begin(), b.end());
        n.head = e.head;
        out.push_back(n);
      }
    }
    es = std::move(out);
  }
  return es;
}

inline std::string showEdge(const Edge& e) {
  std::string s;
  for (size_t i = 0; i < e.body.size(); i++) s += (i ? " /\\ k" : "k") + std::to_string(e.body[i]);
  if (e.body.empty()) s = "true";
  return s + " => " + (e.head < 0 ? std::string("concrete") : "k" + std::to_string(e.head));
}

// kappa-to-kappa edges into one kappa, one per line, sorted
inline std::string skeletonInto(const ConstraintSet& cs, int head) {
  std::vector<std::string> ls;
  for (auto& e : skeleton(cs))
    if (e.head == head && !e.body.empty()) ls.push_back(showEdge(e));
  std::sort(ls.begin(), ls.end());
  std::string out;
  for (auto& l : ls) out += l + "\n";
  return out;
}

// every clause whose head is the given kappa, printed in emission order
inline std::string clausesInto(const ConstraintSet& cs, int head) {
  std::string out;
  for (auto& c : cs.clauses)
    if (c.head->kind == ExprKind::KVar && c.head->kappa == head) out += show(c) + "\n";
  return out;
}

}  // namespace art::testing
