#include "art/elaborate.hpp"

#include <algorithm>

#include "art/cgen.hpp"

namespace art {

namespace {

StmtPtr annot(StmtKind k, const std::string& x, Span sp) {
  auto s = std::make_shared<Stmt>();
  s->kind = k;
  s->x = x;
  s->span = sp;
  return s;
}

bool foldable(const Program& p, const World& w, const std::string& l) {
  if (w.unfoldCtor.count(l)) return true;
  auto* h = w.sigma.find(l);
  if (!h || h->type.base->kind != BaseKind::Record) return false;
  std::set<std::string> have;
  for (auto& f : h->type.base->fields) have.insert(f.name);
  for (auto& d : p.types) {
    std::set<std::string> want;
    for (auto& f : d.root.base->fields) want.insert(f.name);
    if (want == have) return true;
  }
  return false;
}

class Elaborator {
 public:
  explicit Elaborator(const Program& p) : prog_(p), c_(p, CgenOptions{false, true}) {}

  Program run() {
    Program out = prog_;
    for (auto& f : out.functions) {
      if (!f.schema) continue;
      auto w = c_.entry(f);
      f.body = block(w, f.body);
      if (!w.bottom) {
        beforeTarget(w, c_.matchReturn(w, nullptr), f.body, f.span);
        c_.finish(w, f.span);
      }
    }
    return out;
  }

 private:
  const Program& prog_;
  Checker c_;

  void put(World& w, Block& out, StmtPtr s) {
    c_.step(w, *s);
    out.push_back(std::move(s));
  }

  // folds and pads needed before a call or return
  void beforeTarget(World& w, const Checker::Match& m, Block& out, Span sp) {
    for (auto& l : foldList(w.sigma, m.target, w.U)) put(w, out, annot(StmtKind::Fold, c_.displayLoc(w, l), sp));
    // pads already pending (written by the user) are consumed first
    for (size_t i = w.pads.size(); i < m.missing.size(); i++)
      put(w, out, annot(StmtKind::Pad, w.locs.fresh(m.missing[i]), sp));
  }

  void access(World& w, const std::string& x, Block& out, Span sp) {
    auto* e = w.gamma.lookup(x);
    if (e && e->type.base->kind == BaseKind::MaybeRef) put(w, out, annot(StmtKind::Conc, x, sp));
    for (auto& l : unfoldList(x, w.gamma, w.sigma, w.U)) put(w, out, annot(StmtKind::Unfold, c_.displayLoc(w, l), sp));
  }

  // locations whose records must be folded at the end of a branch
  std::set<std::string> foldSet(const World& pre, const World& a, const World& b) {
    std::set<std::string> r;
    auto fresh = [&](const World& x) {
      for (auto& h : x.sigma.entries) {
        if (h.type.base->kind != BaseKind::Record) continue;
        auto* p = pre.sigma.find(h.loc);
        if (!p || p->type.base->kind != BaseKind::Record) r.insert(h.loc);
      }
    };
    if (!a.bottom) fresh(a);
    if (!b.bottom) fresh(b);
    if (!a.bottom && !b.bottom) {
      for (auto& h : a.sigma.entries)
        if (aliasCheck(h.loc, a.sigma, b.sigma)) r.insert(h.loc);
    }
    // unfolded before the if and folded in some branch
    for (auto& h : pre.sigma.entries) {
      if (h.type.base->kind != BaseKind::Record) continue;
      auto folded = [&](const World& x) {
        auto* q = x.sigma.find(h.loc);
        return !x.bottom && q && q->type.base->kind == BaseKind::App;
      };
      if (folded(a) || folded(b)) r.insert(h.loc);
    }
    return r;
  }

  void closeBranch(World& x, const std::set<std::string>& fs, Block& out, Span sp) {
    if (x.bottom) return;
    std::set<std::string> seeds;
    for (auto& l : fs)
      if (foldable(prog_, x, l)) seeds.insert(l);
    for (auto& l : foldClosure(x.sigma, seeds)) {
      if (!foldable(prog_, x, l)) continue;
      put(x, out, annot(StmtKind::Fold, c_.displayLoc(x, l), sp));
      for (auto it = x.U.begin(); it != x.U.end();) it = it->first == l ? x.U.erase(it) : std::next(it);
    }
  }

  Block block(World& w, const Block& in) {
    Block out;
    for (auto& sp : in) {
      if (w.bottom) {
        out.push_back(sp);
        continue;
      }
      const Stmt& s = *sp;
      switch (s.kind) {
        case StmtKind::Read: access(w, s.e->name, out, s.span); put(w, out, sp); break;
        case StmtKind::Write: access(w, s.x, out, s.span); put(w, out, sp); break;
        case StmtKind::Call: beforeTarget(w, c_.matchCall(w, s), out, s.span); put(w, out, sp); break;
        case StmtKind::Return: beforeTarget(w, c_.matchReturn(w, &s), out, s.span); put(w, out, sp); break;
        case StmtKind::If: {
          auto ns = std::make_shared<Stmt>(s);
          auto [a, b] = c_.branch(w, s.e);
          ns->thenB = block(a, s.thenB);
          ns->elseB = block(b, s.elseB);
          auto fs = foldSet(w, a, b);
          closeBranch(a, fs, ns->thenB, s.span);
          closeBranch(b, fs, ns->elseB, s.span);
          if (!a.bottom && !b.bottom) {
            for (auto& l : padLocs(a.sigma, b.sigma)) put(a, ns->thenB, annot(StmtKind::Pad, l, s.span));
            for (auto& l : padLocs(b.sigma, a.sigma)) put(b, ns->elseB, annot(StmtKind::Pad, l, s.span));
          }
          if (!ns->elseB.empty()) ns->hasElse = true;
          w = c_.join(w, std::move(a), std::move(b), s.span);
          out.push_back(ns);
          break;
        }
        default: put(w, out, sp); break;
      }
    }
    return out;
  }
};

}  // namespace

Program elaborate(const Program& p) { return Elaborator(p).run(); }

}  // namespace art
