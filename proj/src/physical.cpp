#include "art/physical.hpp"

#include <algorithm>
#include <map>

#include "art/fresh.hpp"

namespace art {

bool Unifier::unify(const BasePtr& f, const BasePtr& a) {
  switch (f->kind) {
    case BaseKind::Ref:
    case BaseKind::MaybeRef: {
      if (a->kind == BaseKind::Null) return f->kind == BaseKind::MaybeRef;
      if (!isPtr(a)) return false;
      if (!locVars.count(f->name)) return f->name == a->name;
      auto it = locs.find(f->name);
      if (it != locs.end()) return it->second == a->name;
      locs[f->name] = a->name;
      return true;
    }
    case BaseKind::TyVar: {
      if (!tyVars.count(f->name)) return a->kind == BaseKind::TyVar && a->name == f->name;
      auto it = tys.find(f->name);
      if (it != tys.end()) return sameShape(it->second, a);
      tys[f->name] = eraseB(a);
      return true;
    }
    case BaseKind::Record: {
      if (a->kind != BaseKind::Record || a->fields.size() != f->fields.size()) return false;
      for (size_t i = 0; i < f->fields.size(); i++) {
        if (f->fields[i].name != a->fields[i].name) return false;
        if (!unify(f->fields[i].type.base, a->fields[i].type.base)) return false;
      }
      return true;
    }
    case BaseKind::App: {
      if (a->kind != BaseKind::App || a->name != f->name || a->args.size() != f->args.size()) return false;
      for (size_t i = 0; i < f->args.size(); i++)
        if (!unify(f->args[i].base, a->args[i].base)) return false;
      return true;
    }
    case BaseKind::Null: return a->kind == BaseKind::Null;
    default: return a->kind == f->kind;
  }
}

bool physSub(const BasePtr& actual, const BasePtr& formal) {
  Unifier u;
  return u.unify(formal, actual);
}

std::string LocNamer::fresh(const std::string& hint, bool forVar) {
  std::string base = hint.empty() ? "l" : hint;
  if (!used.count(base) && (forVar || !idents.count(base))) {
    used.insert(base);
    return base;
  }
  std::string stem = stripDigits(base);
  for (int i = 1;; i++) {
    std::string c = stem + std::to_string(i);
    if (!used.count(c) && !idents.count(c)) {
      used.insert(c);
      return c;
    }
  }
}

std::set<std::string> locQuery(const Env& gamma, const std::string& x) {
  std::set<std::string> r;
  if (auto* e = gamma.lookup(x))
    if (isPtr(e->type.base)) r.insert(e->type.base->name);
  return r;
}

std::vector<std::string> unfoldList(const std::string& x, const Env& gamma, const Heap& sigma, Unfolded& u) {
  std::vector<std::string> out;
  for (auto& l : locQuery(gamma, x)) {
    auto* h = sigma.find(l);
    if (!h || h->type.base->kind != BaseKind::App) continue;
    auto key = std::make_pair(l, h->type.base->name);
    if (u.count(key)) continue;
    u.insert(key);
    out.push_back(l);
  }
  return out;
}

Unfolded woundLocs(const Heap& sigma) {
  Unfolded r;
  for (auto& e : sigma.entries)
    if (e.type.base->kind == BaseKind::App) r.insert({e.loc, e.type.base->name});
  return r;
}

std::vector<std::string> foldOrder(const std::set<std::string>& locs, const Heap& sigma) {
  // deps[L] = members of locs that L's record points into
  std::map<std::string, std::set<std::string>> deps;
  for (auto& l : locs) {
    deps[l];
    auto* h = sigma.find(l);
    if (!h) continue;
    std::set<std::string> pts;
    locsOf(h->type.base, pts);
    for (auto& p : pts)
      if (p != l && locs.count(p)) deps[l].insert(p);
  }
  std::vector<std::string> out;
  std::set<std::string> done;
  while (out.size() < locs.size()) {
    bool progressed = false;
    for (auto& [l, ds] : deps) {  // lexicographic
      if (done.count(l)) continue;
      if (std::all_of(ds.begin(), ds.end(), [&](auto& d) { return done.count(d) > 0; })) {
        out.push_back(l);
        done.insert(l);
        progressed = true;
        break;
      }
    }
    if (!progressed) throw InputError(Span{}, "cyclic fold dependency among required folds");
  }
  return out;
}

std::vector<std::string> foldClosure(const Heap& sigma, std::set<std::string> seeds) {
  std::vector<std::string> work(seeds.begin(), seeds.end());
  while (!work.empty()) {
    auto l = work.back();
    work.pop_back();
    auto* h = sigma.find(l);
    if (!h || h->type.base->kind != BaseKind::Record) continue;
    std::set<std::string> pts;
    locsOf(h->type.base, pts);
    for (auto& p : pts) {
      auto* hp = sigma.find(p);
      if (p != l && hp && hp->type.base->kind == BaseKind::Record && !seeds.count(p)) {
        seeds.insert(p);
        work.push_back(p);
      }
    }
  }
  std::set<std::string> recs;
  for (auto& l : seeds) {
    auto* h = sigma.find(l);
    if (h && h->type.base->kind == BaseKind::Record) recs.insert(l);
  }
  return foldOrder(recs, sigma);
}

std::vector<std::string> foldList(const Heap& sigma, const Heap& target, Unfolded& u) {
  std::set<std::string> seeds;
  for (auto& t : target.entries) {
    if (t.type.base->kind != BaseKind::App) continue;
    auto* h = sigma.find(t.loc);
    if (h && h->type.base->kind == BaseKind::Record) seeds.insert(t.loc);
  }
  if (seeds.empty()) return {};
  auto order = foldClosure(sigma, seeds);
  for (auto& l : order)
    for (auto it = u.begin(); it != u.end();) it = it->first == l ? u.erase(it) : std::next(it);
  return order;
}

bool aliasCheck(const std::string& l, const Heap& s1, const Heap& s2) {
  auto* a = s1.find(l);
  auto* b = s2.find(l);
  if (!a || !b || a->type.base->kind != BaseKind::Record || b->type.base->kind != BaseKind::Record) return false;
  for (auto& fa : a->type.base->fields) {
    auto* fb = findField(*b->type.base, fa.name);
    if (!fb) continue;
    std::set<std::string> ls;
    locsOf(fa.type.base, ls);
    locsOf(fb->type.base, ls);
    if (ls.size() > 1) return true;
  }
  return false;
}

std::vector<std::string> padLocs(const Heap& sigma, const Heap& target) {
  std::vector<std::string> r;
  for (auto& l : target.dom())
    if (!sigma.has(l)) r.push_back(l);
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace art
