#include "art/program.hpp"

namespace art {

bool isAnnotation(StmtKind k) {
  return k == StmtKind::Unfold || k == StmtKind::Fold || k == StmtKind::Conc || k == StmtKind::Pad;
}

const TypeDef* Program::findType(const std::string& c) const {
  for (auto& t : types)
    if (t.name == c) return &t;
  return nullptr;
}

const Function* Program::findFunction(const std::string& f) const {
  for (auto& fn : functions)
    if (fn.name == f) return &fn;
  return nullptr;
}

std::vector<const Measure*> Program::measuresOf(const std::string& ctor) const {
  std::vector<const Measure*> r;
  for (auto& m : measures)
    if (m.ctor == ctor) r.push_back(&m);
  return r;
}

const Measure* Program::findMeasure(const std::string& m) const {
  for (auto& x : measures)
    if (x.name == m) return &x;
  return nullptr;
}

bool alwaysReturns(const Block& b) {
  for (auto& s : b) {
    if (s->kind == StmtKind::Return) return true;
    if (s->kind == StmtKind::If && s->hasElse && alwaysReturns(s->thenB) && alwaysReturns(s->elseB)) return true;
  }
  return false;
}

Block eraseAnnotations(const Block& b) {
  Block r;
  for (auto& s : b) {
    if (isAnnotation(s->kind)) continue;
    if (s->kind == StmtKind::If) {
      auto c = std::make_shared<Stmt>(*s);
      c->thenB = eraseAnnotations(s->thenB);
      c->elseB = eraseAnnotations(s->elseB);
      r.push_back(c);
    } else {
      r.push_back(s);
    }
  }
  return r;
}

Program eraseAnnotations(const Program& p) {
  Program r = p;
  for (auto& f : r.functions) f.body = eraseAnnotations(f.body);
  return r;
}

}  // namespace art
