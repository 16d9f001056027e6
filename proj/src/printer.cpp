#include <sstream>

#include "art/frontend.hpp"

namespace art {

namespace {

int progPrec(Op op) {
  switch (op) {
    case Op::Or: return 2;
    case Op::And: return 3;
    case Op::Eq:
    case Op::Ne:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge: return 4;
    case Op::Add:
    case Op::Sub: return 5;
    case Op::Mul: return 6;
    default: return 1;
  }
}

void progTo(std::ostringstream& os, const ExprPtr& e, int ctx) {
  switch (e->kind) {
    case ExprKind::Binary: {
      int p = progPrec(e->op);
      bool paren = p < ctx || (p == ctx && p == 4);
      if (paren) os << "(";
      progTo(os, e->args[0], p);
      os << " " << (e->op == Op::Eq ? std::string("==") : showOp(e->op)) << " ";
      progTo(os, e->args[1], p + 1);
      if (paren) os << ")";
      return;
    }
    case ExprKind::Unary:
      os << showOp(e->op);
      progTo(os, e->args[0], 8);
      return;
    default: os << show(e);
  }
}

std::string pad(int n) { return std::string(static_cast<size_t>(n) * 2, ' '); }

void stmtTo(std::ostringstream& os, const Stmt& s, int ind) {
  switch (s.kind) {
    case StmtKind::Assign: os << pad(ind) << "var " << s.x << " = " << printProgExpr(s.e) << ";\n"; return;
    case StmtKind::Read: os << pad(ind) << "var " << s.x << " = " << show(s.e) << "." << s.f << ";\n"; return;
    case StmtKind::Write: os << pad(ind) << s.x << "." << s.f << " = " << printProgExpr(s.e) << ";\n"; return;
    case StmtKind::Alloc: {
      os << pad(ind) << "var " << s.x << " = {";
      for (size_t i = 0; i < s.fields.size(); i++)
        os << (i ? ", " : "") << s.fields[i].first << ": " << printProgExpr(s.fields[i].second);
      os << "};\n";
      return;
    }
    case StmtKind::Call: {
      os << pad(ind);
      if (!s.x.empty()) os << "var " << s.x << " = ";
      os << s.f << "(";
      for (size_t i = 0; i < s.args.size(); i++) os << (i ? ", " : "") << printProgExpr(s.args[i]);
      os << ");\n";
      return;
    }
    case StmtKind::If:
      os << pad(ind) << "if (" << printProgExpr(s.e) << ") {\n";
      for (auto& c : s.thenB) stmtTo(os, *c, ind + 1);
      os << pad(ind) << "}";
      if (s.hasElse) {
        os << " else {\n";
        for (auto& c : s.elseB) stmtTo(os, *c, ind + 1);
        os << pad(ind) << "}";
      }
      os << "\n";
      return;
    case StmtKind::Return:
      os << pad(ind) << "return";
      if (s.e) os << " " << printProgExpr(s.e);
      os << ";\n";
      return;
    case StmtKind::Unfold: os << pad(ind) << "//: unfold(&" << s.x << ");\n"; return;
    case StmtKind::Fold: os << pad(ind) << "//: fold(&" << s.x << ");\n"; return;
    case StmtKind::Conc: os << pad(ind) << "//: conc(" << s.x << ");\n"; return;
    case StmtKind::Pad: os << pad(ind) << "//: pad(&" << s.x << ");\n"; return;
  }
}

}  // namespace

std::string printProgExpr(const ExprPtr& e) {
  std::ostringstream os;
  progTo(os, e, 0);
  return os.str();
}

std::string printBlock(const Block& b, int indent) {
  std::ostringstream os;
  for (auto& s : b) stmtTo(os, *s, indent);
  return os.str();
}

std::string printSchema(const Schema& s) { return show(s); }

std::string printProgram(const Program& p) {
  std::ostringstream os;
  bool first = true;
  auto sep = [&]() {
    if (!first) os << "\n";
    first = false;
  };
  for (auto& d : p.types) {
    sep();
    os << "type " << d.name;
    if (!d.params.empty()) {
      os << "[";
      for (size_t i = 0; i < d.params.size(); i++) os << (i ? ", " : "") << d.params[i];
      os << "]";
    }
    os << " = ";
    if (!d.exHeap.entries.empty()) os << "exists! " << show(d.exHeap) << " . ";
    os << d.rootBinder << ": " << show(d.root) << "\n";
  }
  for (auto& m : p.measures) {
    sep();
    os << "measure " << m.name << ": " << m.ctor << " -> " << (m.boolResult ? "bool" : "int") << "\n";
    if (m.nullBody) os << m.name << "(null) = " << show(m.nullBody) << ";\n";
    os << m.name << "(" << m.param << ") = " << show(m.consBody) << ";\n";
  }
  for (auto& q : p.quals) {
    sep();
    os << show(q) << "\n";
  }
  for (auto& f : p.functions) {
    sep();
    if (f.schema) os << f.name << " :: " << show(*f.schema) << "\n";
    os << "function " << f.name << "(";
    for (size_t i = 0; i < f.params.size(); i++) os << (i ? ", " : "") << f.params[i];
    os << ") {\n" << printBlock(f.body, 1) << "}\n";
  }
  return os.str();
}

}  // namespace art
