#pragma once
// Program AST for LImp.

#include <optional>

#include "art/types.hpp"

namespace art {

struct Stmt;
using StmtPtr = std::shared_ptr<Stmt>;
using Block = std::vector<StmtPtr>;

enum class StmtKind { Assign, Read, Write, Alloc, Call, If, Return, Unfold, Fold, Conc, Pad };

struct Stmt {
  StmtKind kind;
  std::string x;  // bound / receiver / annotated variable or location
  std::string f;  // field or callee
  ExprPtr e;      // rhs, condition, return value (null for void return)
  std::vector<std::pair<std::string, ExprPtr>> fields;  // Alloc
  std::vector<ExprPtr> args;                           // Call
  Block thenB, elseB;
  bool hasElse = false;
  Span span;
};

bool isAnnotation(StmtKind k);

struct Function {
  std::string name;
  std::vector<std::string> params;
  std::optional<Schema> schema;
  Block body;
  Span span;
};

struct Program {
  std::vector<TypeDef> types;
  std::vector<Measure> measures;
  std::vector<Function> functions;
  std::vector<Qualifier> quals;  // qualif lines found in the program file
  const TypeDef* findType(const std::string& c) const;
  const Function* findFunction(const std::string& f) const;
  std::vector<const Measure*> measuresOf(const std::string& ctor) const;
  const Measure* findMeasure(const std::string& m) const;
};

// definite return on every path
bool alwaysReturns(const Block& b);

Block eraseAnnotations(const Block& b);
Program eraseAnnotations(const Program& p);

}  // namespace art
