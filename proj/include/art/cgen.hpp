#pragma once
// Constraint generation: symbolic execution of annotated statements over
// worlds (environment, heap), emitting Horn clauses over kappa templates.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "art/fresh.hpp"
#include "art/horn.hpp"
#include "art/physical.hpp"
#include "art/program.hpp"

namespace art {

struct CgenOptions {
  bool emit = true;           // false: physical simulation only (used by the elaborator)
  bool foldNullGuard = true;  // test switch: keep the Field != null guard when folding through ?ref
};

struct World {
  Env gamma;
  Heap sigma;
  std::vector<std::string> pads;                 // pending pads, oldest first
  std::map<std::string, std::string> unfoldCtor;  // location -> constructor it was unfolded from
  Unfolded U;
  LocNamer locs;
  std::map<std::string, std::string> params;  // parameter -> logical name of its entry value
  bool bottom = false;
};

// heap binding facts: (L = null => b = null) and (L != null => <ty>(b))
ExprPtr facts(const ExprPtr& term, const RefType& t);
std::vector<ExprPtr> hypotheses(const World& w);

// program-expression base type
BasePtr typeOfExpr(const Env& gamma, const ExprPtr& e, Span sp);

// template every missing output refinement with a fresh kappa
struct Templates {
  std::map<std::string, Schema> schemas;
};

// the builtin assert
Schema assertSchema();

class Checker {
 public:
  Checker(const Program& p, CgenOptions o = {});

  const Program& program() const { return prog_; }
  const std::map<std::string, Schema>& templates() const { return tmpl_; }
  ConstraintSet& constraints() { return cs_; }

  // world at entry of f; makes f current
  World entry(const Function& f);
  void exec(World& w, const Block& b);
  // one statement other than if
  void step(World& w, const Stmt& s);
  std::pair<World, World> branch(const World& w, const ExprPtr& cond) const;
  World join(const World& pre, World a, World b, Span sp);
  // implicit void return at the end of a body
  void finish(World& w, Span sp);

  // annotation arguments: a variable names the cell it points to
  std::string resolveLoc(const World& w, const std::string& name) const;
  std::string displayLoc(const World& w, const std::string& loc) const;

  // heap required by a call / return in the caller's location names (erased);
  // missing lists formal locations that no actual location matches
  struct Match {
    Heap target;
    std::vector<std::string> missing;
  };
  Match matchCall(const World& w, const Stmt& s) const;
  Match matchReturn(const World& w, const Stmt* s) const;

  // visited before every statement
  std::function<void(const World&, const Stmt&)> onStmt;

  const Function* current() const { return fn_; }
  int kappaCount() const { return nextKappa_; }

 private:
  const Program& prog_;
  CgenOptions opt_;
  ConstraintSet cs_;
  std::map<std::string, Schema> tmpl_;
  FreshNames base_, names_;
  std::set<std::string> progIdents_;
  const Function* fn_ = nullptr;
  int nextKappa_ = 0;
  int nextClause_ = 0;

  const Schema& schemaOf(const std::string& f, Span sp) const;
  int newKappa(const std::string& nuSort, const std::vector<std::pair<std::string, std::string>>& scope,
               const std::string& origin);
  std::vector<std::pair<std::string, std::string>> scopeOf(const World& w) const;
  RefType kappaType(const BasePtr& shape, const std::vector<std::pair<std::string, std::string>>& scope,
                    const std::string& origin);
  void mkTemplates();
  RefType templ(const RefType& t, bool output, const std::vector<std::pair<std::string, std::string>>& scope,
                const std::string& origin);

  void emit(const World& w, const ExprPtr& lhs, const std::vector<ExprPtr>& head, const std::string& nuSort,
            const std::vector<ExprPtr>& extra, const std::string& tag, Span sp);
  void subCon(const World& w, const RefType& t1, const RefType& t2, const ExprPtr& self,
              const std::vector<ExprPtr>& extra, const std::string& tag, Span sp);

  void materializePad(World& w, const std::string& loc, const RefType& t);
  std::string takePad(World& w, Span sp, const std::string& why);
  ExprPtr measureFacts(const std::string& ctor, const ExprPtr& root, const std::string& param,
                       const std::function<ExprPtr(const std::string&)>& fieldTerm) const;

  void doUnfold(World& w, const std::string& loc, Span sp);
  void doFold(World& w, const std::string& loc, Span sp);
  void doConc(World& w, const std::string& x, Span sp);
  void doCall(World& w, const Stmt& s);
  void doReturn(World& w, const Stmt* s, Span sp);
  void addHeap(World& w, const std::string& loc);
  // bind a program variable; an older binding of the name is renamed apart
  void rebind(World& w, const std::string& x, RefType t);
};

struct CgenResult {
  ConstraintSet cs;
  std::map<std::string, Schema> templates;
};
// the program must already carry its heap annotations
CgenResult generate(const Program& p, const CgenOptions& o = {});

}  // namespace art
