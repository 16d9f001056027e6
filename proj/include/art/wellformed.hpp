#pragma once
// Well-formedness judgments and snapshot typing.

#include <map>
#include <optional>

#include "art/fresh.hpp"
#include "art/program.hpp"

namespace art {

using WfResult = std::optional<Diagnostic>;  // nullopt = ok

// sorts assigned to symbols while checking a refinement
using SortEnv = std::map<std::string, std::string>;

struct WfContext {
  const Program* prog = nullptr;  // for measure and constructor lookup
  Span span;
};

// sort of a term, or a diagnostic
std::string sortCheck(const ExprPtr& e, const SortEnv& env, const WfContext& cx);

SortEnv envSorts(const Env& gamma, const Heap& sigma);
WfResult wfType(const Env& gamma, const Heap& sigma, const RefType& t, const WfContext& cx = {});
WfResult wfHeap(const Env& gamma, const Heap& sigma, const WfContext& cx = {});
WfResult wfTypeDef(const TypeDef& d, const WfContext& cx = {});
WfResult wfMeasure(const TypeDef& d, const Measure& m, const WfContext& cx = {});
WfResult wfSchema(const Env& gamma, const Heap& sigma, const Schema& s, const WfContext& cx = {});
// whole program: definitions, measures, every function has a well-formed signature
WfResult wfProgram(const Program& p);

struct Sort;
using SortPtr = std::shared_ptr<const Sort>;
struct Sort {
  enum Kind { Int, Bool, Pointer, Null, Record, Snapshot, Product, Union, TyVar, Void } kind = Int;
  std::string name;  // constructor / type variable
  std::vector<std::pair<std::string, SortPtr>> fields;
  std::vector<SortPtr> parts;  // product / union
};
std::string show(const SortPtr& s);
SortPtr snapTy(const BasePtr& t, const Heap& sigma);

}  // namespace art
