#pragma once
// Pipeline driver and command line.

#include <iosfwd>
#include <string>
#include <vector>

#include "art/horn.hpp"
#include "art/program.hpp"
#include "art/solve.hpp"

namespace art {

enum ExitCode { kOk = 0, kUnsafe = 1, kInputError = 2, kInternalError = 3 };

struct PipelineOptions {
  SmtConfig smt;
  int workers = 1;
  bool foldNullGuard = true;
};

struct FunctionVerdict {
  std::string name;
  std::string status;  // safe | unsafe
  std::string signature;
  std::vector<HornClause> failures;
};

struct PipelineResult {
  Program elaborated;
  ConstraintSet cs;
  std::map<std::string, Schema> templates;
  SolveResult solved;
  std::vector<FunctionVerdict> functions;
  bool safe() const { return solved.ok; }
};

// parse-level input is already checked; throws InputError / BackendError
Program frontEnd(const std::string& programText);
std::vector<Qualifier> allQualifiers(const Program& p, const std::string& qualText);
PipelineResult verify(const Program& p, const std::vector<Qualifier>& quals, const PipelineOptions& o);

std::string describe(const HornClause& c);

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace art
