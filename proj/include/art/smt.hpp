#pragma once
// SMT-LIB2 subprocess backend: QF_UFLIA encoding and validity checks.

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "art/program.hpp"
#include "art/wellformed.hpp"

namespace art {

enum class Validity { Valid, Invalid, Unknown };
enum class SatResult { Sat, Unsat, Unknown };
std::string show(Validity v);

struct SmtConfig {
  std::string solverPath;  // resolved binary
  int timeoutMs = 5000;
  std::string emitDir;  // dump each query as a standalone .smt2
  bool cache = true;
  int workers = 1;
};

// --smt flag, then ART_SMT, then z3 on PATH
std::string resolveSolver(const std::string& flag);

// measure signatures needed by the encoder
struct MeasureSig {
  bool boolResult = false;
  ExprPtr nullValue;  // constant, may be null
};
using MeasureTable = std::map<std::string, MeasureSig>;
MeasureTable measureTable(const Program& p);

// one long-lived solver process
class SmtSession {
 public:
  SmtSession(std::string path, int timeoutMs);
  ~SmtSession();
  SmtSession(const SmtSession&) = delete;
  SmtSession& operator=(const SmtSession&) = delete;
  // body must end with (check-sat); it is bracketed by push/pop
  SatResult run(const std::string& body);

 private:
  std::string path_;
  int timeoutMs_;
  int pid_ = -1;
  int to_ = -1, from_ = -1;
  std::string buf_;
  void start();
  void stop();
  bool send(const std::string& s);
  bool readLine(std::string& line, int timeoutMs);
};

class SmtBackend {
 public:
  explicit SmtBackend(SmtConfig cfg);
  ~SmtBackend();
  void setMeasures(MeasureTable m) { measures_ = std::move(m); }

  // valid iff hyps /\ lhs /\ !rhs is unsat; all predicates kappa-free
  Validity checkImpl(const std::vector<ExprPtr>& hyps, const ExprPtr& lhs, const ExprPtr& rhs,
                     const SortEnv& sorts);
  SatResult checkSat(const std::vector<ExprPtr>& preds, const SortEnv& sorts);

  // query text without the set-logic prologue; exposed for tests
  std::string encodeQuery(const std::vector<ExprPtr>& asserts, const SortEnv& sorts) const;
  std::string encodePred(const ExprPtr& p, const SortEnv& sorts) const;

  long queries() const { return queries_; }
  long cacheHits() const { return hits_; }

 private:
  SmtConfig cfg_;
  MeasureTable measures_;
  std::mutex poolMu_;
  std::vector<std::unique_ptr<SmtSession>> idle_;
  int live_ = 0;
  std::mutex cacheMu_;
  std::unordered_map<std::string, SatResult> cache_;
  std::atomic<long> queries_{0}, hits_{0}, dumped_{0};
  SatResult run(const std::string& body);
};

}  // namespace art
