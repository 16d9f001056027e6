#include "art/smt.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "art/fresh.hpp"

namespace art {

std::string show(Validity v) {
  switch (v) {
    case Validity::Valid: return "valid";
    case Validity::Invalid: return "invalid";
    case Validity::Unknown: return "unknown";
  }
  return "?";
}

namespace {
bool executable(const std::string& p) { return !p.empty() && access(p.c_str(), X_OK) == 0; }
}  // namespace

std::string resolveSolver(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ART_SMT"); env && *env) return env;
  if (const char* path = std::getenv("PATH")) {
    std::stringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
      std::string c = dir + "/z3";
      if (executable(c)) return c;
    }
  }
  return "z3";
}

MeasureTable measureTable(const Program& p) {
  MeasureTable t;
  for (auto& m : p.measures) t[m.name] = MeasureSig{m.boolResult, m.nullBody};
  return t;
}

// ---------------------------------------------------------------- session

SmtSession::SmtSession(std::string path, int timeoutMs) : path_(std::move(path)), timeoutMs_(timeoutMs) { start(); }

SmtSession::~SmtSession() { stop(); }

void SmtSession::start() {
  if (path_.empty()) throw BackendError("no SMT solver found (use --smt or ART_SMT)");
  if (path_.find('/') != std::string::npos && access(path_.c_str(), X_OK) != 0)
    throw BackendError("SMT solver '" + path_ + "' is not executable");
  int toChild[2], fromChild[2];
  if (pipe(toChild) != 0 || pipe(fromChild) != 0) throw BackendError("creating solver pipes failed");
  pid_ = fork();
  if (pid_ < 0) throw BackendError("forking solver process failed");
  if (pid_ == 0) {
    dup2(toChild[0], STDIN_FILENO);
    dup2(fromChild[1], STDOUT_FILENO);
    dup2(fromChild[1], STDERR_FILENO);
    close(toChild[0]);
    close(toChild[1]);
    close(fromChild[0]);
    close(fromChild[1]);
    std::vector<char*> argv = {strdup(path_.c_str()), strdup("-in"), strdup("-smt2"), nullptr};
    execv(argv[0], argv.data());
    execvp(argv[0], argv.data());
    _exit(127);
  }
  close(toChild[0]);
  close(fromChild[1]);
  to_ = toChild[1];
  from_ = fromChild[0];
  buf_.clear();
  signal(SIGPIPE, SIG_IGN);
  std::string prologue = "(set-option :print-success false)\n(set-logic QF_UFLIA)\n";
  if (path_.find("z3") != std::string::npos) prologue += "(set-option :timeout " + std::to_string(timeoutMs_) + ")\n";
  if (!send(prologue)) throw BackendError("cannot talk to solver '" + path_ + "'");
}

void SmtSession::stop() {
  if (pid_ <= 0) return;
  send("(exit)\n");
  close(to_);
  close(from_);
  // give it a moment, then make sure
  for (int i = 0; i < 20; i++) {
    if (waitpid(pid_, nullptr, WNOHANG) == pid_) {
      pid_ = -1;
      return;
    }
    usleep(1000);
  }
  kill(pid_, SIGKILL);
  waitpid(pid_, nullptr, 0);
  pid_ = -1;
}

bool SmtSession::send(const std::string& s) {
  size_t off = 0;
  while (off < s.size()) {
    ssize_t n = write(to_, s.data() + off, s.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    off += static_cast<size_t>(n);
  }
  return true;
}

bool SmtSession::readLine(std::string& line, int timeoutMs) {
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeoutMs);
  for (;;) {
    auto nl = buf_.find('\n');
    if (nl != std::string::npos) {
      line = buf_.substr(0, nl);
      buf_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      return true;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now()).count();
    if (left <= 0) return false;
    pollfd pfd{from_, POLLIN, 0};
    int r = poll(&pfd, 1, static_cast<int>(left));
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) return false;
    char tmp[4096];
    ssize_t n = read(from_, tmp, sizeof tmp);
    if (n <= 0) return false;
    buf_.append(tmp, static_cast<size_t>(n));
  }
}

SatResult SmtSession::run(const std::string& body) {
  for (int attempt = 0; attempt < 2; attempt++) {
    if (!send("(push 1)\n" + body + "(pop 1)\n")) {
      stop();
      start();
      continue;
    }
    std::string line;
    if (!readLine(line, timeoutMs_ + 2000)) {
      int st = 0;
      if (pid_ > 0 && waitpid(pid_, &st, WNOHANG) == pid_) {
        pid_ = -1;
        close(to_);
        close(from_);
        throw BackendError("solver process '" + path_ + "' exited unexpectedly");
      }
      // timeout: restart so later queries start clean
      stop();
      start();
      return SatResult::Unknown;
    }
    if (line == "sat") return SatResult::Sat;
    if (line == "unsat") return SatResult::Unsat;
    if (line == "unknown" || line == "timeout") return SatResult::Unknown;
    stop();
    start();
    throw BackendError("solver protocol error: " + line);
  }
  throw BackendError("solver process '" + path_ + "' is not responding");
}

// ---------------------------------------------------------------- encoding

namespace {

std::string q(const std::string& s) { return "|" + s + "|"; }
std::string varSym(const std::string& n) { return n == kNu ? std::string("|nu|") : q("v:" + n); }

struct Encoder {
  const SortEnv& sorts;
  const MeasureTable& measures;
  std::set<std::string> vars, locs, fields, boolFields, meas;
  std::set<std::string> boolVars;
  bool field = false, fieldB = false;

  bool isBool(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::Bool: return true;
      case ExprKind::Var: {
        auto it = sorts.find(e->name);
        return (it != sorts.end() && it->second == "bool") || boolVars.count(e->name);
      }
      case ExprKind::Unary: return e->op == Op::Not;
      case ExprKind::Binary: return e->op != Op::Add && e->op != Op::Sub && e->op != Op::Mul;
      case ExprKind::Measure: {
        auto it = measures.find(e->name);
        return it != measures.end() && it->second.boolResult;
      }
      case ExprKind::Ite: return isBool(e->args[1]);
      default: return false;
    }
  }

  // vars occurring where a formula is required are boolean
  void markBool(const ExprPtr& e, bool want) {
    if (e->kind == ExprKind::Var && want) boolVars.insert(e->name);
    switch (e->kind) {
      case ExprKind::Unary: markBool(e->args[0], e->op == Op::Not); break;
      case ExprKind::Binary: {
        bool logical = e->op == Op::And || e->op == Op::Or || e->op == Op::Implies || e->op == Op::Iff;
        for (auto& a : e->args) markBool(a, logical);
        break;
      }
      case ExprKind::Ite:
        markBool(e->args[0], true);
        markBool(e->args[1], want);
        markBool(e->args[2], want);
        break;
      default:
        for (auto& a : e->args) markBool(a, false);
    }
  }

  std::string enc(const ExprPtr& e, bool wantBool) {
    switch (e->kind) {
      case ExprKind::Int:
        return e->ival < 0 ? "(- " + std::to_string(-e->ival) + ")" : std::to_string(e->ival);
      case ExprKind::Bool: return e->bval ? "true" : "false";
      case ExprKind::Null: return "|null|";
      case ExprKind::Loc:
        locs.insert(e->name);
        return q("l:" + e->name);
      case ExprKind::Var:
        vars.insert(e->name);
        return varSym(e->name);
      case ExprKind::Unary:
        if (e->op == Op::Not) return "(not " + enc(e->args[0], true) + ")";
        return "(- " + enc(e->args[0], false) + ")";
      case ExprKind::Binary: {
        auto& a = e->args[0];
        auto& b = e->args[1];
        switch (e->op) {
          case Op::Eq:
          case Op::Ne: {
            bool bb = isBool(a) || isBool(b);
            std::string s = "(= " + enc(a, bb) + " " + enc(b, bb) + ")";
            return e->op == Op::Eq ? s : "(not " + s + ")";
          }
          case Op::Iff: return "(= " + enc(a, true) + " " + enc(b, true) + ")";
          case Op::And: return "(and " + enc(a, true) + " " + enc(b, true) + ")";
          case Op::Or: return "(or " + enc(a, true) + " " + enc(b, true) + ")";
          case Op::Implies: return "(=> " + enc(a, true) + " " + enc(b, true) + ")";
          default: {
            static const std::map<Op, std::string> ops = {{Op::Add, "+"}, {Op::Sub, "-"}, {Op::Mul, "*"},
                                                          {Op::Lt, "<"},  {Op::Le, "<="}, {Op::Gt, ">"},
                                                          {Op::Ge, ">="}};
            return "(" + ops.at(e->op) + " " + enc(a, false) + " " + enc(b, false) + ")";
          }
        }
      }
      case ExprKind::Field: {
        fields.insert(e->name);
        if (wantBool) {
          fieldB = true;
          return "(|FieldB| " + enc(e->args[0], false) + " " + q("f:" + e->name) + ")";
        }
        field = true;
        return "(|Field| " + enc(e->args[0], false) + " " + q("f:" + e->name) + ")";
      }
      case ExprKind::Measure:
        meas.insert(e->name);
        return "(" + q("m:" + e->name) + " " + enc(e->args[0], false) + ")";
      case ExprKind::Ite:
        return "(ite " + enc(e->args[0], true) + " " + enc(e->args[1], wantBool) + " " + enc(e->args[2], wantBool) + ")";
      case ExprKind::KVar: throw BackendError("kappa application reached the SMT encoder: " + show(e));
    }
    return "";
  }
};

}  // namespace

std::string SmtBackend::encodePred(const ExprPtr& p, const SortEnv& sorts) const {
  Encoder en{sorts, measures_};
  en.markBool(p, true);
  return en.enc(p, true);
}

std::string SmtBackend::encodeQuery(const std::vector<ExprPtr>& asserts, const SortEnv& sorts) const {
  Encoder en{sorts, measures_};
  for (auto& a : asserts) en.markBool(a, true);
  std::vector<std::string> body;
  for (auto& a : asserts) body.push_back(en.enc(a, true));
  // measure null axioms may mention nothing but constants
  std::vector<std::string> axioms;
  for (auto& m : en.meas) {
    auto it = measures_.find(m);
    if (it != measures_.end() && it->second.nullValue)
      axioms.push_back("(= (" + q("m:" + m) + " |null|) " + en.enc(it->second.nullValue, it->second.boolResult) + ")");
  }
  std::ostringstream os;
  os << "(declare-const |null| Int)\n";
  for (auto& l : en.locs) os << "(declare-const " << q("l:" + l) << " Int)\n";
  for (auto& f : en.fields) os << "(declare-const " << q("f:" + f) << " Int)\n";
  if (en.fields.size() > 1) {
    os << "(assert (distinct";
    for (auto& f : en.fields) os << " " << q("f:" + f);
    os << "))\n";
  }
  if (en.field) os << "(declare-fun |Field| (Int Int) Int)\n";
  if (en.fieldB) os << "(declare-fun |FieldB| (Int Int) Bool)\n";
  for (auto& m : en.meas) {
    auto it = measures_.find(m);
    bool b = it != measures_.end() && it->second.boolResult;
    os << "(declare-fun " << q("m:" + m) << " (Int) " << (b ? "Bool" : "Int") << ")\n";
  }
  for (auto& v : en.vars) {
    auto it = sorts.find(v);
    bool b = (it != sorts.end() && it->second == "bool") || en.boolVars.count(v);
    os << "(declare-const " << varSym(v) << " " << (b ? "Bool" : "Int") << ")\n";
  }
  for (auto& a : axioms) os << "(assert " << a << ")\n";
  for (auto& b : body) os << "(assert " << b << ")\n";
  os << "(check-sat)\n";
  return os.str();
}

// ---------------------------------------------------------------- backend

namespace {
std::mutex& cvMu() {
  static std::mutex m;
  return m;
}
std::condition_variable& cv() {
  static std::condition_variable c;
  return c;
}
}  // namespace

SmtBackend::SmtBackend(SmtConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.solverPath.empty()) cfg_.solverPath = resolveSolver("");
  if (cfg_.workers < 1) cfg_.workers = 1;
  if (!cfg_.emitDir.empty()) mkdir(cfg_.emitDir.c_str(), 0755);
  // fail early when the solver cannot be started
  idle_.push_back(std::make_unique<SmtSession>(cfg_.solverPath, cfg_.timeoutMs));
  live_ = 1;
}

SmtBackend::~SmtBackend() = default;

SatResult SmtBackend::run(const std::string& body) {
  queries_++;
  if (cfg_.cache) {
    std::lock_guard<std::mutex> g(cacheMu_);
    auto it = cache_.find(body);
    if (it != cache_.end()) {
      hits_++;
      return it->second;
    }
  }
  if (!cfg_.emitDir.empty()) {
    long n = ++dumped_;
    std::ofstream out(cfg_.emitDir + "/q" + std::to_string(n) + ".smt2");
    out << "(set-logic QF_UFLIA)\n" << body << "(exit)\n";
  }
  std::unique_ptr<SmtSession> s;
  {
    std::unique_lock<std::mutex> lk(poolMu_);
    for (;;) {
      if (!idle_.empty()) {
        s = std::move(idle_.back());
        idle_.pop_back();
        break;
      }
      if (live_ < cfg_.workers) {
        live_++;
        lk.unlock();
        try {
          s = std::make_unique<SmtSession>(cfg_.solverPath, cfg_.timeoutMs);
        } catch (...) {
          std::lock_guard<std::mutex> g(poolMu_);
          live_--;
          throw;
        }
        break;
      }
      lk.unlock();
      {
        std::unique_lock<std::mutex> w(cvMu());
        cv().wait_for(w, std::chrono::milliseconds(5));
      }
      lk.lock();
    }
  }
  SatResult r;
  try {
    r = s->run(body);
  } catch (...) {
    std::lock_guard<std::mutex> g(poolMu_);
    live_--;
    throw;
  }
  {
    std::lock_guard<std::mutex> g(poolMu_);
    idle_.push_back(std::move(s));
  }
  cv().notify_one();
  if (cfg_.cache && r != SatResult::Unknown) {
    std::lock_guard<std::mutex> g(cacheMu_);
    cache_[body] = r;
  }
  return r;
}

Validity SmtBackend::checkImpl(const std::vector<ExprPtr>& hyps, const ExprPtr& lhs, const ExprPtr& rhs,
                               const SortEnv& sorts) {
  if (isTrue(rhs)) return Validity::Valid;
  std::vector<ExprPtr> as;
  for (auto& h : hyps)
    if (!isTrue(h)) as.push_back(h);
  if (!isTrue(lhs)) as.push_back(lhs);
  as.push_back(E::notE(rhs));
  switch (run(encodeQuery(as, sorts))) {
    case SatResult::Unsat: return Validity::Valid;
    case SatResult::Sat: return Validity::Invalid;
    default: return Validity::Unknown;
  }
}

SatResult SmtBackend::checkSat(const std::vector<ExprPtr>& preds, const SortEnv& sorts) {
  std::vector<ExprPtr> as;
  for (auto& p : preds)
    if (!isTrue(p)) as.push_back(p);
  return run(encodeQuery(as, sorts));
}

}  // namespace art
