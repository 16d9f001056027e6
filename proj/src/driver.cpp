#include "art/driver.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "art/audit.hpp"
#include "art/cgen.hpp"
#include "art/elaborate.hpp"
#include "art/frontend.hpp"
#include "art/wellformed.hpp"

namespace art {

namespace {

std::string readFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(Span{}, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError(Span{}, "cannot write '" + path + "'");
  out << text;
}

}  // namespace

Program frontEnd(const std::string& text) {
  auto p = parseProgram(text);
  if (auto d = wfProgram(p)) throw InputError(*d);
  return p;
}

std::vector<Qualifier> allQualifiers(const Program& p, const std::string& qualText) {
  auto qs = p.quals;
  if (!qualText.empty())
    for (auto& q : parseQualifiers(qualText)) qs.push_back(q);
  return qs;
}

std::string describe(const HornClause& c) {
  return c.span.str() + " [" + c.tag + "] in " + c.fn + ": " + show(c);
}

PipelineResult verify(const Program& p, const std::vector<Qualifier>& quals, const PipelineOptions& o) {
  PipelineResult r;
  r.elaborated = elaborate(p);
  CgenOptions co;
  co.foldNullGuard = o.foldNullGuard;
  auto g = generate(r.elaborated, co);
  r.cs = std::move(g.cs);
  r.templates = std::move(g.templates);
  SmtConfig sc = o.smt;
  sc.workers = std::max(1, o.workers);
  SmtBackend smt(sc);
  smt.setMeasures(measureTable(r.elaborated));
  SmtValidator v(smt);
  r.solved = solve(r.cs, quals, v, SolveOptions{o.workers});
  for (auto& f : r.elaborated.functions) {
    FunctionVerdict fv;
    fv.name = f.name;
    auto it = r.templates.find(f.name);
    if (it != r.templates.end()) fv.signature = show(applySolution(it->second, r.solved.sol));
    for (auto& c : r.solved.failed)
      if (c.fn == f.name) fv.failures.push_back(c);
    fv.status = fv.failures.empty() ? "safe" : "unsafe";
    r.functions.push_back(std::move(fv));
  }
  return r;
}

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"art: refinement inference for heap-manipulating programs"};
  app.require_subcommand(0, 1);
  std::string file, qualFile, smtPath, emitAnn, emitCons, emitSol, emitSmt, auditFn;
  bool json = false;
  int workers = 1, timeout = 5000, auditLine = 0, depth = 3;
  auto common = [&](CLI::App* a) {
    a->add_option("file", file, "program file")->required();
    a->add_option("--qualifiers", qualFile, "qualifier file");
    a->add_option("--smt", smtPath, "SMT solver binary (default: $ART_SMT, then z3 on PATH)");
    a->add_option("--timeout", timeout, "per-query timeout in milliseconds");
    a->add_option("-j", workers, "parallel solver sessions");
  };
  auto* verifyCmd = app.add_subcommand("verify", "verify all functions (default)");
  common(verifyCmd);
  verifyCmd->add_option("--emit-annotated", emitAnn, "write the annotated program");
  verifyCmd->add_option("--emit-constraints", emitCons, "write the Horn clauses");
  verifyCmd->add_option("--emit-solution", emitSol, "write the kappa solution");
  verifyCmd->add_option("--emit-smt", emitSmt, "dump every SMT query into this directory");
  verifyCmd->add_flag("--json", json, "machine-readable report");
  auto* elabCmd = app.add_subcommand("elaborate", "print the program with inferred heap annotations");
  elabCmd->add_option("file", file, "program file")->required();
  auto* consCmd = app.add_subcommand("constraints", "print the Horn clauses");
  consCmd->add_option("file", file, "program file")->required();
  auto* solCmd = app.add_subcommand("solution", "print the solved kappas and inferred signatures");
  common(solCmd);
  auto* auditCmd = app.add_subcommand("audit", "print the separation-logic reading of a program point");
  common(auditCmd);
  auditCmd->add_option("--fn", auditFn, "function")->required();
  auditCmd->add_option("--line", auditLine, "first statement at or after this line (default: entry)");
  auditCmd->add_option("--depth", depth, "unrolling depth");

  std::vector<std::string> argv = args;
  static const std::set<std::string> subs{"verify", "elaborate", "constraints", "solution", "audit"};
  bool help = !argv.empty() && (argv[0] == "-h" || argv[0] == "--help");
  if (!help && (argv.empty() || !subs.count(argv[0]))) argv.insert(argv.begin(), "verify");
  std::vector<std::string> rev(argv.rbegin(), argv.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "art: " << e.what() << "\n";
    return kInputError;
  }

  try {
    auto prog = frontEnd(readFile(file));
    auto sub = app.get_subcommands().empty() ? verifyCmd : app.get_subcommands()[0];
    if (sub == elabCmd) {
      out << printProgram(elaborate(prog));
      return kOk;
    }
    if (sub == consCmd) {
      auto g = generate(elaborate(prog));
      out << show(g.cs);
      return kOk;
    }
    PipelineOptions po;
    po.smt.solverPath = resolveSolver(smtPath);
    po.smt.timeoutMs = timeout;
    po.smt.emitDir = emitSmt;
    po.workers = workers;
    if (sub == auditCmd) {
      auto el = elaborate(prog);
      auto* f = el.findFunction(auditFn);
      if (!f) throw InputError(Span{}, "no function '" + auditFn + "'");
      Checker c(el, CgenOptions{false, true});
      bool got = false;
      World at;
      c.onStmt = [&](const World& w, const Stmt& s) {
        if (!got && auditLine > 0 && s.span.line >= auditLine) {
          at = w;
          got = true;
        }
      };
      auto w = c.entry(*f);
      if (auditLine <= 0) {
        at = w;
        got = true;
      }
      c.exec(w, f->body);
      if (!got) at = w;
      auto a = denote(el, at.gamma, at.sigma, depth);
      out << show(a) << "\n";
      SmtBackend smt(po.smt);
      smt.setMeasures(measureTable(el));
      auto sat = auditPure(el, at.gamma, at.sigma, smt);
      out << "pure part: " << (sat == SatResult::Sat ? "sat" : sat == SatResult::Unsat ? "unsat" : "unknown") << "\n";
      return kOk;
    }
    auto quals = allQualifiers(prog, qualFile.empty() ? "" : readFile(qualFile));
    auto r = verify(prog, quals, po);
    if (sub == solCmd) {
      out << showSolution(r.solved.sol);
      for (auto& f : r.functions) out << f.name << " :: " << f.signature << "\n";
      return r.safe() ? kOk : kUnsafe;
    }
    if (!emitAnn.empty()) writeFile(emitAnn, printProgram(r.elaborated));
    if (!emitCons.empty()) writeFile(emitCons, show(r.cs));
    if (!emitSol.empty()) writeFile(emitSol, showSolution(r.solved.sol));
    if (json) {
      nlohmann::json j;
      j["file"] = file;
      j["status"] = r.safe() ? "safe" : "unsafe";
      j["functions"] = nlohmann::json::array();
      for (auto& f : r.functions) {
        nlohmann::json jf{{"name", f.name}, {"status", f.status}, {"signature", f.signature}};
        jf["failures"] = nlohmann::json::array();
        for (auto& c : f.failures)
          jf["failures"].push_back({{"clause", c.id}, {"tag", c.tag}, {"line", c.span.line}, {"col", c.span.col},
                                    {"text", show(c)}});
        j["functions"].push_back(jf);
      }
      out << j.dump(2) << "\n";
    } else {
      for (auto& f : r.functions) {
        out << f.status << " " << f.name << " :: " << f.signature << "\n";
        for (auto& c : f.failures) out << "  failed " << describe(c) << "\n";
      }
    }
    return r.safe() ? kOk : kUnsafe;
  } catch (const InputError& e) {
    err << "art: " << (file.empty() ? "" : file + ":") << e.what() << "\n";
    return kInputError;
  } catch (const BackendError& e) {
    err << "art: solver backend: " << e.what() << "\n";
    return kInternalError;
  } catch (const std::exception& e) {
    err << "art: internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace art
