#include <algorithm>
#include <cctype>
#include <map>
#include <functional>
#include <set>

#include "art/fresh.hpp"
#include "art/frontend.hpp"

namespace art {

namespace {

enum class Tk { Ident, Int, Punct, Annot, End };

struct Token {
  Tk kind;
  std::string text;
  long long ival = 0;
  Span span;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto adv = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); k++, i++) {
      if (src[i] == '\n') {
        line++;
        col = 1;
      } else {
        col++;
      }
    }
  };
  static const char* puncts[] = {"|->", "<=>", "::", "==", "!=", "<=", ">=", "=>", "&&", "||", "->",
                                 "(",   ")",   "{",  "}",  "[",  "]",  ",",  ";",  ":",  ".",  "=",
                                 "<",   ">",   "+",  "-",  "*",  "!",  "|",  "&",  "?",  "~",  "/"};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    Span sp{line, col};
    if (src.compare(i, 3, "//:") == 0) {
      out.push_back({Tk::Annot, "//:", 0, sp});
      adv(3);
      continue;
    }
    if (src.compare(i, 2, "//") == 0) {
      while (i < src.size() && src[i] != '\n') adv(1);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        j++;
      out.push_back({Tk::Ident, src.substr(i, j - i), 0, sp});
      adv(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) j++;
      Token t{Tk::Int, src.substr(i, j - i), 0, sp};
      t.ival = std::stoll(t.text);
      out.push_back(t);
      adv(j - i);
      continue;
    }
    bool found = false;
    for (auto* p : puncts) {
      size_t n = std::char_traits<char>::length(p);
      if (src.compare(i, n, p) == 0) {
        out.push_back({Tk::Punct, p, 0, sp});
        adv(n);
        found = true;
        break;
      }
    }
    if (!found) throw InputError(sp, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tk::End, "<eof>", 0, Span{line, col}});
  return out;
}

const std::set<std::string> kKeywords = {"type",   "exists", "measure", "function", "var",   "if",
                                         "else",   "return", "null",    "true",     "false", "qualif",
                                         "ref",    "int",    "bool",    "void",     "emp",   "then"};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  Program program();
  std::vector<Qualifier> qualifiers();
  ExprPtr predicateOnly() {
    auto e = expr(false);
    expectEnd();
    return e;
  }
  RefType typeOnly() {
    auto t = rtype();
    expectEnd();
    return t;
  }

 private:
  std::vector<Token> t_;
  size_t p_ = 0;
  int temp_ = 0;
  std::set<std::string> idents_;
  // pending hoisted statements for the statement being parsed
  Block* hoist_ = nullptr;
  // wildcard sorts collected while parsing a qualifier body
  std::vector<std::pair<std::string, std::string>>* wild_ = nullptr;
  std::string nuName_ = "v";

  const Token& peek(size_t k = 0) const { return t_[std::min(p_ + k, t_.size() - 1)]; }
  bool is(const std::string& s, size_t k = 0) const {
    auto& t = peek(k);
    return (t.kind == Tk::Punct || t.kind == Tk::Ident) && t.text == s;
  }
  bool accept(const std::string& s) {
    if (is(s)) {
      p_++;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& m) const { throw InputError(peek().span, m); }
  void expect(const std::string& s) {
    if (!accept(s)) fail("expected '" + s + "' but found '" + peek().text + "'");
  }
  void expectEnd() {
    if (peek().kind != Tk::End) fail("unexpected '" + peek().text + "'");
  }
  // sorts may be keywords (int, bool)
  std::string sortName() {
    if (peek().kind != Tk::Ident) fail("expected a sort, found '" + peek().text + "'");
    return t_[p_++].text;
  }
  std::string ident() {
    if (peek().kind != Tk::Ident || kKeywords.count(peek().text)) fail("expected identifier, found '" + peek().text + "'");
    idents_.insert(peek().text);
    return t_[p_++].text;
  }
  std::string loc() {
    accept("&");
    return ident();
  }

  // ---- types
  RefType rtype();
  BasePtr btype();
  Heap heap(bool exists);
  Schema schema();
  void fieldList(std::vector<FieldType>& fs);

  // ---- expressions
  ExprPtr expr(bool prog);
  ExprPtr iff(bool prog);
  ExprPtr imp(bool prog);
  ExprPtr orE(bool prog);
  ExprPtr andE(bool prog);
  ExprPtr cmp(bool prog);
  ExprPtr add(bool prog);
  ExprPtr mul(bool prog);
  ExprPtr unary(bool prog);
  ExprPtr postfix(bool prog);
  ExprPtr primary(bool prog);

  // ---- statements
  Block block();
  void stmt(Block& out);
  void annotation(Block& out);
  std::string freshTemp() {
    for (;;) {
      std::string n = "_t" + std::to_string(++temp_);
      if (!idents_.count(n)) {
        idents_.insert(n);
        return n;
      }
    }
  }
  ExprPtr hoistRead(ExprPtr rec, const std::string& f, Span sp);
  ExprPtr hoistCall(const std::string& fn, std::vector<ExprPtr> args, Span sp);
  ExprPtr hoistAlloc(std::vector<std::pair<std::string, ExprPtr>> fs, Span sp);
  std::vector<std::pair<std::string, ExprPtr>> allocFields();

  TypeDef typedefn();
  Measure measure();
  Qualifier qualifier();

  friend Program finishProgram(Parser&, Program);
  void resolve(Program& prog);
};

// ---------------------------------------------------------------- types

BasePtr Parser::btype() {
  if (accept("int")) return T::intB();
  if (accept("bool")) return T::boolB();
  if (accept("void")) return T::voidB();
  if (accept("null")) return T::nullB();
  if (accept("?")) {
    expect("ref");
    expect("(");
    auto l = loc();
    expect(")");
    return T::maybeRef(l);
  }
  if (accept("ref")) {
    expect("(");
    auto l = loc();
    expect(")");
    return T::ref(l);
  }
  if (is("{")) {
    expect("{");
    std::vector<FieldType> fs;
    fieldList(fs);
    return T::record(fs);
  }
  auto n = ident();
  std::vector<RefType> args;
  if (accept("[")) {
    do args.push_back(rtype());
    while (accept(","));
    expect("]");
  }
  return T::app(n, args);
}

void Parser::fieldList(std::vector<FieldType>& fs) {
  if (!accept("}")) {
    do {
      auto f = ident();
      expect(":");
      fs.push_back({f, rtype()});
    } while (accept(","));
    expect("}");
  }
}

RefType Parser::rtype() {
  // {v: T | p} vs record {f: T, ...}
  if (is("{") && peek(1).kind == Tk::Ident && is(":", 2)) {
    size_t save = p_;
    p_++;
    std::string bname = ident();
    expect(":");
    BasePtr inner;
    try {
      inner = btype();
    } catch (const InputError&) {
      inner = nullptr;
    }
    if (inner && accept("|")) {
      std::string old = nuName_;
      nuName_ = bname;
      auto pred = expr(false);
      nuName_ = old;
      expect("}");
      return RefType{inner, pred};
    }
    p_ = save;
  }
  return RefType{btype(), nullptr};
}

Heap Parser::heap(bool exists) {
  Heap h;
  if (accept("emp")) return h;
  do {
    HeapEntry e;
    e.loc = loc();
    if (!accept("|->")) {
      if (exists)
        expect("=>");
      else
        fail("expected '|->'");
    }
    if (peek().kind == Tk::Ident && is(":", 1) && !kKeywords.count(peek().text)) {
      e.binder = ident();
      expect(":");
    }
    e.type = rtype();
    h.entries.push_back(e);
  } while (accept("*"));
  return h;
}

Schema Parser::schema() {
  Schema s;
  expect("(");
  if (!accept(")")) {
    do {
      auto x = ident();
      expect(":");
      s.args.push_back({x, rtype()});
    } while (accept(","));
    expect(")");
  }
  if (accept("/")) s.inHeap = heap(false);
  expect("=>");
  if (accept("exists")) {
    do s.outLocs.push_back(loc());
    while (accept(","));
    expect(".");
  }
  if (peek().kind == Tk::Ident && is(":", 1) && !kKeywords.count(peek().text)) {
    s.outName = ident();
    expect(":");
  }
  s.outType = rtype();
  if (accept("/")) s.outHeap = heap(false);
  return s;
}

// ---------------------------------------------------------------- expressions

ExprPtr Parser::expr(bool prog) { return iff(prog); }

ExprPtr Parser::iff(bool prog) {
  auto a = imp(prog);
  while (accept("<=>")) a = E::bin(Op::Iff, a, imp(prog));
  return a;
}

ExprPtr Parser::imp(bool prog) {
  auto a = orE(prog);
  // => inside refinements only; program conditions never use it
  if (!prog && is("=>")) {
    p_++;
    return E::bin(Op::Implies, a, imp(prog));
  }
  return a;
}

ExprPtr Parser::orE(bool prog) {
  auto a = andE(prog);
  while (accept("||")) a = E::bin(Op::Or, a, andE(prog));
  return a;
}

ExprPtr Parser::andE(bool prog) {
  auto a = cmp(prog);
  while (accept("&&")) a = E::bin(Op::And, a, cmp(prog));
  return a;
}

ExprPtr Parser::cmp(bool prog) {
  auto a = add(prog);
  static const std::pair<const char*, Op> ops[] = {{"==", Op::Eq}, {"=", Op::Eq}, {"!=", Op::Ne}, {"<=", Op::Le},
                                                   {">=", Op::Ge}, {"<", Op::Lt}, {">", Op::Gt}};
  for (auto& [s, op] : ops) {
    if (is(s)) {
      p_++;
      return E::bin(op, a, add(prog));
    }
  }
  return a;
}

ExprPtr Parser::add(bool prog) {
  auto a = mul(prog);
  for (;;) {
    if (accept("+"))
      a = E::bin(Op::Add, a, mul(prog));
    else if (accept("-"))
      a = E::bin(Op::Sub, a, mul(prog));
    else
      return a;
  }
}

ExprPtr Parser::mul(bool prog) {
  auto a = unary(prog);
  while (accept("*")) a = E::bin(Op::Mul, a, unary(prog));
  return a;
}

ExprPtr Parser::unary(bool prog) {
  if (accept("!")) return E::notE(unary(prog));
  if (is("-")) {
    p_++;
    if (peek().kind == Tk::Int) return E::integer(-t_[p_++].ival);
    return E::un(Op::Neg, unary(prog));
  }
  return postfix(prog);
}

ExprPtr Parser::postfix(bool prog) {
  Span sp = peek().span;
  auto a = primary(prog);
  while (is(".") && peek(1).kind == Tk::Ident) {
    p_++;
    auto f = ident();
    a = prog ? hoistRead(a, f, sp) : E::field(a, f);
  }
  return a;
}

ExprPtr Parser::primary(bool prog) {
  auto& t = peek();
  Span sp = t.span;
  if (t.kind == Tk::Int) {
    p_++;
    return E::integer(t.ival);
  }
  if (accept("true")) return E::tt();
  if (accept("false")) return E::ff();
  if (accept("null")) return E::null();
  if (accept("(")) {
    auto e = expr(prog);
    expect(")");
    return e;
  }
  if (!prog && accept("if")) {
    auto c = expr(prog);
    expect("then");
    auto a = expr(prog);
    expect("else");
    auto b = expr(prog);
    return E::ite(c, a, b);
  }
  if (!prog && accept("~")) {
    std::string n = "~" + ident();
    if (wild_ && accept(":")) {
      auto so = sortName();
      bool have = false;
      for (auto& w : *wild_)
        if (w.first == n) have = true;
      if (!have) wild_->push_back({n, so});
    }
    return E::var(n);
  }
  if (!prog && accept("&")) return E::loc(ident());
  if (prog && is("{")) {
    auto fs = allocFields();
    return hoistAlloc(fs, sp);
  }
  auto n = ident();
  if (accept("(")) {
    std::vector<ExprPtr> args;
    if (!accept(")")) {
      do args.push_back(expr(prog));
      while (accept(","));
      expect(")");
    }
    if (prog) return hoistCall(n, args, sp);
    if (n == "Field" && args.size() == 2 && args[1]->kind == ExprKind::Var) return E::field(args[0], args[1]->name);
    if (args.size() != 1) throw InputError(sp, "measure application '" + n + "' takes one argument");
    return E::measure(n, args[0]);
  }
  if (!prog && n == nuName_) return E::nu();
  return E::var(n);
}

ExprPtr Parser::hoistRead(ExprPtr rec, const std::string& f, Span sp) {
  if (!hoist_) throw InputError(sp, "field read not allowed here");
  if (rec->kind != ExprKind::Var) throw InputError(sp, "field read of a non-variable");
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Read;
  s->x = freshTemp();
  s->e = rec;
  s->f = f;
  s->span = sp;
  hoist_->push_back(s);
  return E::var(s->x);
}

ExprPtr Parser::hoistCall(const std::string& fn, std::vector<ExprPtr> args, Span sp) {
  if (!hoist_) throw InputError(sp, "call not allowed here");
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Call;
  s->x = freshTemp();
  s->f = fn;
  s->args = std::move(args);
  s->span = sp;
  hoist_->push_back(s);
  return E::var(s->x);
}

ExprPtr Parser::hoistAlloc(std::vector<std::pair<std::string, ExprPtr>> fs, Span sp) {
  if (!hoist_) throw InputError(sp, "allocation not allowed here");
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Alloc;
  s->x = freshTemp();
  s->fields = std::move(fs);
  s->span = sp;
  hoist_->push_back(s);
  return E::var(s->x);
}

std::vector<std::pair<std::string, ExprPtr>> Parser::allocFields() {
  expect("{");
  std::vector<std::pair<std::string, ExprPtr>> fs;
  if (!accept("}")) {
    do {
      auto f = ident();
      expect(":");
      fs.push_back({f, expr(true)});
    } while (accept(","));
    expect("}");
  }
  return fs;
}

// ---------------------------------------------------------------- statements

Block Parser::block() {
  expect("{");
  Block b;
  while (!accept("}")) {
    if (peek().kind == Tk::End) fail("unterminated block");
    stmt(b);
  }
  return b;
}

void Parser::annotation(Block& out) {
  int line = peek().span.line;
  p_++;  // //:
  while (peek().kind == Tk::Ident && peek().span.line == line) {
    auto s = std::make_shared<Stmt>();
    s->span = peek().span;
    auto kw = ident();
    expect("(");
    if (kw == "fold" || kw == "unfold" || kw == "pad") {
      s->kind = kw == "fold" ? StmtKind::Fold : kw == "unfold" ? StmtKind::Unfold : StmtKind::Pad;
      s->x = loc();
    } else if (kw == "conc") {
      s->kind = StmtKind::Conc;
      s->x = ident();
    } else {
      throw InputError(s->span, "unknown annotation '" + kw + "'");
    }
    expect(")");
    out.push_back(s);
    if (!accept(";")) break;
  }
}

void Parser::stmt(Block& out) {
  if (peek().kind == Tk::Annot) {
    annotation(out);
    return;
  }
  Span sp = peek().span;
  auto s = std::make_shared<Stmt>();
  s->span = sp;
  Block pre;
  hoist_ = &pre;
  auto finish = [&]() {
    hoist_ = nullptr;
    out.insert(out.end(), pre.begin(), pre.end());
    out.push_back(s);
  };
  if (accept("if")) {
    s->kind = StmtKind::If;
    expect("(");
    s->e = expr(true);
    expect(")");
    hoist_ = nullptr;
    s->thenB = block();
    if (accept("else")) {
      s->hasElse = true;
      if (is("if")) {
        Block eb;
        stmt(eb);
        s->elseB = eb;
      } else {
        s->elseB = block();
      }
    }
    out.insert(out.end(), pre.begin(), pre.end());
    out.push_back(s);
    return;
  }
  if (accept("return")) {
    s->kind = StmtKind::Return;
    if (!is(";")) s->e = expr(true);
    expect(";");
    finish();
    return;
  }
  bool isVar = accept("var");
  auto x = ident();
  if (!isVar && accept(".")) {
    s->kind = StmtKind::Write;
    s->x = x;
    s->f = ident();
    expect("=");
    s->e = expr(true);
    expect(";");
    finish();
    return;
  }
  if (!isVar && is("(")) {
    // void call
    p_++;
    s->kind = StmtKind::Call;
    s->f = x;
    if (!accept(")")) {
      do s->args.push_back(expr(true));
      while (accept(","));
      expect(")");
    }
    expect(";");
    finish();
    return;
  }
  expect("=");
  s->x = x;
  if (is("{")) {
    s->kind = StmtKind::Alloc;
    s->fields = allocFields();
  } else if (peek().kind == Tk::Ident && is("(", 1) && !kKeywords.count(peek().text)) {
    s->kind = StmtKind::Call;
    s->f = ident();
    expect("(");
    if (!accept(")")) {
      do s->args.push_back(expr(true));
      while (accept(","));
      expect(")");
    }
  } else if (peek().kind == Tk::Ident && is(".", 1) && peek(2).kind == Tk::Ident && (is(";", 3))) {
    s->kind = StmtKind::Read;
    s->e = E::var(ident());
    expect(".");
    s->f = ident();
  } else {
    s->kind = StmtKind::Assign;
    s->e = expr(true);
  }
  expect(";");
  finish();
}

// ---------------------------------------------------------------- declarations

TypeDef Parser::typedefn() {
  TypeDef d;
  d.span = peek().span;
  expect("type");
  d.name = ident();
  if (accept("[")) {
    do d.params.push_back(ident());
    while (accept(","));
    expect("]");
  }
  expect("=");
  if (accept("exists")) {
    accept("!");
    d.exHeap = heap(true);
    expect(".");
  }
  if (peek().kind == Tk::Ident && is(":", 1)) {
    d.rootBinder = ident();
    expect(":");
  } else {
    d.rootBinder = "h";
  }
  d.root = rtype();
  accept(";");
  return d;
}

Measure Parser::measure() {
  Measure m;
  m.span = peek().span;
  expect("measure");
  m.name = ident();
  expect(":");
  m.ctor = ident();
  if (accept("[")) {
    do rtype();
    while (accept(","));
    expect("]");
  }
  expect("->");
  if (accept("bool"))
    m.boolResult = true;
  else
    expect("int");
  accept(";");
  ExprPtr single;
  while (peek().kind == Tk::Ident && peek().text == m.name && is("(", 1)) {
    Span sp = peek().span;
    p_ += 2;
    bool isNull = accept("null");
    std::string param;
    if (!isNull) param = ident();
    expect(")");
    expect("=");
    auto body = expr(false);
    accept(";");
    if (isNull) {
      m.nullBody = body;
    } else {
      if (!m.param.empty() && m.param != param) throw InputError(sp, "measure equations use different parameter names");
      m.param = param;
      if (m.consBody) throw InputError(sp, "duplicate measure equation");
      m.consBody = body;
    }
  }
  // single equation: m(x) = if x == null then a else b
  if (!m.nullBody && m.consBody && m.consBody->kind == ExprKind::Ite) {
    auto c = m.consBody->args[0];
    if (c->kind == ExprKind::Binary && c->op == Op::Eq && c->args[0]->kind == ExprKind::Var &&
        c->args[0]->name == m.param && c->args[1]->kind == ExprKind::Null) {
      m.nullBody = m.consBody->args[1];
      m.consBody = m.consBody->args[2];
    }
  }
  if (!m.consBody) throw InputError(m.span, "measure '" + m.name + "' has no equation for a non-null argument");
  return m;
}

Qualifier Parser::qualifier() {
  Qualifier q;
  q.span = peek().span;
  expect("qualif");
  q.name = ident();
  expect("(");
  std::string nu = ident();
  expect(":");
  q.nuSort = sortName();
  std::vector<std::pair<std::string, std::string>> wild;
  while (accept(",")) {
    accept("~");
    auto n = "~" + ident();
    expect(":");
    wild.push_back({n, sortName()});
  }
  expect(")");
  expect(":");
  wild_ = &wild;
  std::string old = nuName_;
  nuName_ = nu;
  q.body = expr(false);
  nuName_ = old;
  wild_ = nullptr;
  // wildcards without a declared sort take the sort of v
  std::set<std::string> fv;
  freeVars(q.body, fv);
  for (auto& n : fv) {
    if (n.empty() || n[0] != '~') continue;
    bool have = false;
    for (auto& w : wild)
      if (w.first == n) have = true;
    if (!have) wild.push_back({n, q.nuSort});
  }
  q.wildcards = wild;
  accept(";");
  return q;
}

std::vector<Qualifier> Parser::qualifiers() {
  std::vector<Qualifier> qs;
  while (peek().kind != Tk::End) qs.push_back(qualifier());
  return qs;
}

Program Parser::program() {
  Program prog;
  std::map<std::string, std::pair<Schema, Span>> schemas;
  while (peek().kind != Tk::End) {
    if (is("type")) {
      prog.types.push_back(typedefn());
    } else if (is("measure")) {
      prog.measures.push_back(measure());
    } else if (is("qualif")) {
      prog.quals.push_back(qualifier());
    } else if (is("function")) {
      Function f;
      f.span = peek().span;
      p_++;
      f.name = ident();
      expect("(");
      if (!accept(")")) {
        do f.params.push_back(ident());
        while (accept(","));
        expect(")");
      }
      f.body = block();
      auto it = schemas.find(f.name);
      if (it != schemas.end()) f.schema = it->second.first;
      prog.functions.push_back(f);
    } else if (peek().kind == Tk::Ident && is("::", 1)) {
      Span sp = peek().span;
      auto n = ident();
      expect("::");
      schemas[n] = {schema(), sp};
    } else {
      fail("expected a declaration, found '" + peek().text + "'");
    }
  }
  for (auto& [n, s] : schemas)
    if (!prog.findFunction(n)) throw InputError(s.second, "signature for undefined function '" + n + "'");
  resolve(prog);
  return prog;
}

// ---------------------------------------------------------------- resolution

struct Resolver {
  std::set<std::string> ctors;
  BasePtr base(const BasePtr& b) {
    switch (b->kind) {
      case BaseKind::App: {
        if (!ctors.count(b->name) && b->args.empty()) return T::tyvar(b->name);
        std::vector<RefType> as;
        for (auto& a : b->args) as.push_back(type(a));
        return T::app(b->name, as);
      }
      case BaseKind::Record: {
        std::vector<FieldType> fs;
        for (auto& f : b->fields) fs.push_back({f.name, type(f.type)});
        return T::record(fs);
      }
      default: return b;
    }
  }
  RefType type(const RefType& t) { return RefType{base(t.base), t.pred}; }
  Heap heap(const Heap& h) {
    Heap r = h;
    for (auto& e : r.entries) e.type = type(e.type);
    return r;
  }
};

void collectTyVars(const RefType& t, std::vector<std::string>& out) {
  if (t.base->kind == BaseKind::TyVar) {
    if (std::find(out.begin(), out.end(), t.base->name) == out.end()) out.push_back(t.base->name);
  }
  for (auto& f : t.base->fields) collectTyVars(f.type, out);
  for (auto& a : t.base->args) collectTyVars(a, out);
}

void collectLocs(const RefType& t, std::vector<std::string>& out) {
  std::set<std::string> s;
  locsDeep(t, s);
  // keep first-seen order: walk again
  std::function<void(const RefType&)> walk = [&](const RefType& r) {
    if (isPtr(r.base) && std::find(out.begin(), out.end(), r.base->name) == out.end()) out.push_back(r.base->name);
    for (auto& f : r.base->fields) walk(f.type);
    for (auto& a : r.base->args) walk(a);
  };
  walk(t);
}

void Parser::resolve(Program& prog) {
  Resolver r;
  for (auto& d : prog.types) r.ctors.insert(d.name);
  for (auto& d : prog.types) {
    d.root = r.type(d.root);
    d.exHeap = r.heap(d.exHeap);
    for (auto& e : d.exHeap.entries)
      if (e.binder.empty()) e.binder = e.loc + "0";
  }
  FreshNames names;
  for (auto& n : idents_) names.reserve(n);
  for (auto& f : prog.functions) {
    if (!f.schema) continue;
    Schema& s = *f.schema;
    for (auto& a : s.args) a.second = r.type(a.second);
    s.inHeap = r.heap(s.inHeap);
    s.outType = r.type(s.outType);
    s.outHeap = r.heap(s.outHeap);
    if (s.args.size() != f.params.size())
      throw InputError(f.span, "signature of '" + f.name + "' has " + std::to_string(s.args.size()) +
                                   " parameters but the function has " + std::to_string(f.params.size()));
    // align signature parameter names with the function's
    Subst ren;
    for (size_t i = 0; i < s.args.size(); i++)
      if (s.args[i].first != f.params[i]) ren.vars[s.args[i].first] = E::var(f.params[i]);
    if (!ren.empty()) {
      for (size_t i = 0; i < s.args.size(); i++) {
        s.args[i].first = f.params[i];
        s.args[i].second = subst(s.args[i].second, ren);
      }
      s.inHeap = subst(s.inHeap, ren);
      s.outType = subst(s.outType, ren);
      s.outHeap = subst(s.outHeap, ren);
    }
    std::vector<std::string> locs;
    for (auto& a : s.args) collectLocs(a.second, locs);
    for (auto& e : s.inHeap.entries) {
      if (std::find(locs.begin(), locs.end(), e.loc) == locs.end()) locs.push_back(e.loc);
      collectLocs(e.type, locs);
    }
    s.locParams = locs;
    std::vector<std::string> outs;
    collectLocs(s.outType, outs);
    for (auto& e : s.outHeap.entries) {
      if (std::find(outs.begin(), outs.end(), e.loc) == outs.end()) outs.push_back(e.loc);
      collectLocs(e.type, outs);
    }
    std::vector<std::string> ex;
    for (auto& l : s.outLocs)
      if (std::find(ex.begin(), ex.end(), l) == ex.end()) ex.push_back(l);
    for (auto& l : outs)
      if (std::find(locs.begin(), locs.end(), l) == locs.end() && std::find(ex.begin(), ex.end(), l) == ex.end())
        ex.push_back(l);
    s.outLocs = ex;
    std::vector<std::string> tvs;
    for (auto& a : s.args) collectTyVars(a.second, tvs);
    for (auto& e : s.inHeap.entries) collectTyVars(e.type, tvs);
    collectTyVars(s.outType, tvs);
    for (auto& e : s.outHeap.entries) collectTyVars(e.type, tvs);
    s.tyParams = tvs;
    for (auto& e : s.inHeap.entries)
      if (e.binder.empty()) e.binder = names.indexed(e.loc);
    for (auto& e : s.outHeap.entries)
      if (e.binder.empty()) e.binder = names.indexed(e.loc);
  }
}

}  // namespace

Program parseProgram(const std::string& text) {
  Parser p(lex(text));
  return p.program();
}

std::vector<Qualifier> parseQualifiers(const std::string& text) {
  Parser p(lex(text));
  return p.qualifiers();
}

ExprPtr parsePredicate(const std::string& text) {
  Parser p(lex(text));
  return p.predicateOnly();
}

RefType parseType(const std::string& text) {
  Parser p(lex(text));
  return p.typeOnly();
}

}  // namespace art
