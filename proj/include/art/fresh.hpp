#pragma once
// Fresh-name generation, scoped to one pipeline instance.

#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "art/expr.hpp"

namespace art {

class FreshNames {
 public:
  void reserve(const std::string& n) { used_.insert(n); }
  bool used(const std::string& n) const { return used_.count(n) > 0; }
  // hint, hint1, hint2, ... (trailing digits of hint are stripped first)
  std::string fresh(const std::string& hint);
  // base0, base1, ...
  std::string indexed(const std::string& base);
  int kappa() { return ++kappa_; }
  int lastKappa() const { return kappa_; }

 private:
  std::set<std::string> used_;
  std::map<std::string, int> next_;
  int kappa_ = 0;
};

std::string stripDigits(const std::string& s);

struct Diagnostic {
  Span span;
  std::string message;
  std::string str() const { return span.str() + ": " + message; }
};

// input error: parse, well-formedness, physical typing
struct InputError : std::runtime_error {
  Diagnostic diag;
  explicit InputError(Diagnostic d) : std::runtime_error(d.str()), diag(std::move(d)) {}
  InputError(Span s, const std::string& m) : InputError(Diagnostic{s, m}) {}
};

// backend / internal failure
struct BackendError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace art
