#include "art/fresh.hpp"

#include <cctype>

namespace art {

std::string stripDigits(const std::string& s) {
  size_t n = s.size();
  while (n > 1 && std::isdigit(static_cast<unsigned char>(s[n - 1]))) n--;
  return s.substr(0, n);
}

std::string FreshNames::fresh(const std::string& hint) {
  std::string base = stripDigits(hint);
  if (!used_.count(base)) {
    used_.insert(base);
    return base;
  }
  int& i = next_[base];
  if (i < 1) i = 1;
  for (;; i++) {
    std::string c = base + std::to_string(i);
    if (!used_.count(c)) {
      used_.insert(c);
      i++;
      return c;
    }
  }
}

std::string FreshNames::indexed(const std::string& base0) {
  std::string base = stripDigits(base0);
  int& i = next_["#" + base];
  for (;; i++) {
    std::string c = base + std::to_string(i);
    if (!used_.count(c)) {
      used_.insert(c);
      i++;
      return c;
    }
  }
}

}  // namespace art
