#include <iostream>

#include "art/driver.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return art::runCli(args, std::cout, std::cerr);
}
