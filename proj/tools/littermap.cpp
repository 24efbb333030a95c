#include <iostream>
#include <string>
#include <vector>

#include "litter/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return litter::run_cli(args, std::cout, std::cerr);
}
