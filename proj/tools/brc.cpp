#include <iostream>
#include <string>
#include <vector>

#include "brc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return brc::run_cli(args, std::cout, std::cerr);
}
