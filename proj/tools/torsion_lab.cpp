#include <iostream>

#include "torsionlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return torsionlab::run_cli(args, std::cout, std::cerr);
}
