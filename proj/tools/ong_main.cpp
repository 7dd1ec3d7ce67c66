#include <iostream>
#include <vector>

#include "ong/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ong::run_cli(args, std::cout, std::cerr);
}
