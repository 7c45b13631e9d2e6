#include <iostream>
#include <string>
#include <vector>

#include "mcfv/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mcfv::run_cli(args, std::cout, std::cerr);
}
