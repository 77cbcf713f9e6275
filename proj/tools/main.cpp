#include <iostream>
#include <string>
#include <vector>

#include "mott/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mott::run_command(args, std::cout, std::cerr);
}
