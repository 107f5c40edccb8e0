#include <iostream>

#include "mwrecon/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mwrecon::cli::run_cli(args, std::cout, std::cerr);
}
