#include <iostream>
#include <string>
#include <vector>

#include "mucp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mucp::cli::run_cli(args, std::cout, std::cerr);
}
