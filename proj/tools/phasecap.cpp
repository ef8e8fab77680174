#include <iostream>
#include <string>
#include <vector>

#include "phasecap/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return phasecap::cli::run(args, std::cout, std::cerr);
}
