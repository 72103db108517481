#include <iostream>
#include <string>
#include <vector>

#include "flame/cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return flame::cli::run_cli(args, std::cout, std::cerr);
}
