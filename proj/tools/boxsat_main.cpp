#include <iostream>
#include <string>
#include <vector>

#include "boxsat/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return boxsat::cli::run(std::move(args), std::cout, std::cerr);
}
