#include <iostream>
#include <string>
#include <vector>

#include "examine/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return examine::cli::run(args, std::cout, std::cerr);
}
