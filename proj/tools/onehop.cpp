#include <iostream>
#include <string>
#include <vector>

#include "onehop/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return onehop::cli::run(args, std::cout, std::cerr);
}
