#include <iostream>
#include <string>
#include <vector>

#include "searchr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return searchr::cli::run(args, searchr::cli::process_environment(), std::cout, std::cerr);
}
