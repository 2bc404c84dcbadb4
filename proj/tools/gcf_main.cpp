#include <iostream>
#include <string>
#include <vector>

#include "gcf/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return gcf::cli_dispatch(args, std::cout, std::cerr);
}
