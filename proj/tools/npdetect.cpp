#include <iostream>
#include <string>
#include <vector>

#include "npdetect/cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return npdetect::cli::run_app(args, std::cout, std::cerr);
}
