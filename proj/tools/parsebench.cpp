#include <iostream>

#include "parsebench/cli.hpp"

int main(int argc, char** argv) {
  return parsebench::cli::run(argc, argv, std::cout, std::cerr);
}
