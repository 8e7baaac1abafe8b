#include <iostream>

#include "pce/cli.hpp"

int main(int argc, char** argv) {
  return pce::cli::run(argc, argv, std::cout, std::cerr);
}
