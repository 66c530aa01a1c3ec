#include <iostream>

#include "fpnni/cli/app.hpp"

int main(int argc, char** argv) {
  return fpnni::cli::run(argc, argv, std::cout, std::cerr);
}
