#include <iostream>

#include "tubelab/cli.hpp"

int main(int argc, char** argv) {
  return tubelab::cli::main_entry(argc, argv, std::cout, std::cerr);
}
