#include <iostream>

#include "bpre_cli/commands.hpp"

int main(int argc, char** argv) {
  return bpre::cli::run_cli(argc, argv, std::cout, std::cerr);
}
