#include <iostream>

#include "nandwalk/cli.hpp"

int main(int argc, char** argv) {
  return nandwalk::cli_main(argc, argv, std::cout, std::cerr);
}
