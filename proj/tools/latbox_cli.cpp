#include <iostream>

#include "latbox/cli.hpp"

int main(int argc, char** argv) {
  return latbox::cli_main(argc, argv, std::cout, std::cerr);
}
