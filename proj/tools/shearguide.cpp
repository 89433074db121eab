#include <iostream>

#include "shearguide/cli.hpp"

int main(int argc, char** argv) {
  return shearguide::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
