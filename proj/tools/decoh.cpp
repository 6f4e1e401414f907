#include <iostream>

#include "decoh/cli/app.hpp"

int main(int argc, char** argv) {
  return decoh::cli::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
