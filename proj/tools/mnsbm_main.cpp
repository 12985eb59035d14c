#include <iostream>
#include <string>
#include <vector>

#include "mnsbm/cli.hpp"

int main(int argc, char** argv) {
  return mnsbm::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
