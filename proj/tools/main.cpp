#include <iostream>
#include <string>
#include <vector>

#include "rfm/cli.hpp"

int main(int argc, char** argv) {
  return rfm::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
